__all__ = [ "errors", "charfun", "spectrum", "modes",
            "beamoperator", "simulator", "cli"]
