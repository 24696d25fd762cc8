"""
Error classes

Named errors raised by the beamspec modules. Each one also derives from the built-in
exception that matches its nature (ValueError for bad input, ArithmeticError for
numerical failures), so code that catches built-ins keeps working; all of them derive
from BeamspecError so the command line can report any module error the same way.
"""

__author__ = 'beamspec developers'


class BeamspecError(Exception):
    """Base class for every error raised by the beamspec modules"""
    pass


class DomainError(BeamspecError, ValueError):
    """Argument outside the domain of a characteristic function evaluation"""
    pass


class PoleError(BeamspecError, ArithmeticError):
    """Scaled characteristic function evaluated at a zero of cosh"""
    pass


class NoConvergence(BeamspecError, ArithmeticError):
    """An iteration ran out of steps before meeting its tolerance"""

    def __init__(self, message, index=None, iterations=None):
        super().__init__(message)
        self.index = index
        self.iterations = iterations


class BasinEscape(BeamspecError, ArithmeticError):
    """Newton iteration converged outside the cell of its seed"""

    def __init__(self, message, index=None, tau=None):
        super().__init__(message)
        self.index = index
        self.tau = tau


class EmptyReport(BeamspecError, ValueError):
    pass


class DegenerateMode(BeamspecError, ArithmeticError):
    """Mode shape vanishes; the root it came from is spurious"""
    pass


class SingularShift(BeamspecError, ArithmeticError):
    pass


class LinearSolveFailure(BeamspecError, ArithmeticError):
    pass


class NonpositiveEnergy(BeamspecError, ValueError):
    pass


class ShapeMismatch(BeamspecError, ValueError):
    pass
