"""
Simulator module

Time-domain simulation of the closed-loop beam

.. math::

    w_{tt}+w_{xxxx}=0,\\quad w(0)=w_x(0)=w(1)=0,\\quad w_{xx}(1,t)=-kw_{xt}(1,t),

as the first-order system :math:`\\dot z = A_hz` with the finite-difference generator of
``beamoperator``. Time stepping is the trapezoidal (Crank-Nicolson) rule

.. math::

    (I-\\tfrac{\\Delta t}{2}A_h)z^{n+1} = (I+\\tfrac{\\Delta t}{2}A_h)z^n,

with the left matrix factorized once per run. The trapezoidal rule leaves modes with
:math:`|\\lambda|\\Delta t\\gg 1` almost undamped, so for :math:`k>0` the first
``STARTUP_STEPS`` steps are replaced by twice as many backward-Euler half-steps
:math:`(I-\\tfrac{\\Delta t}{2}A_h)z^{n+1/2} = z^n`, which reuse the same factorization
and remove the stiff part of rough initial data. Because :math:`A_h` is dissipative in the
discrete energy inner product, the energy :math:`E=\\frac12\\langle z,z\\rangle` cannot grow
from one step to the next under either scheme, and it is conserved to rounding when
:math:`k=0`, where the start-up is skipped.

The energy balance :math:`\\dot E = -k|w_{xt}(1)|^2` is checked on recorded traces, and
:math:`\\log E` is fitted by a line to estimate the decay rate :math:`\\mu` and prefactor
:math:`M` in :math:`E(t)\\le Me^{-\\mu t}E(0)`, to compare with twice the spectral abscissa.
"""

__author__ = 'beamspec developers'

import collections, re, warnings
import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu
import yaml
from beamspec import charfun, spectrum, beamoperator
from beamspec.errors import LinearSolveFailure, NonpositiveEnergy

# YAML tags:
SIMCONFIG_YAMLTAG = '!SimConfig'

POLY_AMPLITUDE = 1. / 16.  # peak of x^2(1-x)^2
MIXED_MODE = 3
ORACLE_OFFSET = 1e-3  # relative shift from the root-finder eigenvalue
FIT_START = 0.2  # default fit window skips the first 20% of the run
STARTUP_STEPS = 2  # full steps done as two backward-Euler half-steps each (k > 0)
IC_PATTERN = re.compile(r'^\s*(?:(poly)|(mixed)|mode\s*[:=]?\s*(\d+))\s*$')


def parse_ic(ic):
    """
    Initial-condition selector: 'poly', 'mixed' or 'mode j' (also 'mode:j', 'mode=j').

    :param ic: selector string
    :return kind: 'poly', 'mixed' or 'mode'
    :return j: mode index for 'mode', else None
    """
    match = IC_PATTERN.match(str(ic))
    if match is None:
        raise ValueError('unknown initial condition "{}"; use poly, mixed or "mode j"'.format(ic))
    if match.group(1):
        return 'poly', None
    if match.group(2):
        return 'mixed', None
    j = int(match.group(3))
    if j < 1:
        raise ValueError('mode index in "{}" must be at least 1'.format(ic))
    return 'mode', j


class SimConfig(object):
    """
    Simulation parameters: M intervals, time step dt, final time t_final, gain k, initial
    condition ic, and a record every record_every steps.
    """
    __fields__ = ('M', 'dt', 't_final', 'k', 'ic', 'record_every')

    def __init__(self, M=200, dt=1e-3, t_final=5., k=1., ic='poly', record_every=1):
        self.M, self.dt, self.t_final = int(M), float(dt), float(t_final)
        self.k, self.ic, self.record_every = charfun.checkgain(k), str(ic), int(record_every)
        if self.M < beamoperator.MIN_GENERATOR_GRID:
            raise ValueError('M={} below minimum {}'.format(self.M, beamoperator.MIN_GENERATOR_GRID))
        if not self.dt > 0:
            raise ValueError('time step dt={} must be positive'.format(self.dt))
        if not self.t_final >= 10. * self.dt:
            raise ValueError('t_final={} must be at least 10 dt={}'.format(self.t_final, 10. * self.dt))
        if self.record_every < 1:
            raise ValueError('record_every={} must be at least 1'.format(self.record_every))
        parse_ic(self.ic)

    @property
    def nsteps(self):
        return int(round(self.t_final / self.dt))

    def asdict(self):
        return {field: getattr(self, field) for field in self.__fields__}

    def replace(self, **kwargs):
        """Copy with some fields replaced"""
        d = self.asdict()
        d.update(kwargs)
        return SimConfig(**d)

    @classmethod
    def fromdict(cls, yamldict):
        """
        Creates a SimConfig from a dictionary; missing entries take the defaults.

        :param yamldict: dictionary with any of M, dt, t_final, k, ic, record_every
        """
        unknown = set(yamldict) - set(cls.__fields__)
        if unknown:
            raise KeyError('unknown simulation parameters {}'.format(sorted(unknown)))
        return cls(**yamldict)

    @classmethod
    def fromYAML(cls, yamlstring):
        """
        Creates a SimConfig from YAML text: either a plain mapping or a !SimConfig node.
        """
        data = yaml.load(yamlstring, Loader=yaml.FullLoader)
        if isinstance(data, cls):
            return data
        if not isinstance(data, dict):
            raise ValueError('simulation configuration must be a mapping; got {!r}'.format(data))
        return cls.fromdict(data)

    def simpleYAML(self):
        """Plain YAML mapping of the parameters"""
        return yaml.dump(self.asdict(), default_flow_style=False)

    def __repr__(self):
        return '{}({})'.format(self.__class__.__name__,
                               ', '.join('{}={!r}'.format(f, getattr(self, f)) for f in self.__fields__))

    def __str__(self):
        return 'SimConfig: M={} dt={} t_final={} k={} ic={} record_every={}'.format(
            self.M, self.dt, self.t_final, self.k, self.ic, self.record_every)

    def __eq__(self, other):
        return isinstance(other, SimConfig) and self.asdict() == other.asdict()

    @staticmethod
    def SimConfig_representer(dumper, data):
        """Output a SimConfig"""
        return dumper.represent_mapping(SIMCONFIG_YAMLTAG, data.asdict())

    @staticmethod
    def SimConfig_constructor(loader, node):
        """Construct a SimConfig from YAML"""
        return SimConfig(**loader.construct_mapping(node, deep=True))


yaml.add_representer(SimConfig, SimConfig.SimConfig_representer)
yaml.add_constructor(SIMCONFIG_YAMLTAG, SimConfig.SimConfig_constructor)


def _mode_state(gen, j):
    """
    Real eigen-solution Re(c e^{lambda t} z_j) of the discrete generator at t = 0: the
    eigenvector is refined by the oracle from the root-finder eigenvalue, and c sets the
    peak displacement to POLY_AMPLITUDE.
    """
    point = spectrum.find_eigenvalue(j, gen.k)
    lam, vector = beamoperator.oracle_eigenpair(gen, point.lam * (1. + ORACLE_OFFSET))
    w = beamoperator.displacement(gen, vector)
    vector = vector * (POLY_AMPLITUDE / w[np.argmax(np.abs(w))])
    return vector.real


def _poly_state(gen):
    x = np.linspace(0., 1., gen.M + 1)
    # w1 = 0, so the moment condition starts the tip curvature at 0
    return beamoperator.sample_state(gen, x ** 2 * (1. - x) ** 2, np.zeros_like(x), q=0.)


def initial_state(config, gen=None):
    """
    Discrete initial state for the configured initial condition:

    * ``poly``: w0 = x^2(1-x)^2, w1 = 0;
    * ``mode j``: real part of the j-th eigen-solution, peak displacement 1/16;
    * ``mixed``: poly plus mode 3.

    The tip curvature starts at -k w1'(1).

    :param config: SimConfig
    :param gen: DiscreteGenerator (built from config when not given)
    :return z0: state vector
    """
    if gen is None:
        gen = beamoperator.build_generator(config.M, config.k)
    kind, j = parse_ic(config.ic)
    if kind == 'poly':
        return _poly_state(gen)
    if kind == 'mode':
        return _mode_state(gen, j)
    return _poly_state(gen) + _mode_state(gen, MIXED_MODE)


class EnergyTrace(object):
    """
    Recorded energy E(t) and boundary power k\\|w_xt(1,t)\\|^2 of a run. Records before
    startup_time come from the backward-Euler start-up.
    """
    __HDF5list__ = ('times', 'energy', 'boundary_power')

    def __init__(self, times, energy, boundary_power, config=None, startup_time=0.):
        self.times = np.asarray(times, dtype=float)
        self.energy = np.asarray(energy, dtype=float)
        self.boundary_power = np.asarray(boundary_power, dtype=float)
        if not (self.times.shape == self.energy.shape == self.boundary_power.shape):
            raise ValueError('trace arrays of different lengths')
        self.config = config
        self.startup_time = float(startup_time)

    def __len__(self):
        return len(self.times)

    def to_rows(self):
        """Rows t, E, boundary_power"""
        return list(zip(self.times, self.energy, self.boundary_power))

    def __repr__(self):
        return '{}(times=..., energy=..., boundary_power=..., config={!r})'.format(
            self.__class__.__name__, self.config)

    def __str__(self):
        if len(self) == 0:
            return 'EnergyTrace: empty'
        return 'EnergyTrace: {} records on [{}, {}], E(0)={:.6g}, E(end)={:.6g}'.format(
            len(self), self.times[0], self.times[-1], self.energy[0], self.energy[-1])

    def addhdf5(self, HDF5group):
        """
        Adds an HDF5 representation of the trace into an HDF5group (needs to already exist).

        :param HDF5group: HDF5 group
        """
        HDF5group.attrs['type'] = self.__class__.__name__
        HDF5group.attrs['startup_time'] = self.startup_time
        if self.config is not None:
            HDF5group.attrs['config_yaml'] = self.config.simpleYAML()
        for internal in self.__HDF5list__:
            HDF5group[internal] = getattr(self, internal)

    @classmethod
    def loadhdf5(cls, HDF5group):
        """
        Creates a new EnergyTrace from an HDF5 group.

        :param HDF5group: HDF5 group
        :return EnergyTrace:
        """
        config = None
        if 'config_yaml' in HDF5group.attrs:
            config = SimConfig.fromYAML(HDF5group.attrs['config_yaml'])
        return cls(*(HDF5group[internal][()] for internal in cls.__HDF5list__), config=config,
                   startup_time=float(HDF5group.attrs.get('startup_time', 0.)))


def simulate(config, z0=None):
    """
    Crank-Nicolson run of the discrete closed-loop beam. For k > 0 the first STARTUP_STEPS
    steps are each done as two backward-Euler half-steps with the same factorization.

    :param config: SimConfig
    :param z0: initial state (default from ``initial_state``)
    :return EnergyTrace: records at t = 0 and every record_every steps
    """
    gen = beamoperator.build_generator(config.M, config.k)
    z = initial_state(config, gen) if z0 is None else np.array(z0, dtype=float)
    half = 0.5 * config.dt * gen.matrix
    identity = sparse.identity(gen.size, format='csr')
    try:
        lu = splu((identity - half).tocsc())
    except RuntimeError as err:
        raise LinearSolveFailure('factorization of the stepping matrix failed: {}'.format(err))
    explicit = (identity + half).tocsr()
    startup = STARTUP_STEPS if config.k > 0 else 0
    times, energy, power = [0.], [gen.energy(z)], [gen.boundary_power(z)]
    for step in range(1, config.nsteps + 1):
        if step <= startup:
            z = lu.solve(lu.solve(z))
        else:
            z = lu.solve(explicit @ z)
        if step % config.record_every == 0:
            times.append(step * config.dt)
            energy.append(gen.energy(z))
            power.append(gen.boundary_power(z))
    if not np.all(np.isfinite(energy)):
        raise LinearSolveFailure('stepping produced non-finite states')
    return EnergyTrace(times, energy, power, config, startup * config.dt)


def dissipation_check(trace):
    """
    Discrete energy balance: max over interior records of
    \\|(E_{j+1}-E_{j-1})/(t_{j+1}-t_{j-1}) + P_j\\| / E(0). Differences reaching back into
    the start-up interval are skipped: backward Euler dissipates energy of its own there.

    :param trace: EnergyTrace with at least 3 records
    :return defect: real (0 for the zero solution)
    """
    if len(trace) < 3:
        raise ValueError('dissipation check needs at least 3 records; got {}'.format(len(trace)))
    E, t = trace.energy, trace.times
    if E[0] == 0:
        return 0.
    rate = (E[2:] - E[:-2]) / (t[2:] - t[:-2])
    after = t[:-2] >= trace.startup_time - 1e-9 * (t[-1] - t[0])
    if not np.any(after):
        raise ValueError('no interior records after the start-up time {}'.format(trace.startup_time))
    return float(np.max(np.abs(rate + trace.boundary_power[1:-1])[after]) / E[0])


def max_energy_increase(trace):
    """Largest relative growth E_{j+1}/E_j - 1 between records (<= 0 when non-increasing)"""
    E = trace.energy
    if len(E) < 2 or E[0] == 0:
        return 0.
    return float(np.max((E[1:] - E[:-1]) / np.maximum(E[:-1], np.finfo(float).tiny)))


class DecayEstimate(collections.namedtuple('DecayEstimate', 'mu_hat M_hat fit_window fit_residual')):
    """
    Fitted E(t) ~ M_hat E(0) exp(-mu_hat t) over fit_window; fit_residual is the RMS
    deviation of log E from the line.
    """
    __slots__ = ()

    def asdict(self):
        return {'mu_hat': self.mu_hat, 'M_hat': self.M_hat,
                'window': list(self.fit_window), 'residual': self.fit_residual}

    def __str__(self):
        return 'DecayEstimate: mu_hat={:.6g} M_hat={:.6g} on [{:.6g}, {:.6g}], residual {:.3g}'.format(
            self.mu_hat, self.M_hat, self.fit_window[0], self.fit_window[1], self.fit_residual)

    def addhdf5(self, HDF5group):
        """
        Adds an HDF5 representation of the estimate into an HDF5group (needs to already exist).

        :param HDF5group: HDF5 group
        """
        HDF5group.attrs['type'] = self.__class__.__name__
        for internal in self._fields:
            HDF5group.attrs[internal] = getattr(self, internal)

    @classmethod
    def loadhdf5(cls, HDF5group):
        """Creates a new DecayEstimate from an HDF5 group"""
        return cls(float(HDF5group.attrs['mu_hat']), float(HDF5group.attrs['M_hat']),
                   tuple(float(t) for t in HDF5group.attrs['fit_window']), float(HDF5group.attrs['fit_residual']))


def fit_decay(trace, window=None):
    """
    Least-squares line through log E(t) over the window.

    :param trace: EnergyTrace
    :param window: (t_start, t_end); default the last 80% of the run; clipped (with a
        warning) to the recorded time span
    :return DecayEstimate: mu_hat = -slope, M_hat = exp(intercept)/E(0)
    """
    t, E = trace.times, trace.energy
    if len(t) < 2:
        raise ValueError('decay fit needs at least 2 records')
    if window is None:
        window = (t[0] + FIT_START * (t[-1] - t[0]), t[-1])
    t0, t1 = float(window[0]), float(window[1])
    if t1 <= t0:
        raise ValueError('empty fit window ({}, {})'.format(t0, t1))
    if t0 < t[0] or t1 > t[-1]:
        warnings.warn('fit window ({}, {}) clipped to the trace span ({}, {})'.format(t0, t1, t[0], t[-1]),
                      RuntimeWarning, stacklevel=2)
        t0, t1 = max(t0, t[0]), min(t1, t[-1])
    slack = 1e-9 * (t[-1] - t[0])
    inside = (t >= t0 - slack) & (t <= t1 + slack)
    if np.count_nonzero(inside) < 2:
        raise ValueError('fit window ({}, {}) holds fewer than 2 records'.format(t0, t1))
    if np.any(E[inside] <= 0):
        raise NonpositiveEnergy('energy in fit window ({}, {}) is not positive'.format(t0, t1))
    logE = np.log(E[inside])
    slope, intercept = np.polyfit(t[inside], logE, 1)
    residual = np.sqrt(np.mean((logE - (slope * t[inside] + intercept)) ** 2))
    return DecayEstimate(float(-slope), float(np.exp(intercept) / E[0]), (t0, t1), float(residual))


def gain_sweep(config, gains, window=None):
    """
    Decay estimate per gain for otherwise fixed parameters.

    :param config: SimConfig
    :param gains: gains to run
    :return sweep: list of (k, DecayEstimate)
    """
    return [(k, fit_decay(simulate(config.replace(k=k)), window)) for k in gains]


def predicted_rate(k, M, n_max=40, tol=spectrum.TOLERANCE):
    """
    Twice the spectral abscissa of the discrete generator: low modes n <= NMIN refined by
    the oracle, the tail from the root finder.

    :param k: gain (> 0)
    :param M: generator intervals
    :return rate: 2 \\|abscissa\\|
    :return branch: 'oracle' or 'tail'
    """
    report = spectrum.compute_spectrum(n_max, k, tol)
    gen = beamoperator.build_generator(M, k)
    oracle = [beamoperator.oracle_eigenvalue(gen, p.lam * (1. + ORACLE_OFFSET))
              for p in report.points if p.n <= spectrum.NMIN]
    abscissa, branch = spectrum.abscissa_branch(report, oracle)
    return 2. * abs(abscissa), branch
