"""
Modes module

Eigenfunctions of the closed-loop generator and the Riesz-basis diagnostics built on them.

For a root :math:`\\tau` the eigenfunction is

.. math::

    \\phi(x) = a_1(\\cos\\tau x-\\cosh\\tau x) + a_2(\\sin\\tau x-\\sinh\\tau x),\\qquad
    a_1 = \\sin\\tau-\\sinh\\tau,\\quad a_2 = -(\\cos\\tau-\\cosh\\tau),

which satisfies :math:`\\phi(0)=\\phi'(0)=\\phi(1)=0` identically and
:math:`\\phi''(1)=-ik\\tau^2\\phi'(1)` at a root. Everything is stored multiplied by
:math:`e^{-\\tau}`: expanding the hyperbolic terms gives

.. math::

    e^{-\\tau}\\phi(x) = \\tilde a_1\\cos\\tau x + \\tilde a_2\\sin\\tau x
        + c_+ e^{-\\tau(1-x)} + c_- e^{-\\tau x},

with :math:`\\tilde a_{1,2}=e^{-\\tau}a_{1,2}`,
:math:`c_+=-\\frac12(\\sin\\tau-\\cos\\tau+e^{-\\tau})` and
:math:`c_-=-\\frac12(\\tilde a_1-\\tilde a_2)`. No term grows with Re tau. Derivatives act on
the four coefficients; each derivative divided by :math:`\\tau` maps
:math:`(c_{\\cos}, c_{\\sin}, c_+, c_-)\\mapsto(c_{\\sin}, -c_{\\cos}, c_+, -c_-)`.

Profiles: :math:`F_n = 2\\tau_n^{-2}e^{-\\tau_n}(\\phi_n'', \\lambda_n\\phi_n)` and the explicit
leading-order profile :math:`G_n` built from :math:`T=(n+\\frac12)\\pi`,

.. math::

    G_n = \\left(-(-1)^ne^{-T(1-x)}+\\cos Tx-\\sin Tx+e^{-Tx},\\;
        i\\left[-(-1)^ne^{-T(1-x)}-\\cos Tx+\\sin Tx+e^{-Tx}\\right]\\right).

The squared norm :math:`\\int|{\\rm comp1}|^2+|{\\rm comp2}|^2` tends to 2; ``l2_norm`` returns
its square root. Quadrature is composite Simpson on the uniform grid; its error is
:math:`O(h^4)` with a constant growing like :math:`n^3` from the boundary layers
:math:`e^{-Tx}`, :math:`e^{-T(1-x)}`.
"""

__author__ = 'beamspec developers'

import collections
import numpy as np
from scipy.integrate import simpson
from beamspec import charfun, spectrum
from beamspec.errors import DegenerateMode, NoConvergence, ShapeMismatch

GRID_SIZE = 1024  # intervals; GRID_SIZE+1 samples
MIN_GRID = 16
NORM_GRID = 64
DEGENERATE = 1e-14


def uniform_grid(grid_size):
    """grid_size intervals on [0,1]"""
    return np.linspace(0., 1., grid_size + 1)


def _coefficients(tau):
    e1 = np.exp(-tau)
    s, c = np.sin(tau), np.cos(tau)
    a1 = e1 * s - 0.5 * (1. - e1 * e1)
    a2 = -e1 * c + 0.5 * (1. + e1 * e1)
    # a1 - a2 = exp(-tau)(sin tau + cos tau) - 1, without the cancellation of the 1/2 terms
    return np.array([a1, a2, -0.5 * (s - c + e1), -0.5 * (e1 * (s + c) - 1.)])


def _derive(coeffs):
    return np.array([coeffs[1], -coeffs[0], coeffs[2], -coeffs[3]])


class ModeShape(object):
    """
    Eigenfunction for one SpectralPoint, sampled on a uniform grid, scaled by exp(-tau).

    ``phi`` holds :math:`e^{-\\tau}\\phi` and ``phi2`` holds :math:`e^{-\\tau}\\phi''`;
    ``a1``, ``a2`` are the scaled coefficients :math:`e^{-\\tau}a_{1,2}`.
    """

    def __init__(self, point, grid_size=GRID_SIZE):
        self.point = point
        self.tau = complex(point.tau)
        self.grid = uniform_grid(grid_size)
        self.coeffs = _coefficients(self.tau)
        self.a1, self.a2 = self.coeffs[0], self.coeffs[1]
        self.phi = self.evaluate(0)
        self.phi2 = self.tau ** 2 * self.evaluate(2)

    @property
    def lam(self):
        return self.point.lam

    def evaluate(self, order=0, x=None):
        """
        Scaled derivative :math:`e^{-\\tau}\\tau^{-m}\\phi^{(m)}(x)`, analytic.

        :param order: derivative order m
        :param x: sample points in [0,1]; default the mode's grid
        :return values: complex samples
        """
        x = self.grid if x is None else np.asarray(x, dtype=float)
        c = self.coeffs
        for _ in range(order % 4):
            c = _derive(c)
        tx = self.tau * x
        values = c[0] * np.cos(tx) + c[1] * np.sin(tx) + c[2] * np.exp(-self.tau * (1. - x)) + c[3] * np.exp(-tx)
        if order in (0, 1):
            # both basis functions and their first derivatives vanish at 0
            values = np.where(x == 0, 0., values)
        return values

    def __str__(self):
        return 'ModeShape for {} on {} samples'.format(self.point, len(self.grid))


def build_mode(point, grid_size=GRID_SIZE, tol=spectrum.TOLERANCE):
    """
    Eigenfunction samples for a computed root, from the closed form (never by numerical
    differentiation). The root has to be converged: its residual must be below tol.

    :param point: SpectralPoint
    :param grid_size: number of intervals (>= 16)
    :param tol: residual the point has to meet
    :return mode: ModeShape
    """
    if grid_size < MIN_GRID:
        raise ValueError('grid_size={} below minimum {}'.format(grid_size, MIN_GRID))
    if not point.residual < tol:
        raise NoConvergence('root {} has residual {} above tolerance {}'.format(point.tau, point.residual, tol),
                            index=point.n, iterations=point.iterations)
    mode = ModeShape(point, grid_size)
    if np.max(np.abs(mode.phi)) < DEGENERATE:
        raise DegenerateMode('mode shape for {} vanishes; spurious root'.format(point))
    return mode


class ModeProfile(object):
    """Two-component profile (comp1, comp2) on a grid; kind is 'F' or 'G'"""

    def __init__(self, n, kind, grid, comp1, comp2):
        self.n, self.kind = n, kind
        self.grid = np.asarray(grid, dtype=float)
        self.comp1 = np.asarray(comp1, dtype=complex)
        self.comp2 = np.asarray(comp2, dtype=complex)
        if self.comp1.shape != self.grid.shape or self.comp2.shape != self.grid.shape:
            raise ShapeMismatch('profile components {} {} do not match grid {}'.format(
                self.comp1.shape, self.comp2.shape, self.grid.shape))

    def to_rows(self):
        """Rows x, Re comp1, Im comp1, Re comp2, Im comp2"""
        return list(zip(self.grid, self.comp1.real, self.comp1.imag, self.comp2.real, self.comp2.imag))

    def __str__(self):
        return '{}_{} profile on {} samples'.format(self.kind, self.n, len(self.grid))


def profile_F(mode):
    """
    :math:`F_n = 2\\tau^{-2}e^{-\\tau}(\\phi'', \\lambda\\phi)`; since
    :math:`\\tau^{-2}\\lambda = i` this is :math:`(2\\tau^{-2}e^{-\\tau}\\phi'', 2ie^{-\\tau}\\phi)`.

    :param mode: ModeShape
    :return profile: ModeProfile of kind 'F'
    """
    return ModeProfile(mode.point.n, 'F', mode.grid, 2. * mode.evaluate(2), 2j * mode.phi)


def profile_G(n, grid_size=GRID_SIZE):
    """
    Explicit leading-order profile G_n built from T = (n+1/2)pi.

    :param n: index >= 1
    :param grid_size: number of intervals
    :return profile: ModeProfile of kind 'G'
    """
    if n < 1:
        raise ValueError('profile index n={} must be at least 1'.format(n))
    x = uniform_grid(grid_size)
    T = spectrum.seed(n)
    edge = -(-1) ** n * np.exp(-T * (1. - x))
    c, s, e = np.cos(T * x), np.sin(T * x), np.exp(-T * x)
    return ModeProfile(n, 'G', x, edge + c - s + e, 1j * (edge - c + s + e))


def l2_norm(profile):
    """
    :math:`\\left(\\int_0^1|{\\rm comp1}|^2+|{\\rm comp2}|^2\\right)^{1/2}` by composite Simpson.

    :param profile: ModeProfile on at least NORM_GRID intervals
    :return norm: real
    """
    if len(profile.grid) - 1 < NORM_GRID:
        raise ValueError('l2_norm needs at least {} intervals; got {}'.format(NORM_GRID, len(profile.grid) - 1))
    integrand = np.abs(profile.comp1) ** 2 + np.abs(profile.comp2) ** 2
    return float(np.sqrt(simpson(integrand, x=profile.grid)))


def profile_distance(p1, p2):
    """Squared distance \\|p1 - p2\\|^2 of two profiles on the same grid"""
    if not np.array_equal(p1.grid, p2.grid):
        raise ShapeMismatch('profiles live on different grids')
    return l2_norm(ModeProfile(p1.n, p1.kind, p1.grid, p1.comp1 - p2.comp1, p1.comp2 - p2.comp2)) ** 2


class ClosenessRow(collections.namedtuple('ClosenessRow', 'n d_n partial_sum')):
    __slots__ = ()


def _closeness_term(n, k, grid_size, tol):
    point = spectrum.find_eigenvalue(n, k, tol)
    return profile_distance(profile_F(build_mode(point, grid_size, tol)), profile_G(n, grid_size))


def _partial_sums(indices, terms):
    return [ClosenessRow(n, d, s) for n, d, s in zip(indices, terms, np.cumsum(terms))]


def closeness_tail(n_from, n_to, k, grid_size=GRID_SIZE, tol=spectrum.TOLERANCE, processes=1):
    """
    Squared distances :math:`d_n=\\|F_n-G_n\\|^2` for n_from <= n <= n_to and their running
    sums; a summable tail (:math:`d_n = O(n^{-2})`) is the quadratic-closeness criterion.

    :param n_from: first index (>= NMIN)
    :param n_to: last index (> n_from)
    :param k: gain
    :param grid_size: quadrature intervals
    :param processes: worker processes (1 = sequential)
    :return rows: list of ClosenessRow(n, d_n, partial_sum)
    """
    k = charfun.checkgain(k)
    if n_from < spectrum.NMIN:
        raise ValueError('n_from={} must be at least NMIN={}'.format(n_from, spectrum.NMIN))
    if n_to <= n_from:
        raise ValueError('n_to={} must exceed n_from={}'.format(n_to, n_from))
    indices = list(range(n_from, n_to + 1))
    terms = spectrum.fanout(_closeness_term, [(n, k, grid_size, tol) for n in indices], processes)
    return _partial_sums(indices, terms)


def auxiliary_closeness(n_from, n_to, grid_size=GRID_SIZE, tol=spectrum.TOLERANCE):
    """
    Distances between the actual k = 0 eigenfunction profiles and G_n. The k = 0 roots sit
    near (n+1/4)pi rather than (n+1/2)pi, so these do not decay; reported only.

    :return rows: list of ClosenessRow(n, d_n, partial_sum)
    """
    return closeness_tail(n_from, n_to, 0., grid_size, tol)


def boundary_residuals(mode, k):
    """
    Residuals of the clamped-end and tip conditions of a mode:
    \\|phi(1)\\|/max\\|phi\\| and \\|phi''(1) + ik tau^2 phi'(1)\\|/max\\|phi''\\|.

    :param mode: ModeShape
    :param k: gain
    :return tip: relative \\|phi(1)\\|
    :return moment: relative moment-condition residual
    """
    p0 = mode.evaluate(0, [1.])[0]
    p1 = mode.evaluate(1, [1.])[0]
    p2 = mode.evaluate(2, [1.])[0]
    tip = abs(p0) / np.max(np.abs(mode.phi))
    # phi'' + ik tau^2 phi' = tau^2 (P2 + ik tau P1) with P_m = exp(-tau) tau^-m phi^(m)
    moment = abs(p2 + 1j * k * mode.tau * p1) / np.max(np.abs(mode.evaluate(2)))
    return tip, moment


def ode_residual(mode, x):
    """
    :math:`\\max|\\phi''''-\\tau^4\\phi| / (|\\tau|^4\\max|\\phi|)` at the given points, with
    the fourth derivative evaluated analytically.

    :param mode: ModeShape
    :param x: sample points in [0,1]
    :return residual: real
    """
    fourth = mode.evaluate(4, x)
    return float(np.max(np.abs(fourth - mode.evaluate(0, x))) / np.max(np.abs(mode.phi)))


class EnergyIdentity(collections.namedtuple('EnergyIdentity', 'lhs rhs defect')):
    """Both sides of Re(lambda) \\|(phi, lambda phi)\\|_H^2 = -k \\|lambda phi'(1)\\|^2 (scaled)"""
    __slots__ = ()


def energy_identity(mode, k):
    """
    Eigenvalue form of the dissipation identity,
    :math:`{\\rm Re}\\lambda\\,\\|(\\phi,\\lambda\\phi)\\|^2_{\\cal H} = -k|\\lambda\\phi'(1)|^2`,
    both sides multiplied by :math:`|e^{-\\tau}\\tau^{-2}|^2`.

    :param mode: ModeShape
    :param k: gain
    :return identity: EnergyIdentity(lhs, rhs, defect); defect is relative to \\|rhs\\|
        (absolute when rhs = 0)
    """
    p2, p0 = mode.evaluate(2), mode.phi
    lhs = mode.lam.real * simpson(np.abs(p2) ** 2 + np.abs(p0) ** 2, x=mode.grid)
    rhs = -k * abs(mode.tau) ** 2 * abs(mode.evaluate(1, [1.])[0]) ** 2
    defect = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs)
    return EnergyIdentity(float(lhs), float(rhs), float(defect))


def norm_limit(n, k, grid_size=GRID_SIZE, tol=spectrum.TOLERANCE):
    """
    Squared profile norm \\|F_n\\|^2 and its deviation from the limit 2.

    :return squared: \\|F_n\\|^2
    :return deviation: \\|\\|F_n\\|^2 - 2\\|
    """
    squared = l2_norm(profile_F(build_mode(spectrum.find_eigenvalue(n, k, tol), grid_size, tol))) ** 2
    return squared, abs(squared - 2.)
