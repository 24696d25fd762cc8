"""
Beam operator module

The closed-loop generator on :math:`{\\cal H}=H^2_e(0,1)\\times L^2(0,1)`,

.. math::

    A(\\phi,\\psi) = (\\psi, -\\phi''''),\\qquad
    \\phi(0)=\\phi'(0)=\\phi(1)=0,\\quad \\phi''(1)=-k\\psi'(1),

in three forms:

* the closed-form inverse, for a state :math:`(\\phi,\\psi)` the pair :math:`(u,\\phi)` with

  .. math::

      u(x) = \\frac{3x^2-x^3}{12}\\int_0^1(1-\\xi)^3\\psi\\,d\\xi
           + \\frac{x^3-x^2}{4}\\left[\\int_0^1(1-\\xi)\\psi\\,d\\xi - k\\phi'(1)\\right]
           - \\frac16\\int_0^x(x-\\xi)^3\\psi\\,d\\xi,

  evaluated by quadrature on grid samples (``apply_resolvent``) or exactly for polynomial
  input (``resolvent_polynomial``);
* a finite-difference generator :math:`A_h` (``DiscreteGenerator``);
* a shifted inverse iteration on :math:`A_h` that serves as an independent eigenvalue oracle.

Discrete generator: nodes :math:`x_j=jh`, :math:`h=1/M`; unknowns
:math:`w_1..w_{M-1}`, :math:`v_1..v_{M-1}` (:math:`w_0=w_M=0`) and, for :math:`k>0`, the tip
curvature :math:`q=w_{xx}(1)`. Curvatures :math:`c_j` at :math:`j=0..M-1` use the ghost
:math:`w_{-1}=w_1` at the clamped end; :math:`c_M=q`. Then

.. math::

    \\dot w_j = v_j,\\qquad \\dot v_j = -(c_{j+1}-2c_j+c_{j-1})/h^2,\\qquad
    \\dot q = 2v_{M-1}/h^2 - 2q/(kh),

the last line being the moment condition :math:`q=-k v_x(1)` with the centered
derivative through the ghost :math:`w_{M+1}=2w_M-w_{M-1}+h^2q`. In the energy inner product

.. math::

    \\langle z,\\tilde z\\rangle = h\\left[\\tfrac12c_0\\bar{\\tilde c}_0+\\sum_{j=1}^{M-1}c_j\\bar{\\tilde c}_j
        +\\tfrac12q\\bar{\\tilde q}\\right] + h\\sum_{j=1}^{M-1}v_j\\bar{\\tilde v}_j

the generator satisfies :math:`{\\rm Re}\\langle A_hz,z\\rangle=-|q|^2/k` exactly (the
discrete :math:`-k|\\psi'(1)|^2`); for :math:`k=0`, :math:`q\\equiv0` is dropped and
:math:`A_h` is skew.
"""

__author__ = 'beamspec developers'

import collections
import numpy as np
from numpy.polynomial import Polynomial
import scipy.sparse as sparse
from scipy.sparse.linalg import splu
from beamspec import charfun
from beamspec.errors import NoConvergence, SingularShift, ShapeMismatch

MIN_RESOLVENT_GRID = 32
MIN_GENERATOR_GRID = 64
ORACLE_MAXITER = 200
ORACLE_TOL = 1e-10
ORACLE_SEED = 0


class StatePair(object):
    """
    Grid samples of a state (phi, psi) on M+1 uniform nodes. When built from polynomials,
    the numpy Polynomial objects are kept for exact checks.
    """

    def __init__(self, grid, phi, psi, polynomials=None):
        self.grid = np.asarray(grid, dtype=float)
        self.phi = np.asarray(phi)
        self.psi = np.asarray(psi)
        if self.grid.ndim != 1 or self.phi.shape != self.grid.shape or self.psi.shape != self.grid.shape:
            raise ShapeMismatch('state samples {} {} do not match grid {}'.format(
                self.phi.shape, self.psi.shape, self.grid.shape))
        if not np.all(np.isfinite(self.phi)) or not np.all(np.isfinite(self.psi)):
            raise ValueError('state samples must be finite')
        if abs(self.phi[0]) > 1e-12 * max(1., np.max(np.abs(self.phi))):
            raise ValueError('first component must vanish at x=0; got {}'.format(self.phi[0]))
        self.polynomials = polynomials

    @property
    def M(self):
        return len(self.grid) - 1

    @property
    def h(self):
        return 1. / self.M

    @classmethod
    def from_polynomials(cls, phi, psi, M):
        """
        State sampled from polynomials on M intervals.

        :param phi: Polynomial or coefficient sequence (increasing degree)
        :param psi: Polynomial or coefficient sequence
        :param M: number of intervals
        :return StatePair: with ``polynomials`` set
        """
        phi = phi if isinstance(phi, Polynomial) else Polynomial(phi)
        psi = psi if isinstance(psi, Polynomial) else Polynomial(psi)
        grid = np.linspace(0., 1., M + 1)
        return cls(grid, phi(grid), psi(grid), (phi, psi))

    @classmethod
    def from_functions(cls, phi, psi, M):
        """State sampled from two callables on M intervals"""
        grid = np.linspace(0., 1., M + 1)
        return cls(grid, phi(grid) * np.ones_like(grid), psi(grid) * np.ones_like(grid))

    def __str__(self):
        return 'StatePair on {} intervals'.format(self.M)


def _cumulative(f, h):
    """
    Running integral of samples f on a uniform grid, exact at every node for cubics:
    the first panel uses the four-point cubic rule, then Simpson pairs.
    """
    out = np.zeros(len(f), dtype=np.result_type(f, float))
    out[1] = h / 24. * (9. * f[0] + 19. * f[1] - 5. * f[2] + f[3])
    for j in range(2, len(f)):
        out[j] = out[j - 2] + h / 3. * (f[j - 2] + 4. * f[j - 1] + f[j])
    return out


def _endslope(f, h):
    """One-sided fourth-order derivative at the last node"""
    return (25. * f[-1] - 48. * f[-2] + 36. * f[-3] - 16. * f[-4] + 3. * f[-5]) / (12. * h)


def apply_resolvent(state, k):
    """
    Closed-form inverse of the generator on grid samples. Full integrals by composite
    Simpson, the running integral by ``_cumulative``, phi'(1) by a one-sided fourth-order
    difference.

    :param state: StatePair on an even number M >= 32 of intervals
    :param k: gain
    :return StatePair: (u, phi)
    """
    k = charfun.checkgain(k)
    M = state.M
    if M < MIN_RESOLVENT_GRID or M % 2:
        raise ValueError('resolvent quadrature needs an even M >= {}; got {}'.format(MIN_RESOLVENT_GRID, M))
    x, h, psi = state.grid, state.h, state.psi
    I3 = _cumulative((1. - x) ** 3 * psi, h)[-1]
    I1 = _cumulative((1. - x) * psi, h)[-1]
    running = x ** 3 * _cumulative(psi, h) - 3. * x ** 2 * _cumulative(x * psi, h) + \
        3. * x * _cumulative(x ** 2 * psi, h) - _cumulative(x ** 3 * psi, h)
    u = (3. * x ** 2 - x ** 3) / 12. * I3 + (x ** 3 - x ** 2) / 4. * (I1 - k * _endslope(state.phi, h)) - running / 6.
    u[0] = 0.
    return StatePair(x, u, state.phi.copy())


def resolvent_polynomial(phi, psi, k):
    """
    Exact first component u of the inverse for polynomial (phi, psi).

    :param phi: Polynomial
    :param psi: Polynomial
    :param k: gain
    :return u: Polynomial
    """
    x = Polynomial([0., 1.])
    one_minus = Polynomial([1., -1.])
    I3 = (one_minus ** 3 * psi).integ()(1.)
    I1 = (one_minus * psi).integ()(1.)
    running = x ** 3 * psi.integ() - 3. * x ** 2 * (x * psi).integ() + \
        3. * x * (x ** 2 * psi).integ() - (x ** 3 * psi).integ()
    return (3. * x ** 2 - x ** 3) * (I3 / 12.) + (x ** 3 - x ** 2) * ((I1 - k * phi.deriv()(1.)) / 4.) - running / 6.


class ResolventCheck(collections.namedtuple('ResolventCheck',
                                            'identity_residual boundary_residuals quadrature_gap')):
    """
    A(A^-1 z) = z check: max deviation of -u'''' from psi, the residuals of
    u(0), u'(0), u(1), u''(1) + k phi'(1), and the gap between sampled quadrature and the
    exact output.
    """
    __slots__ = ()

    @property
    def residual(self):
        return max(self.identity_residual, max(self.boundary_residuals))


def verify_resolvent(state, k):
    """
    Applies A exactly to the closed-form output for polynomial input.

    :param state: StatePair built with ``StatePair.from_polynomials``
    :param k: gain
    :return ResolventCheck:
    """
    k = charfun.checkgain(k)
    if state.polynomials is None:
        raise ValueError('verify_resolvent needs polynomial input (StatePair.from_polynomials)')
    phi, psi = state.polynomials
    u = resolvent_polynomial(phi, psi, k)
    x = state.grid
    identity = float(np.max(np.abs(-u.deriv(4)(x) - psi(x))))
    boundary = (abs(u(0.)), abs(u.deriv()(0.)), abs(u(1.)), abs(u.deriv(2)(1.) + k * phi.deriv()(1.)))
    gap = float(np.max(np.abs(apply_resolvent(state, k).phi - u(x))))
    return ResolventCheck(identity, tuple(float(b) for b in boundary), gap)


def _curvature_norm(f, h):
    """Discrete L2 norm of f'' (central differences, interior nodes)"""
    second = (f[2:] - 2. * f[1:-1] + f[:-2]) / h ** 2
    return np.sqrt(h * np.sum(np.abs(second) ** 2))


def resolvent_gain(state, k):
    """
    Bounded-gain form of compactness of the inverse:
    \\|u''\\| / (\\|phi''\\| + \\|psi\\|) for (u, phi) = A^-1(phi, psi), discrete norms.

    :param state: StatePair
    :param k: gain
    :return gain: real
    """
    out = apply_resolvent(state, k)
    denom = _curvature_norm(state.phi, state.h) + np.sqrt(state.h * np.sum(np.abs(state.psi) ** 2))
    if denom == 0:
        return 0.
    return float(_curvature_norm(out.phi, state.h) / denom)


class DiscreteGenerator(object):
    """
    Finite-difference generator A_h on M intervals with gain k, as a scipy sparse matrix.
    State ordering z = (w_1..w_{M-1}, v_1..v_{M-1}[, q]); q only when k > 0.
    """

    def __init__(self, M, k):
        self.M, self.k = M, k
        self.h = 1. / M
        self.N = M - 1
        self.curvature = self._curvature()
        self.weights = np.ones(M)
        self.weights[0] = 0.5
        self.matrix = self._assemble()
        self.size = self.matrix.shape[0]
        # w carries a factor h^2 relative to v; scaling it out balances the matrix
        self.balance = np.ones(self.size)
        self.balance[:self.N] = 1. / self.h ** 2

    @property
    def has_moment(self):
        return self.k > 0

    def _curvature(self):
        """M x (M-1) map from w_1..w_{M-1} to c_0..c_{M-1}"""
        h2, N = self.h ** 2, self.N
        C = sparse.diags([np.ones(N - 1), -2. * np.ones(N), np.ones(N - 1)], [-1, 0, 1], shape=(N, N))
        first = sparse.csr_matrix(([2.], ([0], [0])), shape=(1, N))
        return (sparse.vstack([first, C]) / h2).tocsr()

    def _assemble(self):
        h, N = self.h, self.N
        C = self.curvature
        stiffness = (C.T @ sparse.diags(self.weights) @ C).tocsr()
        identity = sparse.identity(N, format='csr')
        if not self.has_moment:
            return sparse.bmat([[None, identity], [-stiffness, None]], format='csr')
        moment = sparse.csr_matrix(([1. / h ** 2], ([N - 1], [0])), shape=(N, 1))
        tip = sparse.csr_matrix(([2. / h ** 2], ([0], [N - 1])), shape=(1, N))
        damping = sparse.csr_matrix([[-2. / (self.k * h)]])
        return sparse.bmat([[None, identity, None],
                            [-stiffness, None, -moment],
                            [None, tip, damping]], format='csr')

    def apply(self, z):
        return self.matrix @ z

    def split(self, z):
        """(w, v, q) blocks of a state vector; q = 0 when k = 0"""
        z = np.asarray(z)
        if z.shape != (self.size,):
            raise ShapeMismatch('state of shape {} for generator of size {}'.format(z.shape, self.size))
        q = z[2 * self.N] if self.has_moment else 0.
        return z[:self.N], z[self.N:2 * self.N], q

    def energy(self, z):
        """E = 1/2 <z, z>"""
        return 0.5 * energy_inner(self, z, z).real

    def boundary_power(self, z):
        """k \\|w_xt(1)\\|^2 = \\|q\\|^2/k"""
        if not self.has_moment:
            return 0.
        return abs(self.split(z)[2]) ** 2 / self.k

    def __str__(self):
        return 'DiscreteGenerator: M={}, k={}, size {}'.format(self.M, self.k, self.size)


def build_generator(M, k):
    """
    Finite-difference generator.

    :param M: number of intervals (>= 64)
    :param k: gain
    :return DiscreteGenerator:
    """
    k = charfun.checkgain(k)
    if M < MIN_GENERATOR_GRID:
        raise ValueError('generator needs M >= {}; got {}'.format(MIN_GENERATOR_GRID, M))
    return DiscreteGenerator(int(M), k)


def energy_inner(gen, z1, z2):
    """Discrete energy inner product <z1, z2> (conjugate-linear in z2)"""
    w1, v1, q1 = gen.split(z1)
    w2, v2, q2 = gen.split(z2)
    c1, c2 = gen.curvature @ w1, gen.curvature @ w2
    return gen.h * (np.sum(gen.weights * c1 * np.conj(c2)) + 0.5 * q1 * np.conj(q2) + np.sum(v1 * np.conj(v2)))


def dissipation_form(gen, z):
    """Re <A_h z, z>; equals -\\|q\\|^2/k"""
    return float(energy_inner(gen, gen.apply(z), z).real)


def sample_state(gen, w, v, q=None):
    """
    Generator state from node samples of (w, w_t) on the M+1 grid nodes.

    :param gen: DiscreteGenerator
    :param w: displacement samples
    :param v: velocity samples
    :param q: tip curvature (k > 0); default from the moment condition -k v_x(1)
        by a one-sided fourth-order difference
    :return z: state vector
    """
    w, v = np.asarray(w), np.asarray(v)
    if w.shape != (gen.M + 1,) or v.shape != (gen.M + 1,):
        raise ShapeMismatch('samples {} {} for a grid of {} nodes'.format(w.shape, v.shape, gen.M + 1))
    blocks = [w[1:-1], v[1:-1]]
    if gen.has_moment:
        if q is None:
            q = -gen.k * _endslope(v, gen.h)
        blocks.append([q])
    return np.concatenate(blocks)


def displacement(gen, z):
    """Node samples of w (with the clamped zeros at both ends)"""
    w = gen.split(z)[0]
    return np.concatenate([[0.], w, [0.]])


def oracle_eigenpair(gen, shift, maxiter=ORACLE_MAXITER, tol=ORACLE_TOL):
    """
    Shifted inverse iteration on the balanced generator: sparse LU of A_h - shift I once,
    then y = (A_h - shift I)^-1 z, estimate shift + <z,z>/<z,y>, z = y/\\|y\\|, until
    successive estimates differ by less than tol*max(1, \\|estimate\\|).

    :param gen: DiscreteGenerator
    :param shift: complex shift, not an eigenvalue
    :return eigenvalue: complex
    :return vector: eigenvector in the generator's state ordering
    """
    S = sparse.diags(gen.balance)
    Sinv = sparse.diags(1. / gen.balance)
    shifted = (S @ gen.matrix @ Sinv).astype(complex) - shift * sparse.identity(gen.size, dtype=complex)
    try:
        lu = splu(shifted.tocsc())
    except RuntimeError as err:
        raise SingularShift('factorization of A_h - ({})I failed: {}'.format(shift, err))
    rng = np.random.RandomState(ORACLE_SEED)
    z = rng.standard_normal(gen.size) + 1j * rng.standard_normal(gen.size)
    z /= np.linalg.norm(z)
    estimate = None
    for it in range(1, maxiter + 1):
        y = lu.solve(z)
        if not np.all(np.isfinite(y)):
            raise SingularShift('inverse iteration at shift {} produced non-finite values'.format(shift))
        new = shift + np.vdot(z, z) / np.vdot(z, y)
        z = y / np.linalg.norm(y)
        if estimate is not None and abs(new - estimate) < tol * max(1., abs(new)):
            return complex(new), z / gen.balance
        estimate = new
    raise NoConvergence('inverse iteration at shift {} did not converge in {} iterations'.format(shift, maxiter),
                        iterations=maxiter)


def oracle_eigenvalue(gen, shift, maxiter=ORACLE_MAXITER, tol=ORACLE_TOL):
    """Eigenvalue of A_h nearest the shift (see ``oracle_eigenpair``)"""
    return oracle_eigenpair(gen, shift, maxiter, tol)[0]
