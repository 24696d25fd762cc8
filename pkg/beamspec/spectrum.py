"""
Spectrum module

Locates the eigenvalues :math:`\\lambda_n = i\\tau_n^2` of the closed-loop beam generator
as roots of the scaled characteristic function (see ``charfun``).

Three searches cover the index range:

1. the *tail* :math:`n\\ge` ``NMIN``: damped Newton iteration seeded at
   :math:`(n+\\frac12)\\pi`, where neglecting :math:`e^{-\\tau}` reduces the characteristic
   equation to :math:`\\cos\\tau = -(\\cos\\tau\\tanh\\tau-\\sin\\tau)/(ik\\tau)`; the root has
   to stay in its seed cell :math:`|\\tau-(n+\\frac12)\\pi|<\\pi/2`;
2. the oscillatory *low modes* :math:`1\\le n<` ``NMIN``: an argument-principle count over
   the rectangle :math:`[0.5, {\\rm NMIN}\\,\\pi]\\times[-h,h]`, :math:`h=\\min(2k+2,\\pi)`,
   followed by Newton polish from a regular grid of starts; a root is numbered by the cell
   :math:`n\\pi\\le{\\rm Re}\\,\\tau<(n+1)\\pi` it lies in;
3. for :math:`k>0`, the *overdamped* mode n=0: a real eigenvalue :math:`\\lambda=-2a^2`
   with :math:`\\tau=a(1+i)` on the diagonal, between :math:`-4/k` (large k) and
   :math:`-2/k^2` (small k), found by a bracketed search along the diagonal. It falls
   inside the low-mode rectangle for gains of order one and is then part of the count.

Roots are kept on the canonical branch :math:`{\\rm Re}\\,\\tau>0`,
:math:`|{\\rm Re}\\,\\tau|\\ge|{\\rm Im}\\,\\tau|`, i.e. :math:`{\\rm Im}\\,\\lambda\\ge 0`; the
stable eigenvalues then have :math:`{\\rm Im}\\,\\tau\\ge 0`
(:math:`{\\rm Re}\\,\\lambda=-2\\,{\\rm Re}\\,\\tau\\,{\\rm Im}\\,\\tau`). Conjugate eigenvalues are
implied; :math:`\\bar\\lambda` corresponds to the argument :math:`i\\bar\\tau`.

For :math:`k>0` the tail follows
:math:`\\lambda_n = i(n+\\frac12)^2\\pi^2 - 2/k + O(n^{-1})`. At :math:`k=0` the roots are
real and solve :math:`\\tan\\omega=\\tanh\\omega`, which approach :math:`(n+\\frac14)\\pi`;
both reference grids are reported in the asymptote table.
"""

__author__ = 'beamspec developers'

import collections, functools, warnings
from multiprocessing import Pool
import numpy as np
from scipy.optimize import brentq
import yaml
from beamspec import charfun
from beamspec.errors import NoConvergence, BasinEscape, EmptyReport

# YAML tags:
SPECTRUMREPORT_YAMLTAG = '!SpectrumReport'

TOLERANCE = 1e-12
MAXITER = 50
MAXHALVE = 8
NMIN = 3
DEDUP = 1e-6
POLISH_GRID = 40
CONTOUR_SAMPLES = 2048
CONTOUR_MAXSAMPLES = 2 ** 16
LEFT_EDGE = 0.5
DIAGONAL_SAMPLES = 400
DIAGONAL_TOL = 1e-8  # relative |Re tau - Im tau| of a root counted as real-lambda
DIAGONAL_PHASE = np.exp(0.25j * np.pi)


def seed(n):
    """Asymptotic seed (n+1/2) pi"""
    return (n + 0.5) * np.pi


def canonical_tau(tau):
    """
    Maps any of the four arguments :math:`\\pm\\tau, \\pm i\\bar\\tau` of an eigenvalue
    pair onto the canonical branch Re tau > 0, \\|Re tau\\| >= \\|Im tau\\| (Im lambda >= 0).

    :param tau: complex root
    :return tau: canonical representative
    """
    tau = complex(tau)
    if abs(tau.imag) > abs(tau.real):
        tau = 1j * tau.conjugate()
    if tau.real < 0:
        tau = -tau
    return tau


class SpectralPoint(collections.namedtuple('SpectralPoint', 'n tau residual iterations')):
    """
    One computed eigenvalue: mode index n, root tau, residual and the number of iterations
    used. The residual is the scaled \\|S(tau)\\|, except for the overdamped root n=0 (see
    ``overdamped_root``). lambda = i tau^2 is derived on access.
    """
    __slots__ = ()

    @property
    def lam(self):
        return 1j * self.tau ** 2

    def __str__(self):
        return 'n={} tau={:.12g} lambda={:.12g} (residual {:.3g}, {} iterations)'.format(
            self.n, self.tau, self.lam, self.residual, self.iterations)


class AsymptoteError(collections.namedtuple('AsymptoteError', 'n err_tau err_re_lambda err_tau_quarter')):
    """
    Distances of a computed point from the asymptotic predictions: \\|tau - (n+1/2)pi\\|,
    \\|Re lambda + 2/k\\| (\\|Re lambda\\| when k = 0) and \\|tau - (n+1/4)pi\\|. The
    overdamped row n=0 has the same columns but follows no oscillatory asymptote.
    """
    __slots__ = ()


def asymptote_error(point, k):
    """
    Asymptote table entry for one point.

    :param point: SpectralPoint
    :param k: gain
    :return AsymptoteError:
    """
    lam = point.lam
    return AsymptoteError(point.n, abs(point.tau - seed(point.n)),
                          abs(lam.real + 2. / k) if k > 0 else abs(lam.real),
                          abs(point.tau - (point.n + 0.25) * np.pi))


def _newton(tau0, k, tol=TOLERANCE, maxiter=MAXITER, maxhalve=MAXHALVE):
    """
    Damped Newton iteration on the scaled characteristic function, vectorized over starts.
    A step is halved (up to maxhalve times) until the residual decreases; if it never does,
    the last halved step is accepted anyway. Iterates that leave the right half plane or
    produce non-finite values stop.

    :param tau0: starting values
    :param k: gain
    :param tol: stop when \\|S(tau)\\| < tol
    :return tau: final iterates
    :return residual: \\|S(tau)\\| at the final iterates (nan for failed iterates)
    :return iterations: iterations used per start
    :return exhausted: True where a step was accepted without decreasing the residual
    """
    tau = np.array(tau0, dtype=complex, ndmin=1)
    iterations = np.zeros(tau.shape, dtype=int)
    exhausted = np.zeros(tau.shape, dtype=bool)
    with np.errstate(all='ignore'):
        res = np.abs(charfun._scaled(tau, k))
        active = np.isfinite(res) & (res >= tol)
        for it in range(1, maxiter + 1):
            if not np.any(active):
                break
            index = np.flatnonzero(active)
            t, r = tau[index], res[index]
            step = charfun._scaled(t, k) / charfun._scaled_derivative(t, k)
            trial = t - step
            rtrial = np.abs(charfun._scaled(trial, k))
            for _ in range(maxhalve):
                worse = ~(rtrial < r)
                if not np.any(worse):
                    break
                step = np.where(worse, 0.5 * step, step)
                trial = np.where(worse, t - step, trial)
                rtrial = np.where(worse, np.abs(charfun._scaled(trial, k)), rtrial)
            exhausted[index[~(rtrial < r)]] = True
            tau[index], res[index] = trial, rtrial
            iterations[index] = it
            active = np.isfinite(res) & (res >= tol) & (tau.real > 0)
        # one more step on converged iterates, kept where it does not raise the residual
        done = np.flatnonzero(np.isfinite(res) & (res < tol))
        t = tau[done]
        trial = t - charfun._scaled(t, k) / charfun._scaled_derivative(t, k)
        rtrial = np.abs(charfun._scaled(trial, k))
        better = rtrial <= res[done]
        tau[done[better]], res[done[better]] = trial[better], rtrial[better]
    res[~(tau.real > 0)] = np.nan
    return tau, res, iterations, exhausted


def lowmode_box(k):
    """
    Rectangle (re0, re1, im0, im1) holding the canonical oscillatory roots with n < NMIN.
    The overdamped root (see ``overdamped_root``) lies inside as well for gains of order one.

    :param k: gain
    :return box: (re0, re1, im0, im1)
    """
    height = min(2. * k + 2., np.pi)
    return LEFT_EDGE, NMIN * np.pi, -height, height


def _inside(tau, box):
    re0, re1, im0, im1 = box
    return re0 < tau.real < re1 and im0 < tau.imag < im1


def count_zeros(k, box=None, samples=CONTOUR_SAMPLES):
    """
    Number of zeros of the scaled characteristic function inside a rectangle, from the
    winding of S along the boundary (counter-clockwise). The sampling is doubled until no
    step between neighboring samples turns the phase by more than pi/4.

    :param k: gain
    :param box: (re0, re1, im0, im1); default is the low-mode box; needs re0 > 0
    :param samples: samples per edge to start with
    :return count: integer zero count
    """
    k = charfun.checkgain(k)
    if box is None:
        box = lowmode_box(k)
    re0, re1, im0, im1 = box
    if not (0 < re0 < re1 and im0 < im1):
        raise ValueError('invalid box {}'.format(box))
    corners = [re0 + 1j * im0, re1 + 1j * im0, re1 + 1j * im1, re0 + 1j * im1, re0 + 1j * im0]
    while True:
        path = np.concatenate([np.linspace(a, b, samples, endpoint=False)
                               for a, b in zip(corners[:-1], corners[1:])] + [corners[:1]])
        values = charfun.eval_char_scaled(path, k)
        turns = np.angle(values[1:] / values[:-1])
        if np.max(np.abs(turns)) <= 0.25 * np.pi or samples >= CONTOUR_MAXSAMPLES:
            break
        samples *= 2
    return int(np.rint(np.sum(turns) / (2 * np.pi)))


def _diagonal(a, k):
    """
    :math:`e^{-2a}D(\\tau)` and :math:`e^{-2a}\\tau\\cosh\\tau\\cos\\tau` at
    :math:`\\tau=a(1+i)`, written with :math:`e^{2i\\tau}` and :math:`e^{-2\\tau}` (both of
    modulus :math:`e^{-2a}`) so that nothing overflows for large a.
    """
    tau = a * (1. + 1j)
    p, m = np.exp(2j * tau), np.exp(-2. * tau)
    coscosh = 0.25 * (1. + p) * (1. + m)
    value = 1j * k * tau * (np.exp(-2. * a) - coscosh) - 0.25j * (1. + m) * (p - 1.) - 0.25 * (1. + p) * (1. - m)
    return value, tau * coscosh


def _diagonal_real(a, k):
    # D(i conj(tau)) = -i conj(D(tau)) makes exp(i pi/4) D real on the diagonal
    return (DIAGONAL_PHASE * _diagonal(a, k)[0]).real


def overdamped_root(k, tol=TOLERANCE):
    """
    The real eigenvalue :math:`\\lambda=-2a^2<0` of the damped beam, at
    :math:`\\tau=a(1+i)`. It has index n=0. Its location runs from
    :math:`\\tau\\approx(1+i)\\sqrt{2/k}` (:math:`\\lambda\\approx-4/k`) at large gain to
    :math:`\\tau\\approx(1+i)/k` (:math:`\\lambda\\approx-2/k^2`) at small gain; the bracket
    is scanned around the larger of the two and refined with Brent's method on the real
    function :math:`e^{i\\pi/4}e^{-2a}D(a(1+i))`.

    The residual of this point is :math:`|D|/|\\tau\\cosh\\tau\\cos\\tau|`: off the real
    axis :math:`\\cos\\tau` grows like :math:`e^{a}`, which the scaled function S does not
    remove.

    :param k: gain (> 0)
    :param tol: residual tolerance
    :return point: SpectralPoint with n=0
    """
    k = charfun.checkgain(k)
    if k == 0:
        raise ValueError('the undamped beam (k=0) has no overdamped mode')
    if tol <= 0:
        raise ValueError('tolerance must be positive; got {}'.format(tol))
    scale = max(1. / k, np.sqrt(2. / k))
    a = np.geomspace(0.25 * scale, 4. * scale, DIAGONAL_SAMPLES)
    g = _diagonal_real(a, k)
    change = np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)
    if len(change) == 0:
        raise NoConvergence('no sign change of the characteristic function on the diagonal for k={}'.format(k),
                            index=0)
    if len(change) > 1:
        warnings.warn('{} real eigenvalues bracketed for k={}; keeping the least damped'.format(len(change), k),
                      RuntimeWarning, stacklevel=2)
    i = change[0]
    root, result = brentq(_diagonal_real, a[i], a[i + 1], args=(k,), xtol=1e-15 * a[i], full_output=True)
    value, norm = _diagonal(root, k)
    residual = float(abs(value) / abs(norm))
    if not residual < tol:
        raise NoConvergence('overdamped root for k={} at a={} has residual {}'.format(k, root, residual),
                            index=0, iterations=result.iterations)
    return SpectralPoint(0, complex(root, root), residual, int(result.iterations))


def _on_diagonal(tau):
    return abs(tau.real - tau.imag) <= DIAGONAL_TOL * abs(tau)


@functools.lru_cache(maxsize=32)
def _low_modes(k, tol):
    """
    Cached sweep: zero count over the box, expected count, number of distinct roots
    recovered, oscillatory points numbered by seed cell, and roots that fit no cell.
    """
    box = lowmode_box(k)
    count = count_zeros(k, box)
    re0, re1, im0, im1 = box
    X, Y = np.meshgrid(np.linspace(re0, re1, POLISH_GRID), np.linspace(im0, im1, POLISH_GRID))
    tau, res, its, exhausted = _newton((X + 1j * Y).ravel(), k, tol)
    inside = (res < tol) & (tau.real > re0) & (tau.real < re1) & (tau.imag > im0) & (tau.imag < im1)
    roots = []
    for t, r, it in sorted(zip(tau[inside], res[inside], its[inside]), key=lambda x: (x[0].real, x[0].imag)):
        if all(abs(t - t0) >= DEDUP for t0, _, _ in roots):
            roots.append((t, r, it))
    expected = NMIN - 1
    if k > 0 and _inside(overdamped_root(k).tau, box):
        expected += 1
    points, stray = [], []
    for t, r, it in sorted(((canonical_tau(t), float(r), int(it)) for t, r, it in roots), key=lambda x: x[0].real):
        if _on_diagonal(t):
            continue
        n = int(np.floor(t.real / np.pi))
        if 1 <= n < NMIN and all(p.n != n for p in points):
            points.append(SpectralPoint(n, t, r, it))
        else:
            stray.append(t)
    points.sort(key=lambda p: p.n)
    return count, expected, len(roots), tuple(points), tuple(stray)


def _checked_sweep(k, tol):
    count, expected, found, points, stray = _low_modes(k, tol)
    if count != expected:
        warnings.warn('low-mode box for k={}: argument principle counts {} zeros, expected {}'.format(
            k, count, expected), RuntimeWarning, stacklevel=3)
    if found != count:
        warnings.warn('low-mode sweep for k={}: argument principle counts {} zeros, Newton polish found {}'.format(
            k, count, found), RuntimeWarning, stacklevel=3)
    if stray:
        warnings.warn('low-mode sweep for k={}: roots {} fit no seed cell below NMIN={}'.format(
            k, list(stray), NMIN), RuntimeWarning, stacklevel=3)
    return count, list(points)


def low_modes(k, tol=TOLERANCE):
    """
    Oscillatory eigenvalues with 1 <= n < NMIN from the rectangle sweep: argument-principle
    count over ``lowmode_box(k)``, then Newton polish from a POLISH_GRID x POLISH_GRID grid
    of starts. Converged roots inside the box are deduplicated; the overdamped root on the
    diagonal is left out (see ``overdamped_root``), and the others are numbered by the cell
    :math:`n\\pi\\le{\\rm Re}\\,\\tau<(n+1)\\pi` they fall in. The count is expected to be
    NMIN-1, plus one when the overdamped root lies in the box; any disagreement between
    the count, the expected count and the recovered roots is warned on every call.

    :param k: gain
    :param tol: Newton tolerance
    :return points: list of SpectralPoint, sorted by n
    """
    return _checked_sweep(charfun.checkgain(k), float(tol))[1]


def find_eigenvalue(n, k, tol=TOLERANCE):
    """
    Eigenvalue with index n. For n >= NMIN: damped Newton from (n+1/2)pi, checked to stay
    in its seed cell; for 1 <= n < NMIN the low-mode sweep supplies the point; n = 0 is the
    overdamped real eigenvalue (k > 0 only).

    :param n: mode index (>= 0)
    :param k: gain
    :param tol: residual tolerance on \\|S(tau)\\|
    :return point: SpectralPoint
    """
    k = charfun.checkgain(k)
    if tol <= 0:
        raise ValueError('tolerance must be positive; got {}'.format(tol))
    if n < 0:
        raise ValueError('mode index n={} must be nonnegative'.format(n))
    if n == 0:
        return overdamped_root(k, tol)
    if n < NMIN:
        for p in low_modes(k, tol):
            if p.n == n:
                return p
        raise NoConvergence('low-mode sweep for k={} recovered no root in the seed cell of n={}'.format(k, n),
                            index=n)
    tau, res, its, exhausted = _newton(seed(n), k, tol)
    tau, res, its = complex(tau[0]), float(res[0]), int(its[0])
    if exhausted[0]:
        warnings.warn('Newton damping exhausted for n={}, k={}'.format(n, k), RuntimeWarning, stacklevel=2)
    if not res < tol:
        raise NoConvergence('Newton iteration for n={} (k={}) did not converge in {} iterations; residual {}'.format(
            n, k, its, res), index=n, iterations=its)
    if abs(tau - seed(n)) >= 0.5 * np.pi:
        raise BasinEscape('root for n={} (k={}) at tau={} left its seed cell'.format(n, k, tau), index=n, tau=tau)
    return SpectralPoint(n, tau, res, its)


def fanout(func, arglist, processes=1):
    """
    Evaluate func(*args) over arglist, in a process pool when processes > 1; results are in
    the order of arglist.
    """
    if processes is None or processes > 1 and len(arglist) > 1:
        with Pool(processes) as pool:
            return pool.starmap(func, arglist)
    return [func(*args) for args in arglist]


class SpectrumReport(object):
    """
    Computed spectrum for one gain: the points (sorted by Im lambda, so the real overdamped
    eigenvalue n=0 comes first when k > 0), the tolerance they were computed with, the
    asymptote table and the low-mode zero count.
    """
    __HDF5list__ = ('n', 'tau', 'residual', 'iterations')

    def __init__(self, k, points, tolerance=TOLERANCE, low_count=None):
        self.k = charfun.checkgain(k)
        self.points = sorted(points, key=lambda p: (p.lam.imag, p.n))
        self.tolerance = tolerance
        self.low_count = low_count
        self.asymptote_errors = [asymptote_error(p, self.k) for p in self.points]

    @property
    def n(self):
        return np.array([p.n for p in self.points], dtype=int)

    @property
    def tau(self):
        return np.array([p.tau for p in self.points], dtype=complex)

    @property
    def residual(self):
        return np.array([p.residual for p in self.points])

    @property
    def iterations(self):
        return np.array([p.iterations for p in self.points], dtype=int)

    @property
    def lam(self):
        return 1j * self.tau ** 2

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def point(self, n):
        """Point with mode index n"""
        for p in self.points:
            if p.n == n:
                return p
        raise KeyError('no point with index n={} in report'.format(n))

    def __repr__(self):
        return '{}(k={!r}, points={!r}, tolerance={!r}, low_count={!r})'.format(
            self.__class__.__name__, self.k, self.points, self.tolerance, self.low_count)

    def __str__(self):
        s = 'SpectrumReport: k={}, {} points, tolerance {}, low-mode count {}\n'.format(
            self.k, len(self.points), self.tolerance, self.low_count)
        return s + '\n'.join(str(p) for p in self.points)

    def rows(self):
        """
        Table rows n, Re tau, Im tau, Re lambda, Im lambda, residual, err_tau, err_re_lambda.
        """
        return [(p.n, p.tau.real, p.tau.imag, p.lam.real, p.lam.imag, p.residual, e.err_tau, e.err_re_lambda)
                for p, e in zip(self.points, self.asymptote_errors)]

    def addhdf5(self, HDF5group):
        """
        Adds an HDF5 representation of the report into an HDF5group (needs to already exist).

        :param HDF5group: HDF5 group
        """
        HDF5group.attrs['type'] = self.__class__.__name__
        HDF5group.attrs['k'] = self.k
        HDF5group.attrs['tolerance'] = self.tolerance
        HDF5group.attrs['low_count'] = -1 if self.low_count is None else self.low_count
        for internal in self.__HDF5list__:
            HDF5group[internal] = getattr(self, internal)

    @classmethod
    def loadhdf5(cls, HDF5group):
        """
        Creates a new SpectrumReport from an HDF5 group.

        :param HDF5group: HDF5 group
        :return SpectrumReport: new report
        """
        low_count = int(HDF5group.attrs['low_count'])
        points = [SpectralPoint(int(n), complex(t), float(r), int(it))
                  for n, t, r, it in zip(*(HDF5group[internal][()] for internal in cls.__HDF5list__))]
        return cls(float(HDF5group.attrs['k']), points, float(HDF5group.attrs['tolerance']),
                   None if low_count < 0 else low_count)

    @staticmethod
    def SpectrumReport_representer(dumper, data):
        """Output a SpectrumReport; complex tau as [re, im]"""
        return dumper.represent_mapping(SPECTRUMREPORT_YAMLTAG, {
            'k': data.k, 'tolerance': data.tolerance, 'low_count': data.low_count,
            'points': [[p.n, p.tau.real, p.tau.imag, p.residual, p.iterations] for p in data.points]})

    @staticmethod
    def SpectrumReport_constructor(loader, node):
        """Construct a SpectrumReport from YAML"""
        d = loader.construct_mapping(node, deep=True)
        points = [SpectralPoint(int(n), complex(re, im), float(r), int(it)) for n, re, im, r, it in d['points']]
        return SpectrumReport(d['k'], points, d['tolerance'], d['low_count'])


yaml.add_representer(SpectrumReport, SpectrumReport.SpectrumReport_representer)
yaml.add_constructor(SPECTRUMREPORT_YAMLTAG, SpectrumReport.SpectrumReport_constructor)


def compute_spectrum(n_max, k, tol=TOLERANCE, processes=1):
    """
    Overdamped mode n=0 (k > 0), oscillatory low modes from the sweep, and the Newton
    tail n = NMIN..n_max.

    :param n_max: largest tail index (>= NMIN)
    :param k: gain
    :param tol: residual tolerance
    :param processes: worker processes for the tail (1 = sequential, None = all cores)
    :return SpectrumReport: sorted by Im lambda, deduplicated
    """
    k = charfun.checkgain(k)
    if n_max < NMIN:
        raise ValueError('n_max={} must be at least NMIN={}'.format(n_max, NMIN))
    low_count, low = _checked_sweep(k, float(tol))
    if len(low) != NMIN - 1:
        warnings.warn('low-mode sweep for k={} recovered {} modes below NMIN={}'.format(k, len(low), NMIN),
                      RuntimeWarning, stacklevel=2)
    if k > 0:
        low.insert(0, overdamped_root(k, tol))
    tail = fanout(find_eigenvalue, [(n, k, tol) for n in range(NMIN, n_max + 1)], processes)
    points = []
    for p in sorted(low + tail, key=lambda p: (p.lam.imag, p.n)):
        if all(abs(p.tau - q.tau) >= DEDUP for q in points):
            points.append(p)
    return SpectrumReport(k, points, tol, low_count)


def abscissa_branch(report, oracle=()):
    """
    Spectral abscissa and the branch attaining it. Low modes come from the oracle
    eigenvalues when given (branch ``'oracle'``), otherwise from the root finder
    (``'low-mode'``, the overdamped mode n=0 included); the tail n >= NMIN is branch
    ``'tail'``.

    :param report: SpectrumReport
    :param oracle: eigenvalues of the discrete generator for the low modes
    :return abscissa: max Re lambda
    :return branch: name of the winning branch
    """
    if len(report.points) == 0 and len(oracle) == 0:
        raise EmptyReport('spectrum report for k={} has no points'.format(report.k))
    tail = [p.lam.real for p in report.points if p.n >= NMIN]
    if len(oracle) > 0:
        low, lowname = [complex(lam).real for lam in oracle], 'oracle'
    else:
        low, lowname = [p.lam.real for p in report.points if p.n < NMIN], 'low-mode'
    candidates = []
    if low:
        candidates.append((max(low), lowname))
    if tail:
        candidates.append((max(tail), 'tail'))
    return max(candidates)


def spectral_abscissa(report, oracle=()):
    """
    Max Re lambda over the computed spectrum (conjugates share the real part).

    :param report: SpectrumReport
    :param oracle: optional discrete-generator eigenvalues replacing the low modes
    :return abscissa: real
    """
    return abscissa_branch(report, oracle)[0]


def abscissa_sweep(gains, n_max=40, tol=TOLERANCE, processes=1):
    """
    Spectral abscissa and winning branch per gain.

    :param gains: list of positive gains
    :return sweep: list of (k, abscissa, branch)
    """
    sweep = []
    for k in gains:
        abscissa, branch = abscissa_branch(compute_spectrum(n_max, k, tol, processes))
        sweep.append((k, abscissa, branch))
    return sweep


def conjugate_residual(point, k):
    """
    Residual of the characteristic function at :math:`i\\bar\\tau`, the argument of
    :math:`\\bar\\lambda`, normalized by :math:`|\\tau\\cosh\\tau|` like the scaled residual.
    The raw evaluation at :math:`i\\bar\\tau` overflows once Re tau exceeds about 700. On
    the diagonal :math:`i\\bar\\tau=\\tau`, and the residual is that of ``overdamped_root``.

    :param point: SpectralPoint
    :param k: gain
    :return residual: real
    """
    tau = point.tau
    if _on_diagonal(tau):
        value, norm = _diagonal(0.5 * (tau.real + tau.imag), k)
        return float(abs(value) / abs(norm))
    cv = charfun.eval_char(1j * np.conj(tau), k)
    return abs(cv.value) * np.exp(cv.scale_exponent - tau.real) / \
        (abs(tau) * 0.5 * abs(1. + np.exp(-2. * tau)))
