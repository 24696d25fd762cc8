"""
Characteristic function module

Evaluation of the characteristic function of the boundary-damped Euler-Bernoulli beam,

.. math::

    D(\\tau) = ik\\tau(1-\\cos\\tau\\cosh\\tau) + \\cosh\\tau\\sin\\tau - \\cos\\tau\\sinh\\tau,

whose roots give the eigenvalues :math:`\\lambda = i\\tau^2` of the closed-loop generator
with feedback gain :math:`k`. At :math:`k=0` the same formula is the characteristic
function :math:`\\cosh\\omega\\sin\\omega-\\cos\\omega\\sinh\\omega` of the skew-adjoint
auxiliary operator (equivalently :math:`\\tan\\omega=\\tanh\\omega`). This equation is
sometimes printed as :math:`\\cosh\\omega\\sin\\omega-\\cos\\tau\\sinh\\omega`; the
:math:`\\cos\\tau` there is a typo for :math:`\\cos\\omega`, which is what is evaluated here.

The hyperbolic functions overflow in double precision near :math:`{\\rm Re}\\,\\tau=710`,
while roots up to :math:`n\\approx 10^4` have to be reachable. Two representations avoid this:

* ``eval_char`` returns a ``CharValue``: the raw value is ``value*exp(scale_exponent)``,
  with the growth :math:`e^{|{\\rm Re}\\,\\tau|}` pulled into ``scale_exponent`` once
  :math:`|{\\rm Re}\\,\\tau|>1`;
* ``eval_char_scaled`` returns

  .. math::

      S(\\tau) = \\frac{D(\\tau)}{\\tau\\cosh\\tau}
               = ik({\\rm sech}\\,\\tau-\\cos\\tau) + \\frac{\\sin\\tau-\\cos\\tau\\tanh\\tau}{\\tau},

  with sech and tanh built from :math:`e^{-2\\tau}`, which cannot overflow for
  :math:`{\\rm Re}\\,\\tau\\ge 0`. This is the function the root finder works with; it is
  bounded on horizontal strips as :math:`{\\rm Re}\\,\\tau\\to\\infty`.

All functions accept scalars or numpy arrays.
"""

__author__ = 'beamspec developers'

import collections
import numpy as np
from beamspec.errors import DomainError, PoleError

POLE_TOL = 1e-14  # |1 + exp(-2 tau)| below this is treated as a zero of cosh
UNSCALED_RE = 1.  # raw representation for |Re tau| up to this value


def checkgain(k):
    """
    Validate a feedback gain.

    :param k: gain; finite and nonnegative (k=0 is the auxiliary skew-adjoint case)
    :return k: gain as float
    """
    k = float(k)
    if not np.isfinite(k) or k < 0:
        raise ValueError('gain k={} must be finite and nonnegative'.format(k))
    return k


class CharValue(collections.namedtuple('CharValue', 'value scale_exponent')):
    """
    Characteristic value in scaled representation; the raw value of D is
    ``value * exp(scale_exponent)``. For :math:`|{\\rm Re}\\,\\tau|\\le 1` the scale
    exponent is zero and ``value`` is the raw value.
    """
    __slots__ = ()

    def raw(self):
        """Raw value of D; overflows when scale_exponent is large"""
        return self.value * np.exp(self.scale_exponent)

    def __str__(self):
        return '{} * exp({})'.format(self.value, self.scale_exponent)


def _checktau(tau):
    t = np.asarray(tau, dtype=complex)
    if not np.all(np.isfinite(t)):
        raise DomainError('characteristic function needs finite tau; got {}'.format(tau))
    return t


def _checkhalfplane(t):
    if np.any(np.abs(1. + np.exp(-2. * t)) <= POLE_TOL):
        raise PoleError('cosh(tau) = 0 at tau={}'.format(t[np.abs(1. + np.exp(-2. * t)) <= POLE_TOL]))
    if np.any(t.real < 0):
        raise DomainError('scaled characteristic function needs Re tau >= 0; got {}'.format(t[t.real < 0]))
    if np.any(t == 0):
        raise DomainError('scaled characteristic function is undefined at tau = 0')


def _hyperbolic(t):
    """sech(t), tanh(t) from exp(-2t); no overflow for Re t >= 0"""
    e1 = np.exp(-t)
    e2 = e1 * e1
    return 2. * e1 / (1. + e2), (1. - e2) / (1. + e2)


def _raw(t, k):
    c, s = np.cos(t), np.sin(t)
    ch, sh = np.cosh(t), np.sinh(t)
    return 1j * k * t * (1. - c * ch) + ch * s - c * sh


def _scaled(t, k):
    """Scaled characteristic function without argument checks (non-finite where invalid)"""
    sech, tanh = _hyperbolic(t)
    c, s = np.cos(t), np.sin(t)
    return 1j * k * (sech - c) + (s - c * tanh) / t


def _scaled_derivative(t, k):
    """Analytic derivative of the scaled characteristic function, without argument checks"""
    sech, tanh = _hyperbolic(t)
    c, s = np.cos(t), np.sin(t)
    # d/dt (s - c tanh) = c + s tanh - c sech^2 = c tanh^2 + s tanh
    return 1j * k * (s - sech * tanh) + (c * tanh * tanh + s * tanh) / t - (s - c * tanh) / (t * t)


def _result(value, like):
    return value if np.ndim(like) else complex(value)


def eval_char(tau, k):
    """
    Characteristic function in scaled representation.

    For :math:`|{\\rm Re}\\,\\tau|>1` the function is expanded as
    :math:`D(\\tau)=\\tau\\cosh\\tau\\,S(\\tau)` with
    :math:`\\cosh\\tau = e^{{\\rm Re}\\,\\tau}e^{i{\\rm Im}\\,\\tau}(1+e^{-2\\tau})/2`;
    for :math:`{\\rm Re}\\,\\tau<-1` the oddness :math:`D(-\\tau)=-D(\\tau)` is used.

    :param tau: complex argument (scalar or array), finite
    :param k: feedback gain
    :return CharValue: (value, scale_exponent) with raw D = value*exp(scale_exponent)
    """
    k = checkgain(k)
    t = _checktau(tau)
    tt = np.atleast_1d(t)
    value = np.zeros(tt.shape, dtype=complex)
    scale = np.zeros(tt.shape)
    small = np.abs(tt.real) <= UNSCALED_RE
    value[small] = _raw(tt[small], k)
    big = ~small
    if np.any(big):
        sgn = np.where(tt[big].real > 0, 1., -1.)
        ta = sgn * tt[big]
        value[big] = sgn * ta * 0.5 * (1. + np.exp(-2. * ta)) * np.exp(1j * ta.imag) * _scaled(ta, k)
        scale[big] = ta.real
    if np.ndim(t):
        return CharValue(value, scale)
    return CharValue(complex(value[0]), float(scale[0]))


def eval_char_scaled(tau, k):
    """
    Scaled characteristic function :math:`S(\\tau)=D(\\tau)/(\\tau\\cosh\\tau)`.

    :param tau: complex argument (scalar or array) with Re tau >= 0, tau != 0
    :param k: feedback gain
    :return S: complex value(s); bounded for Re tau -> infinity at bounded Im tau
    """
    k = checkgain(k)
    t = _checktau(tau)
    _checkhalfplane(np.atleast_1d(t))
    return _result(_scaled(t, k), t)


def eval_char_derivative(tau, k):
    """
    Derivative :math:`dS/d\\tau` of the scaled characteristic function, from the
    term-by-term analytic derivative in the same representation.

    :param tau: complex argument (scalar or array) with Re tau >= 0, tau != 0
    :param k: feedback gain
    :return dS: complex value(s)
    """
    k = checkgain(k)
    t = _checktau(tau)
    _checkhalfplane(np.atleast_1d(t))
    return _result(_scaled_derivative(t, k), t)
