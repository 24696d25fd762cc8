"""
Unit tests for the characteristic function and its scaled representation
"""

__author__ = 'beamspec developers'

import unittest
import numpy as np
import beamspec.charfun as charfun
from beamspec.errors import DomainError, PoleError


def rawD(tau, k):
    """Characteristic function straight from its definition (overflows for large Re tau)"""
    c, s = np.cos(tau), np.sin(tau)
    ch, sh = np.cosh(tau), np.sinh(tau)
    return 1j * k * tau * (1. - c * ch) + ch * s - c * sh


class CharacteristicFunctionTests(unittest.TestCase):
    """Tests of the raw and scaled characteristic function"""

    longMessage = False

    def setUp(self):
        x, y = np.meshgrid(np.linspace(0.3, 5., 17), np.linspace(-2., 2., 9))
        self.taulist = (x + 1j * y).ravel()
        self.klist = (0., 0.5, 1., 2.)

    def testScaledMatchesRaw(self):
        """Scaled and CharValue representations reproduce the raw formula for moderate tau"""
        for k in self.klist:
            for tau in self.taulist:
                D = rawD(tau, k)
                scale = abs(tau * np.cosh(tau)) * (1. + k)
                S = charfun.eval_char_scaled(tau, k)
                self.assertAlmostEqual(abs(S * tau * np.cosh(tau) - D) / scale, 0., places=12,
                                       msg='Scaled value wrong at tau={}, k={}'.format(tau, k))
                self.assertAlmostEqual(abs(charfun.eval_char(tau, k).raw() - D) / scale, 0., places=12,
                                       msg='CharValue wrong at tau={}, k={}'.format(tau, k))

    def testSmallArgumentUnscaled(self):
        """For |Re tau| <= 1 the scale exponent is zero"""
        for tau in (0.5 + 0.1j, 1. - 2j, -0.7 + 0.3j):
            cv = charfun.eval_char(tau, 1.)
            self.assertEqual(cv.scale_exponent, 0.)
            self.assertAlmostEqual(abs(cv.value - rawD(tau, 1.)), 0., places=13)

    def testOddness(self):
        """D(-tau) = -D(tau) in both representations"""
        for tau in (0.5 + 0.2j, 3. + 0.5j, 40. - 1j):
            plus, minus = charfun.eval_char(tau, 1.), charfun.eval_char(-tau, 1.)
            self.assertEqual(plus.scale_exponent, minus.scale_exponent)
            self.assertAlmostEqual(abs(plus.value + minus.value) / abs(plus.value), 0., places=13)

    def testDerivative(self):
        """Analytic derivative agrees with a central difference"""
        tau, step = 2. + 0.1j, 1e-5
        for k in self.klist:
            fd = (charfun.eval_char_scaled(tau + step, k) - charfun.eval_char_scaled(tau - step, k)) / (2 * step)
            d = charfun.eval_char_derivative(tau, k)
            self.assertAlmostEqual(abs(fd - d) / abs(d), 0., places=6,
                                   msg='Derivative mismatch for k={}: {} vs {}'.format(k, d, fd))

    def testRealAtZeroGain(self):
        """At k=0 the function is real on the real axis"""
        omega = np.linspace(0.5, 30., 101)
        S = charfun.eval_char_scaled(omega, 0.)
        self.assertAlmostEqual(np.max(np.abs(S.imag)), 0., places=14)
        self.assertAlmostEqual(charfun.eval_char_scaled(3.92660231, 0.), 0., places=7)

    def testBoundedForLargeArgument(self):
        """No overflow far out: Re tau up to 1e4 gives finite, bounded values"""
        tau = np.array([800. + 0.2j, 1e3 + 0.5j, 1e4 + 0.5j])
        S = charfun.eval_char_scaled(tau, 1.)
        self.assertTrue(np.all(np.isfinite(S)))
        self.assertTrue(np.all(np.abs(S) < 2.), msg='Scaled values not bounded: {}'.format(S))
        cv = charfun.eval_char(tau, 1.)
        self.assertTrue(np.all(np.isfinite(cv.value)))
        self.assertTrue(np.allclose(cv.scale_exponent, tau.real))
        self.assertTrue(np.all(np.isfinite(charfun.eval_char_derivative(tau, 1.))))

    def testArrayShape(self):
        """Array in, array out; scalar in, complex out"""
        tau = self.taulist.reshape((9, 17))
        self.assertEqual(charfun.eval_char_scaled(tau, 1.).shape, (9, 17))
        self.assertEqual(charfun.eval_char(tau, 1.).value.shape, (9, 17))
        self.assertIsInstance(charfun.eval_char_scaled(2. + 1j, 1.), complex)

    def testErrors(self):
        """Non-finite arguments, the left half plane, tau=0 and poles are rejected"""
        with self.assertRaises(PoleError):
            charfun.eval_char_scaled(0.5j * np.pi, 1.)
        with self.assertRaises(DomainError):
            charfun.eval_char(np.nan, 1.)
        with self.assertRaises(DomainError):
            charfun.eval_char_scaled(complex(np.inf, 0.), 1.)
        with self.assertRaises(DomainError):
            charfun.eval_char_scaled(-1. + 0.5j, 1.)
        with self.assertRaises(DomainError):
            charfun.eval_char_derivative(0., 1.)
        with self.assertRaises(ValueError):
            charfun.eval_char(1. + 1j, -1.)
        with self.assertRaises(ValueError):
            charfun.checkgain(np.inf)
