"""
Unit tests for the eigenvalue search: Newton tail, low-mode sweep, reports and abscissa
"""

__author__ = 'beamspec developers'

import unittest
from unittest import mock
import numpy as np
import yaml
import beamspec.charfun as charfun
import beamspec.spectrum as spectrum
from beamspec.errors import EmptyReport

OMEGA1 = 3.926602312047919  # first positive root of tan(w) = tanh(w)


class NewtonTailTests(unittest.TestCase):
    """Tests of single eigenvalues from the asymptotic seeds"""

    longMessage = False

    def testTailRoot(self):
        """n=30, k=1: converged, inside its seed cell, damped"""
        p = spectrum.find_eigenvalue(30, 1.)
        self.assertEqual(p.n, 30)
        self.assertLess(p.residual, spectrum.TOLERANCE)
        self.assertLess(abs(charfun.eval_char_scaled(p.tau, 1.)), spectrum.TOLERANCE)
        self.assertLess(abs(p.tau - spectrum.seed(30)), 0.5 * np.pi)
        self.assertGreater(p.tau.imag, 0.)
        self.assertLess(p.lam.real, 0.)
        self.assertAlmostEqual(p.lam.real, -2., delta=0.01)

    def testAuxiliaryTailRoot(self):
        """n=30, k=0: real root of tan = tanh next to (n+1/4)pi"""
        p = spectrum.find_eigenvalue(30, 0.)
        self.assertAlmostEqual(p.tau.imag, 0., places=12)
        self.assertAlmostEqual(p.tau.real, 30.25 * np.pi, places=9)

    def testGainLaw(self):
        """Re lambda_50 sits near -2/k"""
        for k in (0.5, 1., 2., 4.):
            p = spectrum.find_eigenvalue(50, k)
            self.assertLess(abs(p.lam.real + 2. / k), 0.01 * 2. / k,
                            msg='Re lambda_50 = {} for k={}'.format(p.lam.real, k))

    def testFarTail(self):
        """Roots with Re tau well past the overflow point of cosh are reachable"""
        p = spectrum.find_eigenvalue(1000, 1.)
        self.assertGreater(p.tau.real, 1000.)
        self.assertAlmostEqual(p.lam.real, -2., delta=1e-3)

    def testBadArguments(self):
        """Index, gain and tolerance are checked"""
        with self.assertRaises(ValueError):
            spectrum.find_eigenvalue(-1, 1.)
        with self.assertRaises(ValueError):
            spectrum.find_eigenvalue(0, 0.)
        with self.assertRaises(ValueError):
            spectrum.find_eigenvalue(10, -1.)
        with self.assertRaises(ValueError):
            spectrum.find_eigenvalue(10, 1., tol=0.)

    def testCanonical(self):
        """All four arguments of an eigenvalue pair map onto the same canonical root"""
        tau = 3. + 0.5j
        for t in (tau, -tau, 1j * np.conj(tau), -1j * np.conj(tau)):
            self.assertAlmostEqual(abs(spectrum.canonical_tau(t) - tau), 0., places=14)


class LowModeTests(unittest.TestCase):
    """Tests of the rectangle sweep for n < NMIN"""

    longMessage = False

    def testZeroCount(self):
        """Box count: NMIN-1 oscillatory zeros, plus the overdamped one when it lies inside"""
        for k, count in ((0., 2), (0.25, 2), (0.5, 3), (1., 3)):
            self.assertEqual(spectrum.count_zeros(k), count, msg='k={}'.format(k))

    def testCellNumbering(self):
        """k=1: the sweep numbers roots by cell, so n=1 is the first oscillatory mode"""
        p = spectrum.find_eigenvalue(1, 1.)
        self.assertEqual(p.n, 1)
        self.assertGreater(p.lam.imag, 0.)
        self.assertTrue(np.pi <= p.tau.real < 2. * np.pi)
        self.assertEqual(spectrum.find_eigenvalue(2, 1.).n, 2)
        self.assertTrue(2. * np.pi <= spectrum.find_eigenvalue(2, 1.).tau.real < 3. * np.pi)

    def testCountWarningRepeats(self):
        """A count disagreement is warned on every call, cached or not"""
        spectrum._low_modes.cache_clear()
        try:
            with mock.patch.object(spectrum, 'count_zeros', return_value=5):
                for _ in range(2):
                    with self.assertWarns(RuntimeWarning):
                        spectrum.low_modes(2.)
                self.assertEqual(spectrum._low_modes.cache_info().hits, 1)
        finally:
            spectrum._low_modes.cache_clear()

    def testAuxiliaryFirstRoot(self):
        """k=0, n=1: omega_1 = 3.9266, lambda = i 15.418"""
        p = spectrum.find_eigenvalue(1, 0.)
        self.assertAlmostEqual(p.tau.real, OMEGA1, places=9)
        self.assertAlmostEqual(p.lam.imag, OMEGA1 ** 2, places=8)
        self.assertAlmostEqual(p.lam.real, 0., places=10)

    def testLowModes(self):
        """k=1: two low modes, sorted, canonical, converged and damped"""
        points = spectrum.low_modes(1.)
        self.assertEqual(len(points), 2)
        self.assertEqual([p.n for p in points], [1, 2])
        self.assertLess(points[0].lam.imag, points[1].lam.imag)
        for p in points:
            self.assertLess(p.residual, spectrum.TOLERANCE)
            self.assertEqual(spectrum.canonical_tau(p.tau), p.tau)
            self.assertLess(p.lam.real, 0.)
        self.assertAlmostEqual(points[0].lam.real, -1.97, delta=0.03)
        self.assertAlmostEqual(points[0].lam.imag, 21.8, delta=0.3)


class OverdampedTests(unittest.TestCase):
    """Tests of the real eigenvalue on the diagonal tau = a(1+i)"""

    longMessage = False

    def testUnitGain(self):
        """k=1: lambda_0 = -4.16, exactly real, with a small characteristic residual"""
        p = spectrum.find_eigenvalue(0, 1.)
        self.assertEqual(p.n, 0)
        self.assertEqual(p.tau.real, p.tau.imag)
        self.assertEqual(p.lam.imag, 0.)
        self.assertAlmostEqual(p.lam.real, -4.16, delta=0.02)
        self.assertLess(p.residual, spectrum.TOLERANCE)
        self.assertLess(abs(charfun.eval_char_scaled(p.tau, 1.)), 1e-10)
        self.assertEqual(spectrum.overdamped_root(1.), p)

    def testGainLimits(self):
        """lambda_0 ~ -4/k for large gains and -2/k^2 for small ones"""
        for k in (50., 200.):
            lam = spectrum.overdamped_root(k).lam.real
            self.assertAlmostEqual(lam * k / -4., 1., delta=0.01, msg='k={}: {}'.format(k, lam))
        for k in (0.05, 0.1):
            lam = spectrum.overdamped_root(k).lam.real
            self.assertAlmostEqual(lam * k * k / -2., 1., delta=1e-6, msg='k={}: {}'.format(k, lam))

    def testOutsideBox(self):
        """k=0.25: lambda_0 = -32.05 lies outside the low-mode box but is reported"""
        report = spectrum.compute_spectrum(5, 0.25)
        self.assertEqual(report.low_count, 2)
        self.assertEqual(list(report.n), [0, 1, 2, 3, 4, 5])
        self.assertAlmostEqual(report.point(0).lam.real, -32.05, delta=0.1)
        self.assertFalse(spectrum._inside(report.point(0).tau, spectrum.lowmode_box(0.25)))

    def testUndamped(self):
        """k=0 has no overdamped mode"""
        with self.assertRaises(ValueError):
            spectrum.overdamped_root(0.)
        self.assertNotIn(0, spectrum.compute_spectrum(5, 0.).n)


class SpectrumReportTests(unittest.TestCase):
    """Tests of assembled spectra"""

    longMessage = False

    def setUp(self):
        self.report = spectrum.compute_spectrum(50, 1.)

    def testReport(self):
        """n_max=50, k=1: 51 sorted, stable points from n=0; asymptote error shrinks"""
        self.assertEqual(len(self.report), 51)
        self.assertEqual(list(self.report.n), list(range(0, 51)))
        self.assertEqual(len(set(self.report.n)), 51)
        self.assertTrue(np.all(np.diff(self.report.lam.imag) > 0))
        self.assertTrue(np.all(self.report.lam.real < 0))
        self.assertTrue(np.all(self.report.residual < spectrum.TOLERANCE))
        self.assertEqual(self.report.low_count, 3)
        err = {e.n: e.err_re_lambda for e in self.report.asymptote_errors}
        self.assertLess(err[50], err[20])
        self.assertLess(err[20], err[10])
        self.assertEqual(len(self.report.rows()[0]), 8)
        self.assertEqual(self.report.point(7).n, 7)
        with self.assertRaises(KeyError):
            self.report.point(51)

    def testAuxiliarySpectrum(self):
        """k=0: every eigenvalue on the imaginary axis"""
        report = spectrum.compute_spectrum(20, 0.)
        self.assertEqual(len(report), 20)
        self.assertLessEqual(np.max(np.abs(report.lam.real)), 1e-10)
        err = report.asymptote_errors
        self.assertLess(err[-1].err_tau_quarter, 1e-9)

    def testGainTwo(self):
        """k=2: Re lambda tends to -1"""
        report = spectrum.compute_spectrum(50, 2.)
        lam = {p.n: p.lam for p in report}
        self.assertLess(abs(lam[50].real + 1.), abs(lam[10].real + 1.))
        self.assertLess(abs(lam[50].real + 1.), 0.01)

    def testConjugates(self):
        """Conjugate arguments i conj(tau) are roots too"""
        for p in self.report:
            self.assertLessEqual(spectrum.conjugate_residual(p, 1.), 10. * spectrum.TOLERANCE)

    def testAbscissa(self):
        """k=1: the abscissa comes from the first low mode; oracle values take over when given"""
        abscissa, branch = spectrum.abscissa_branch(self.report)
        self.assertEqual(branch, 'low-mode')
        self.assertAlmostEqual(abscissa, self.report.point(1).lam.real, places=12)
        self.assertLess(abscissa, 0.)
        self.assertGreater(abscissa, -2.)
        self.assertEqual(spectrum.abscissa_branch(self.report, [-0.5 + 10j]), (-0.5, 'oracle'))
        self.assertEqual(spectrum.abscissa_branch(self.report, [-5. + 10j])[1], 'tail')
        with self.assertRaises(EmptyReport):
            spectrum.spectral_abscissa(spectrum.SpectrumReport(1., []))

    def testParallel(self):
        """Fan-out over processes gives the same report"""
        serial = spectrum.compute_spectrum(12, 1.)
        parallel = spectrum.compute_spectrum(12, 1., processes=2)
        self.assertTrue(np.all(serial.tau == parallel.tau))

    def testYAML(self):
        """Report survives a YAML dump and load"""
        report = spectrum.compute_spectrum(5, 1.)
        copy = yaml.load(yaml.dump(report), Loader=yaml.FullLoader)
        self.assertIsInstance(copy, spectrum.SpectrumReport)
        self.assertEqual(copy.k, report.k)
        self.assertEqual(copy.low_count, report.low_count)
        self.assertTrue(np.all(copy.tau == report.tau))
        self.assertTrue(np.all(copy.n == report.n))
