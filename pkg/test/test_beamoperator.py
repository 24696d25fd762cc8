"""
Unit tests for the closed-form inverse, the discrete generator and the eigenvalue oracle
"""

__author__ = 'beamspec developers'

import unittest
import numpy as np
import scipy.sparse as sparse
import beamspec.spectrum as spectrum
import beamspec.modes as modes
import beamspec.beamoperator as beamoperator
from beamspec.errors import NoConvergence, SingularShift, ShapeMismatch

OMEGA1 = 3.926602312047919


class ResolventTests(unittest.TestCase):
    """Tests of the closed-form inverse of the generator"""

    longMessage = False

    def setUp(self):
        self.psilist = ([1.], [0., 1.], [0., 0., 1.], [0., 0., 0., 1.])
        self.philist = ([0.], [0., 0., 1., -1.])
        self.klist = (0.5, 1., 2., 3.)

    def testConstantLoad(self):
        """psi = 1, phi = 0: u = (-3x^2 + 5x^3 - 2x^4)/48 to rounding"""
        state = beamoperator.StatePair.from_polynomials([0.], [1.], 64)
        x = state.grid
        out = beamoperator.apply_resolvent(state, 1.)
        self.assertLessEqual(np.max(np.abs(out.phi - (-3. * x ** 2 + 5. * x ** 3 - 2. * x ** 4) / 48.)), 1e-13)
        self.assertTrue(np.all(out.psi == state.phi))

    def testMomentCondition(self):
        """psi = 0, phi = x^2(1-x), k=1: u'' (1) = -k phi'(1) = 1"""
        state = beamoperator.StatePair.from_polynomials([0., 0., 1., -1.], [0.], 64)
        x = state.grid
        u = beamoperator.resolvent_polynomial(*state.polynomials, 1.)
        self.assertAlmostEqual(u.deriv(2)(1.), 1., places=14)
        out = beamoperator.apply_resolvent(state, 1.)
        self.assertLessEqual(np.max(np.abs(out.phi - (x ** 3 - x ** 2) / 4.)), 1e-12)

    def testPolynomialIdentity(self):
        """A(A^-1 z) = z exactly on polynomial states"""
        for k in self.klist:
            for psi in self.psilist:
                for phi in self.philist:
                    check = beamoperator.verify_resolvent(
                        beamoperator.StatePair.from_polynomials(phi, psi, 64), k)
                    self.assertLessEqual(check.residual, 1e-12, msg='psi={} phi={} k={}: {}'.format(
                        psi, phi, k, check))
                    self.assertLessEqual(check.quadrature_gap, 1e-6)

    def testGain(self):
        """Output curvature stays bounded by the input norm under refinement"""
        gains = [beamoperator.resolvent_gain(
            beamoperator.StatePair.from_functions(lambda x: x ** 2 * (1. - x), np.cos, M), 1.)
            for M in (64, 128, 256)]
        self.assertTrue(all(0 < g < 1. for g in gains), msg='{}'.format(gains))
        self.assertAlmostEqual(gains[1], gains[2], delta=0.01)

    def testErrors(self):
        """Odd or short grids, bad states, non-polynomial checks"""
        with self.assertRaises(ValueError):
            beamoperator.apply_resolvent(beamoperator.StatePair.from_polynomials([0.], [1.], 65), 1.)
        with self.assertRaises(ValueError):
            beamoperator.apply_resolvent(beamoperator.StatePair.from_polynomials([0.], [1.], 16), 1.)
        with self.assertRaises(ValueError):
            beamoperator.StatePair.from_polynomials([1.], [1.], 64)
        with self.assertRaises(ShapeMismatch):
            beamoperator.StatePair(np.linspace(0., 1., 65), np.zeros(65), np.zeros(64))
        with self.assertRaises(ValueError):
            beamoperator.verify_resolvent(
                beamoperator.StatePair.from_functions(np.sin, np.cos, 64), 1.)


class DiscreteGeneratorTests(unittest.TestCase):
    """Tests of the finite-difference generator"""

    longMessage = False

    def testSize(self):
        """The tip curvature is a state only for k > 0"""
        self.assertEqual(beamoperator.build_generator(64, 1.).size, 2 * 63 + 1)
        self.assertEqual(beamoperator.build_generator(64, 0.).size, 2 * 63)
        with self.assertRaises(ValueError):
            beamoperator.build_generator(32, 1.)

    def testDissipation(self):
        """Re<A z, z> = -q^2/k on random states; skew for k = 0"""
        rng = np.random.RandomState(42)
        for k in (0., 0.5, 1.):
            gen = beamoperator.build_generator(200, k)
            for _ in range(20):
                z = rng.standard_normal(gen.size)
                norm = beamoperator.energy_inner(gen, z, z).real
                form = beamoperator.dissipation_form(gen, z)
                self.assertLessEqual(abs(form + gen.boundary_power(z)), 1e-10 * norm,
                                     msg='k={}: {} vs {}'.format(k, form, -gen.boundary_power(z)))

    def testSampleState(self):
        """Sampled states drop the clamped ends; the default tip curvature is -k v'(1)"""
        gen = beamoperator.build_generator(64, 2.)
        x = np.linspace(0., 1., 65)
        z = beamoperator.sample_state(gen, x ** 2 * (1. - x), x ** 2 * (1. - x))
        w, v, q = gen.split(z)
        self.assertEqual(len(w), 63)
        self.assertAlmostEqual(q, 2., places=10)
        self.assertTrue(np.allclose(beamoperator.displacement(gen, z), x ** 2 * (1. - x)))
        with self.assertRaises(ShapeMismatch):
            beamoperator.sample_state(gen, x[:-1], x)
        with self.assertRaises(ShapeMismatch):
            gen.split(np.zeros(5))


class OracleTests(unittest.TestCase):
    """Tests of shifted inverse iteration on the discrete generator"""

    longMessage = False

    def testAuxiliary(self):
        """k=0: i omega_1^2 = i 15.418 on the imaginary axis"""
        gen = beamoperator.build_generator(400, 0.)
        lam = beamoperator.oracle_eigenvalue(gen, 1j * OMEGA1 ** 2 * 1.001)
        self.assertAlmostEqual(lam.imag, OMEGA1 ** 2, delta=0.01 * OMEGA1 ** 2)
        self.assertLessEqual(abs(lam.real), 1e-6)

    def testLowModes(self):
        """k=1: the three lowest eigenvalues within 1%, closer on the finer grid"""
        coarse, fine = beamoperator.build_generator(200, 1.), beamoperator.build_generator(400, 1.)
        for n in (1, 2, 3):
            lam = spectrum.find_eigenvalue(n, 1.).lam
            gap_coarse = abs(beamoperator.oracle_eigenvalue(coarse, lam * 1.001) - lam) / abs(lam)
            gap_fine = abs(beamoperator.oracle_eigenvalue(fine, lam * 1.001) - lam) / abs(lam)
            self.assertLessEqual(gap_fine, 0.01)
            self.assertGreaterEqual(np.log2(gap_coarse / gap_fine), 1.5, msg='n={}: {} {}'.format(
                n, gap_coarse, gap_fine))

    def testEigenvector(self):
        """The oracle eigenvector matches the closed-form mode shape"""
        gen = beamoperator.build_generator(400, 1.)
        point = spectrum.find_eigenvalue(2, 1.)
        lam, vector = beamoperator.oracle_eigenpair(gen, point.lam * 1.001)
        w = beamoperator.displacement(gen, vector)
        phi = modes.build_mode(point, 400).phi
        alpha = np.vdot(w, phi) / np.vdot(w, w)
        self.assertLessEqual(np.max(np.abs(alpha * w - phi)), 0.02 * np.max(np.abs(phi)))
        w, v, q = gen.split(vector)
        self.assertLessEqual(np.max(np.abs(v - lam * w)), 1e-8 * np.max(np.abs(v)))

    def testFarShift(self):
        """A shift far from the spectrum never comes back as the answer"""
        gen = beamoperator.build_generator(400, 1.)
        shift = 1e8j
        try:
            lam = beamoperator.oracle_eigenvalue(gen, shift)
        except NoConvergence:
            return
        self.assertGreater(abs(lam - shift), 1e6)

    def testSingular(self):
        """A failed factorization is reported"""
        gen = beamoperator.build_generator(64, 1.)
        gen.matrix = sparse.csr_matrix(gen.matrix.shape)
        with self.assertRaises(SingularShift):
            beamoperator.oracle_eigenvalue(gen, 0.)
