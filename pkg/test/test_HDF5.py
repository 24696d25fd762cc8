"""
Unit tests for HDF5 parsing; runs tests in multiple libraries
"""

__author__ = 'beamspec developers'

import unittest
import numpy as np
import h5py
import beamspec.spectrum as spectrum
import beamspec.simulator as simulator


class HDF5ParsingTests(unittest.TestCase):
    def setUp(self):
        self.f = h5py.File('/dev/null', 'w', driver='core', backing_store=False)

    def tearDown(self):
        self.f.close()

    def testSpectrumReport(self):
        """Test whether we can write and read an HDF5 group containing a SpectrumReport"""
        report = spectrum.compute_spectrum(8, 1.)
        report.addhdf5(self.f.create_group('SpectrumReport'))
        copy = spectrum.SpectrumReport.loadhdf5(self.f['SpectrumReport'])
        self.assertEqual(copy.k, report.k)
        self.assertEqual(copy.tolerance, report.tolerance)
        self.assertEqual(copy.low_count, report.low_count)
        for internal in spectrum.SpectrumReport.__HDF5list__:
            self.assertTrue(np.all(getattr(copy, internal) == getattr(report, internal)),
                            msg='Mismatch in {}'.format(internal))
        empty = spectrum.SpectrumReport(0.5, [])
        empty.addhdf5(self.f.create_group('empty'))
        copy = spectrum.SpectrumReport.loadhdf5(self.f['empty'])
        self.assertEqual(len(copy), 0)
        self.assertIsNone(copy.low_count)

    def testEnergyTrace(self):
        """Test whether we can write and read an HDF5 group containing an EnergyTrace and its fit"""
        config = simulator.SimConfig(M=64, dt=1e-3, t_final=0.2, k=0.5)
        trace = simulator.simulate(config)
        decay = simulator.fit_decay(trace)
        trace.addhdf5(self.f.create_group('EnergyTrace'))
        decay.addhdf5(self.f.create_group('DecayEstimate'))
        tracecopy = simulator.EnergyTrace.loadhdf5(self.f['EnergyTrace'])
        decaycopy = simulator.DecayEstimate.loadhdf5(self.f['DecayEstimate'])
        self.assertEqual(tracecopy.config, config)
        self.assertEqual(tracecopy.startup_time, trace.startup_time)
        self.assertAlmostEqual(trace.startup_time, simulator.STARTUP_STEPS * config.dt, places=15)
        for internal in simulator.EnergyTrace.__HDF5list__:
            self.assertTrue(np.all(getattr(tracecopy, internal) == getattr(trace, internal)),
                            msg='Mismatch in {}'.format(internal))
        self.assertEqual(decaycopy, decay)
