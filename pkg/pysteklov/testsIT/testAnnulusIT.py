from pysteklov.tests import envtest
import os

import numpy as np

from pysteklov import *


class TestAnnulusIT(envtest.PySteklovTestCase):

    @classmethod
    def setUpClass(cls):
        super(TestAnnulusIT, cls).setUpClass()
        cls.configPath = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs",
                                      "annulus.cfg")
        cls.experiment = Experiment(ExperimentConfig.fromFile(cls.configPath), os.path.join(cls.tempDir, "annulus"))
        cls.spectrum = cls.experiment.spectrum

    def testEigenvaluesAreRootsOfQuadratic(self):
        sigmas = self.spectrum.sigmas
        for k in range(1, 9):
            for root in annulusSpectrum(0.5, k):
                self.assertLess(float(np.min(np.abs(sigmas - root))), 1e-6)

    def testInnerModeDecaysLikeLogarithm(self):
        mode = self.experiment._selectMode(40, component=1)
        self.assertGreater(mode.componentMass(1), 0.99)
        field = ExtensionField(mode, threads=0)

        profile = sampleNormalRay(field, 0.0, np.linspace(0.02, 0.2, 19), component=1).fit(degree=TAYLOR_DEGREE)

        self.assertAlmostEqual(profile.a1, 1.0, delta=0.01)
        self.assertAlmostEqual(profile.a2, -1.0, delta=0.05)
        self.assertTrue(verifyTheorem1(mode.domain, mode, [profile]).passed)

    def testOuterModeDecaysLikeDisk(self):
        mode = self.experiment._selectMode(20, component=0)
        self.assertGreater(mode.componentMass(0), 0.99)
        field = ExtensionField(mode, threads=0)

        profile = sampleNormalRay(field, 0.0, np.linspace(0.02, 0.2, 19), component=0).fit(degree=TAYLOR_DEGREE)

        self.assertAlmostEqual(profile.a1, 1.0, delta=0.01)

    def testVerifyWithShippedConfiguration(self):
        self.assertTrue(self.experiment.run("verify"))


if __name__ == '__main__':
    envtest.main()
