from pysteklov.tests import envtest
import os

import numpy as np

from pysteklov import *


class TestCylinderIT(envtest.PySteklovTestCase):

    def testBothParitiesDecayLinearly(self):
        for parity in ("even", "odd"):
            mode = CylinderMode(40, parity)
            profile = sampleNormalRay(mode, 0.0, np.linspace(0.02, 0.2, 19)).fit(degree=TAYLOR_DEGREE)
            self.assertAlmostEqual(profile.a1, 1.0, delta=0.01)
            self.assertAlmostEqual(profile.a2, 0.0, delta=0.05)
            self.assertTrue(verifyTheorem1(CylinderDomain(), mode, [profile]).passed)

    def testBottomCircleDecaysLikeTopCircle(self):
        mode = CylinderMode(40)
        top = sampleNormalRay(mode, 0.5, np.linspace(0.02, 0.2, 19), component=0).fit(degree=TAYLOR_DEGREE)
        bottom = sampleNormalRay(mode, 0.5, np.linspace(0.02, 0.2, 19), component=1).fit(degree=TAYLOR_DEGREE)
        self.assertArrayAlmostEqual(top.coefficients, bottom.coefficients, 1e-10)

    def testVerifyWithShippedConfiguration(self):
        path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs", "cylinder.cfg")
        experiment = Experiment(ExperimentConfig.fromFile(path), os.path.join(self.tempDir, "cylinder"))
        self.assertTrue(experiment.run("verify"))


if __name__ == '__main__':
    envtest.main()
