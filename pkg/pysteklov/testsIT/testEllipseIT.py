from pysteklov.tests import envtest
import os

import numpy as np

from pysteklov import *


class TestEllipseIT(envtest.PySteklovTestCase):

    @classmethod
    def setUpClass(cls):
        super(TestEllipseIT, cls).setUpClass()
        cls.domain = Domain.ellipse(1.2, 1.0)
        cls.spectrum = LayerOperators.assemble(cls.domain, N=256).solve(80)

    def testTotalTurning(self):
        self.assertAlmostEqual(self.domain.components[0].totalTurning(256), 2 * np.pi, delta=1e-8)

    def testFirstOrderDecayIsSharp(self):
        index = int(np.argmin(np.abs(self.spectrum.sigmas - 30)))
        mode = self.spectrum.rotatingMode(index)
        field = ExtensionField(mode, upsampling=16, threads=0)
        feet = (0.0, np.pi / 4, np.pi / 2)
        distances = np.linspace(0.02, 0.2, 19)
        profiles = [sampleNormalRay(field, foot, distances).fit(degree=TAYLOR_DEGREE) for foot in feet]

        report = verifyTheorem1(self.domain, mode, profiles)

        self.assertTrue(report.passed, report.summary())

    def testComputedModesConcentrateOnCharacteristicSet(self):
        weight = WeightSpec.thm2(0.05)
        norms = []
        for sigma in (10, 20, 30):
            index = int(np.argmin(np.abs(self.spectrum.sigmas - sigma)))
            table = fbiOfComputedMode(self.spectrum.rotatingMode(index))
            self.assertGreater(table.massFraction(0.5, 1.5), 0.9)
            self.assertLess(table.zeroSectionFraction(0.25), 1e-3)
            norms.append(table.weightedNorm(weight, "L2"))
        self.assertLess(max(norms) / min(norms), 2)

    def testMaximumPrinciple(self):
        points = self.domain.interiorGrid(0.1, minimumDistance=0.05)
        for index in (10, 40, 79):
            self.assertTrue(maxPrincipleCheck(ExtensionField(self.spectrum[index]), points).passed)

    def testVerifyWithShippedConfiguration(self):
        path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs", "ellipse.cfg")
        experiment = Experiment(ExperimentConfig.fromFile(path), os.path.join(self.tempDir, "ellipse"), threads=0)
        self.assertTrue(experiment.run("verify"))


if __name__ == '__main__':
    envtest.main()
