from pysteklov.tests import envtest
import os

import numpy as np

from pysteklov import *


class TestCircleFbiIT(envtest.PySteklovTestCase):

    @classmethod
    def setUpClass(cls):
        super(TestCircleFbiIT, cls).setUpClass()
        y = 2 * np.pi * np.arange(256) / 256
        cls.hs = np.array([1 / 10, 1 / 20, 1 / 40])
        cls.tables = [fbiHolCircle(np.exp(1j * round(1 / h) * y), h) for h in cls.hs]

    def testClosedFormAtTwenty(self):
        table = self.tables[1]
        h = table.h
        X, XI = np.meshgrid(table.alphaX, table.alphaXi)
        expected = h ** -0.25 * np.exp(1j * X / h) * np.exp(-(XI - 1) ** 2 / (2 * h))
        self.assertLessEqual(float(np.max(np.abs(table.values - expected))), 1e-10)

    def testSharpWeightGrowsLikeQuarterPower(self):
        weight = WeightSpec.thm3Sharp()
        logNorms = np.array([table.logWeightedNorm(weight, "Linf") for table in self.tables])
        for h, logNorm in zip(self.hs, logNorms):
            self.assertAlmostEqual(np.exp(logNorm) / h ** -0.25, 1.0, delta=0.01)
        slope = np.polyfit(np.log(self.hs), logNorms, 1)[0]
        self.assertAlmostEqual(slope, -0.25, delta=0.02)

    def testSubcriticalWeightKeepsNormBounded(self):
        weight = WeightSpec.thm3Gamma(0.45)
        norms = [table.weightedNorm(weight, "L2") for table in self.tables]
        self.assertLess(max(norms) / min(norms), 1.5)

    def testZeroSectionMassDecaysExponentially(self):
        masses = np.array([table.zeroSectionMass(0.25) for table in self.tables])
        slope = np.polyfit(1 / self.hs, np.log(masses), 1)[0]
        self.assertLess(slope, 0)
        self.assertLess(self.tables[2].zeroSectionFraction(0.25), 1e-6)

    def testGeodesicTransformAgreesUpToConstant(self):
        y = 2 * np.pi * np.arange(256) / 256
        geo = fbiGeoCircle(np.exp(20j * y), 1 / 20)
        self.assertArrayAlmostEqual(np.abs(geo.values), np.pi ** -0.25 * np.abs(self.tables[1].values), 1e-10)

    def testVerifyWithShippedConfiguration(self):
        path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs",
                            "circle-fbi.cfg")
        experiment = Experiment(ExperimentConfig.fromFile(path), os.path.join(self.tempDir, "circle-fbi"))
        self.assertTrue(experiment.run("verify"))


if __name__ == '__main__':
    envtest.main()
