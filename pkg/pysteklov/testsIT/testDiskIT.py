from pysteklov.tests import envtest
import os
import time

import numpy as np

from pysteklov import *


class TestDiskIT(envtest.PySteklovTestCase):

    @classmethod
    def setUpClass(cls):
        super(TestDiskIT, cls).setUpClass()
        startTime = time.time()
        cls.domain = Domain.disk(1.0)
        cls.operators = LayerOperators.assemble(cls.domain, N=256)
        cls.spectrum = cls.operators.solve(81)
        cls.solveTime = time.time() - startTime

    def testLowestEigenvaluesAreIntegers(self):
        expected = [0] + [k for k in range(1, 11) for _ in range(2)]
        self.assertArrayAlmostEqual(self.spectrum.sigmas[:21], expected, 1e-8)

    def testSolveIsFast(self):
        self.assertLess(self.solveTime, 10)

    def testExtensionMatchesDiskMode(self):
        mode = self.spectrum.rotatingMode(9)
        field = ExtensionField(mode)
        rng = np.random.default_rng(0)
        r = np.sqrt(rng.uniform(0, 0.95 ** 2, 100))
        theta = rng.uniform(0, 2 * np.pi, 100)
        points = np.column_stack([r * np.cos(theta), r * np.sin(theta)])

        values = field.evaluate(points)

        expected = diskMode(1.0, 5, r, theta)
        relative = maxErrorUpToPhase(values, expected) / np.max(np.abs(expected))
        self.assertLess(relative, 1e-7)

    def testDecayOfModeFortyFollowsExactLaw(self):
        mode = self.spectrum.rotatingMode(79)
        self.assertAlmostEqual(mode.sigma, 40, places=6)
        field = ExtensionField(mode, threads=0)

        profile = sampleNormalRay(field, 0.0, np.linspace(0.02, 0.2, 19)).fit(degree=TAYLOR_DEGREE)

        self.assertAlmostEqual(profile.a1, 1.0, delta=0.01)
        self.assertAlmostEqual(profile.a2, 0.5, delta=0.025)
        self.assertTrue(verifyTheorem1(self.domain, mode, [profile]).passed)

    def testQuadraticMarginAndOffsetOverHSweep(self):
        margins, offsets = [], []
        for k in (10, 20, 40):
            field = ExtensionField(self.spectrum.rotatingMode(2 * k - 1), threads=0)
            profile = sampleNormalRay(field, 0.0, np.linspace(0.02, 0.2, 19)).fit(degree=TAYLOR_DEGREE)
            margins.append(abs(profile.a2 - 0.5 * self.domain.curvatureAt(0.0)))
            offsets.append(profile.a0 / profile.h)

        for coarse, fine in zip(margins, margins[1:]):
            self.assertLessEqual(fine, coarse + 0.02)
        self.assertLess(margins[-1], 0.02)
        # |φ_h| = (2π)^{-1/2} on the unit circle, so a0 = h log √(2π) at every h
        for offset in offsets:
            self.assertAlmostEqual(offset, 0.5 * np.log(2 * np.pi), delta=0.2 * 0.5 * np.log(2 * np.pi))

    def testMaximumPrincipleOnComputedModes(self):
        points = self.domain.interiorGrid(0.1, minimumDistance=0.05)
        for index in (5, 20, 41, 80):
            report = maxPrincipleCheck(ExtensionField(self.spectrum[index]), points)
            self.assertLessEqual(report.ratio, 1 + 1e-6)

    def testDtnIsSelfAdjoint(self):
        rng = np.random.default_rng(3)
        t = self.operators.parameters
        f = sum(rng.standard_normal() * np.cos(k * t) / k for k in range(1, 9))
        g = sum(rng.standard_normal() * np.sin(k * t) / k for k in range(1, 9)) + 0.2
        left = self.operators.innerProduct(self.operators.apply(f), g)
        right = self.operators.innerProduct(f, self.operators.apply(g))
        self.assertLess(abs(left - right), 1e-8)

    def testWeightedNormsOfComputedModesStayBounded(self):
        weight = WeightSpec.thm2(0.05)
        norms = []
        for sigma in (10, 20, 40):
            index = int(np.argmin(np.abs(self.spectrum.sigmas - sigma)))
            table = fbiOfComputedMode(self.spectrum.rotatingMode(index))
            norms.append(table.weightedNorm(weight, "L2"))
        self.assertLess(max(norms) / min(norms), 2)

    def testVerifyWithShippedConfiguration(self):
        config = ExperimentConfig.fromFile(os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                                                        "configs", "disk.cfg"))
        experiment = Experiment(config, os.path.join(self.tempDir, "disk"), threads=0)
        self.assertTrue(experiment.run("verify"))


if __name__ == '__main__':
    envtest.main()
