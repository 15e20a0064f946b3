import envtest  # modifies path
import math

import numpy as np

from pysteklov.fbi import *
from pysteklov.geometry import Domain
from pysteklov.dtn import LayerOperators
from pysteklov.errors import FbiError, WeightError


def circleMode(k, n=256):
    y = 2 * np.pi * np.arange(n) / n
    return np.exp(1j * k * y)


class TestPhaseSpaceGrid(envtest.PySteklovTestCase):

    def testDefaultGrid(self):
        grid = PhaseSpaceGrid()
        self.assertEqual(len(grid.alphaX), 256)
        self.assertEqual(len(grid.alphaXi), 601)
        self.assertAlmostEqual(grid.alphaXi[400], 1.0, places=14)

    def testWithPeriodKeepsResolution(self):
        grid = PhaseSpaceGrid(nx=64).withPeriod(3.0)
        self.assertEqual(grid.nx, 64)
        self.assertAlmostEqual(grid.alphaX[-1] + 3.0 / 64, 3.0, places=14)


class TestHolomorphicTransform(envtest.PySteklovTestCase):

    def testCircleModeMatchesClosedForm(self):
        h = 1 / 20
        table = fbiHolCircle(circleMode(20), h)
        X, XI = np.meshgrid(table.alphaX, table.alphaXi)
        expected = h ** -0.25 * np.exp(1j * X / h - (XI - 1) ** 2 / (2 * h))
        self.assertArrayAlmostEqual(table.values, expected, 1e-10)

    def testConstantFunction(self):
        h = 0.1
        table = fbiHolCircle(np.ones(64), h)
        self.assertArrayAlmostEqual(np.abs(table.values[:, 0]), h ** -0.25 * np.exp(-table.alphaXi ** 2 / (2 * h)),
                                    1e-12)

    def testGivenTooFewSamplesForH_shouldRaise(self):
        with self.assertRaises(FbiError):
            fbiHolCircle(circleMode(2, n=8), 0.001)

    def testGivenNonPositiveH_shouldRaise(self):
        with self.assertRaises(FbiError):
            fbiHolCircle(circleMode(2), 0.0)

    def testGivenTwoDimensionalInput_shouldRaise(self):
        with self.assertRaises(FbiError):
            fbiHolCircle(np.ones((4, 4)), 0.1)

    def testNormRatioDoesNotDependOnH(self):
        ratios = [fbiHolCircle(circleMode(k), 1 / k).l2Norm() / math.sqrt(2 * math.pi) for k in (10, 20, 40)]
        self.assertLess(max(ratios) / min(ratios) - 1, 0.02)


class TestGeodesicTransform(envtest.PySteklovTestCase):

    def testCircleModeModulus(self):
        h = 1 / 20
        table = fbiGeoCircle(circleMode(20), h)
        expected = (np.pi * h) ** -0.25 * np.exp(-(table.alphaXi - 1) ** 2 / (2 * h))
        self.assertArrayAlmostEqual(np.abs(table.values), expected[:, None], 1e-10)

    def testConstantFunctionAtZeroFrequency(self):
        h = 0.05
        table = fbiGeoCircle(np.ones(64), h)
        row = int(np.argmin(np.abs(table.alphaXi)))
        self.assertArrayAlmostEqual(np.abs(table.values[row]), (np.pi * h) ** -0.25, 1e-10)

    def testGeodesicAndHolomorphicDifferByConstantFactor(self):
        h = 1 / 10
        geo = fbiGeoCircle(circleMode(10), h)
        hol = fbiHolCircle(circleMode(10), h)
        self.assertArrayAlmostEqual(np.abs(geo.values), np.pi ** -0.25 * np.abs(hol.values), 1e-10)

    def testGivenHTooLargeForPeriod_shouldRaise(self):
        with self.assertRaises(FbiError):
            fbiGeoCircle(np.ones(64), 0.5, period=1.0)


class TestPhaseSpaceTable(envtest.PySteklovTestCase):

    @classmethod
    def setUpClass(cls):
        super(TestPhaseSpaceTable, cls).setUpClass()
        cls.tables = {k: fbiHolCircle(circleMode(k), 1 / k) for k in (10, 20, 40)}

    def testSharpWeightGainsQuarterPower(self):
        weight = WeightSpec.thm3Sharp()
        for k, table in self.tables.items():
            self.assertAlmostEqual(table.weightedNorm(weight, "Linf") / k ** 0.25, 1.0, delta=1e-8)

    def testGammaWeightKeepsL2NormBounded(self):
        weight = WeightSpec.thm3Gamma(0.45)
        norms = [table.weightedNorm(weight, "L2") for table in self.tables.values()]
        self.assertLess(max(norms) / min(norms), 1.5)

    def testLogNormDoesNotOverflowForLargeWeights(self):
        weight = WeightSpec.thm2(5.0, order=0)
        self.assertTrue(math.isfinite(self.tables[40].logWeightedNorm(weight, "Linf")))

    def testGivenUnknownNorm_shouldRaise(self):
        with self.assertRaises(FbiError):
            self.tables[10].logWeightedNorm(WeightSpec.zero(), "L1")

    def testZeroSectionMassDecreasesWithH(self):
        masses = [self.tables[k].zeroSectionMass(0.25) for k in (10, 20, 40)]
        self.assertGreater(masses[0], masses[1])
        self.assertGreater(masses[1], masses[2])
        self.assertLess(self.tables[40].zeroSectionFraction(0.25), 1e-6)

    def testConstantConcentratesOnZeroSection(self):
        table = fbiHolCircle(np.ones(256), 0.01)
        self.assertGreater(table.zeroSectionFraction(0.25), 0.999)

    def testGivenCutoffAboveOne_shouldRaise(self):
        with self.assertRaises(FbiError):
            self.tables[10].zeroSectionMass(1.0)

    def testCircleModeMassIsInCharacteristicBand(self):
        self.assertGreater(self.tables[40].massFraction(0.5, 1.5), 0.999)

    def testRowsLayout(self):
        rows = self.tables[10].rows()
        self.assertEqual(rows.shape, (601 * 256, 5))
        self.assertAlmostEqual(rows[0, 1], -3.0)


class TestWeightSpec(envtest.PySteklovTestCase):

    def testSharpWeightVanishesOnCharacteristicSet(self):
        self.assertEqual(float(WeightSpec.thm3Sharp().evaluate(1.0)), 0.0)
        self.assertAlmostEqual(float(WeightSpec.thm3Sharp().evaluate(0.5)), 0.125)

    def testRestrictionMask(self):
        mask = WeightSpec.thm3Sharp(0.75).restrictionMask(np.array([0.0, 0.3, 1.0, 2.0]))
        self.assertEqual(list(mask), [False, True, True, False])

    def testThm2WeightIsUnrestricted(self):
        self.assertTrue(np.all(WeightSpec.thm2(0.05).restrictionMask(np.linspace(-3, 3, 7))))

    def testGivenGammaAboveHalf_shouldRaise(self):
        with self.assertRaises(WeightError):
            WeightSpec.thm3Gamma(0.6)

    def testGivenNonPositiveDelta_shouldRaise(self):
        with self.assertRaises(WeightError):
            WeightSpec.thm2(0.0)

    def testGivenUnknownFamily_shouldRaise(self):
        with self.assertRaises(WeightError):
            WeightSpec("thm4")


class TestComputedMode(envtest.PySteklovTestCase):

    def testDiskModeConcentratesOnUnitCosphere(self):
        spectrum = LayerOperators.assemble(Domain.disk(), N=64).solve(21)
        table = fbiOfComputedMode(spectrum.rotatingMode(19), PhaseSpaceGrid(nx=64))
        self.assertAlmostEqual(table.h, 0.1, places=9)
        self.assertGreater(table.massFraction(0.5, 1.5), 0.99)

    def testGivenUnknownTransform_shouldRaise(self):
        spectrum = LayerOperators.assemble(Domain.disk(), N=64).solve(5)
        with self.assertRaises(FbiError):
            fbiOfComputedMode(spectrum.rotatingMode(3), transform="wavelet")


if __name__ == '__main__':
    envtest.main()
