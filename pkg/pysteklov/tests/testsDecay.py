import envtest  # modifies path
import math

import numpy as np

from pysteklov.decay import *
from pysteklov.geometry import Domain
from pysteklov.dtn import LayerOperators
from pysteklov.extension import ExtensionField
from pysteklov.reference import CylinderMode, CylinderDomain, exactDecayLaw
from pysteklov.errors import DecayError, DecayFitError, TheoremViolation


def syntheticProfile(function, distances=None, foot=0.0, component=0, h=0.025):
    distances = np.linspace(0.02, 0.2, 19) if distances is None else distances
    return DecayProfile(foot, component, h, distances, function(distances))


class TestFitDecay(envtest.PySteklovTestCase):

    def testFitRecoversTaylorCoefficientsOfDiskLaw(self):
        profile = syntheticProfile(lambda t: 0.01 - np.log1p(-t)).fit(degree=TAYLOR_DEGREE)
        self.assertAlmostEqual(profile.a0, 0.01, delta=1e-5)
        self.assertAlmostEqual(profile.a1, 1.0, delta=1e-4)
        self.assertAlmostEqual(profile.a2, 0.5, delta=2e-3)

    def testDefaultFitIsQuadratic(self):
        profile = syntheticProfile(lambda t: 0.3 + t + 0.5 * t ** 2).fit()
        self.assertEqual(profile.degree, 2)
        self.assertEqual(len(profile.coefficients), 3)
        self.assertAlmostEqual(profile.a0, 0.3, delta=1e-12)
        self.assertAlmostEqual(profile.a1, 1.0, delta=1e-12)
        self.assertAlmostEqual(profile.a2, 0.5, delta=1e-12)

    def testQuadraticFitOfQuadraticIsExact(self):
        profile = syntheticProfile(lambda t: 0.2 + t - 0.75 * t ** 2).fit(degree=2)
        self.assertEqual(len(profile.coefficients), 3)
        self.assertAlmostEqual(profile.a2, -0.75, delta=1e-12)
        self.assertLess(profile.residual, 1e-12)

    def testFitOnlyUsesSamplesInRange(self):
        distances = np.linspace(0.0, 0.5, 51)
        profile = syntheticProfile(lambda t: np.where(t <= 0.2 + 1e-12, t, 10.0), distances).fit((0.02, 0.2))
        self.assertAlmostEqual(profile.a1, 1.0, places=8)

    def testGivenNoisyProfile_shouldRefuseFit(self):
        rng = np.random.default_rng(0)
        profile = syntheticProfile(lambda t: t + 0.01 * rng.standard_normal(len(t))).fit()
        self.assertTrue(profile.wasRefused)
        self.assertFalse(profile.isFitted)
        self.assertIsNone(profile.a2)

    def testGivenTooFewSamples_shouldRaise(self):
        with self.assertRaises(DecayFitError):
            syntheticProfile(lambda t: t, np.linspace(0.02, 0.2, 5)).fit()

    def testFitDoesNotModifyOriginalProfile(self):
        profile = syntheticProfile(lambda t: t)
        profile.fit()
        self.assertFalse(profile.isFitted)


class TestSampleNormalRay(envtest.PySteklovTestCase):

    def testCylinderProfileIsLinear(self):
        mode = CylinderMode(40)
        profile = sampleNormalRay(mode, 0.0, np.linspace(0.02, 0.2, 19))
        expected = profile.distances - mode.h * math.log(mode.normalization)
        self.assertArrayAlmostEqual(profile.values, expected, 1e-6)

    def testWindowDoesNotChangeModeOfConstantModulus(self):
        mode = CylinderMode(20)
        distances = np.linspace(0.02, 0.2, 10)
        windowed = sampleNormalRay(mode, 0.3, distances, angularWindow=True)
        pointwise = sampleNormalRay(mode, 0.3, distances, angularWindow=False)
        self.assertArrayAlmostEqual(windowed.values, pointwise.values, 1e-10)

    def testUnderflowingSamplesAreDropped(self):
        mode = CylinderMode(800)
        profile = sampleNormalRay(mode, 0.0, [0.1, 0.5, 0.9], angularWindow=False)
        self.assertEqual(profile.dropped, [0.9])
        self.assertEqual(len(profile.distances), 2)

    def testGivenZeroMode_shouldRaise(self):
        with self.assertRaises(DecayError):
            sampleNormalRay(CylinderMode(0), 0.0, [0.1])

    def testGivenComputedConstantMode_shouldRaise(self):
        spectrum = LayerOperators.assemble(Domain.disk(), N=64).solve(3)
        with self.assertRaises(DecayError):
            sampleNormalRay(ExtensionField(spectrum[0]), 0.0, [0.1])


class TestPredictedConstants(envtest.PySteklovTestCase):

    def testDiskConstant(self):
        constants = predictedConstants(Domain.disk())
        self.assertAlmostEqual(constants.globalConstant, -1.0, places=10)
        self.assertAlmostEqual(constants.sharpQuadratic, 0.5, places=10)

    def testAnnulusConstantComesFromInnerCircle(self):
        constants = predictedConstants(Domain.annulus(0.5))
        self.assertAlmostEqual(constants.globalConstant, -2.5, places=10)
        self.assertEqual(constants.infimumComponent, 1)
        self.assertAlmostEqual(constants.footConstant(0.0, component=0), -1.0, places=10)

    def testCylinderConstant(self):
        self.assertEqual(predictedConstants(CylinderDomain()).globalConstant, -1.5)

    def testEllipsePointwiseConstantIsLargestAtMajorAxis(self):
        constants = predictedConstants(Domain.ellipse(1.2, 1.0))
        self.assertGreater(constants.footConstant(0.0), constants.footConstant(math.pi / 2))
        self.assertAlmostEqual(constants.footConstant(math.pi / 2), constants.globalConstant, places=8)


class TestVerifyDecayBound(envtest.PySteklovTestCase):

    def testGivenExactDiskLaw_shouldPass(self):
        profile = syntheticProfile(lambda t: -np.log1p(-t)).fit(degree=TAYLOR_DEGREE)
        report = verifyTheorem1(Domain.disk(), None, [profile])
        self.assertTrue(report.passed)
        self.assertEqual(len(report.checks), 3)
        self.assertEqual(len(report.checksFor(profile)), 3)
        self.assertDoesNotRaise(report.raiseIfFailed)

    def testGivenWrongLinearCoefficient_shouldFail(self):
        profile = syntheticProfile(lambda t: 1.1 * t).fit()
        report = verifyTheorem1(Domain.disk(), None, [profile])
        self.assertFalse(report.passed)
        self.assertEqual([c.name.split(" ")[0] for c in report.failedChecks], ["a1"])

    def testGivenQuadraticBelowBound_shouldRaiseTheoremViolation(self):
        profile = syntheticProfile(lambda t: t - 1.2 * t ** 2).fit()
        report = verifyTheorem1(Domain.disk(), None, [profile])
        with self.assertRaises(TheoremViolation):
            report.raiseIfFailed()

    def testGivenRefusedFit_shouldFail(self):
        rng = np.random.default_rng(1)
        profile = syntheticProfile(lambda t: t + 0.01 * rng.standard_normal(len(t))).fit()
        report = verifyTheorem1(Domain.disk(), None, [profile])
        self.assertFalse(report.passed)

    def testSummaryHasGlobalConstant(self):
        profile = syntheticProfile(lambda t: t).fit()
        summary = verifyTheorem1(CylinderDomain(), CylinderMode(40), [profile]).summary()
        self.assertEqual(summary["C"], -1.5)
        self.assertAlmostEqual(summary["h"], CylinderMode(40).h)
        self.assertTrue(summary["passed"])

    def testQuadraticLawCheck(self):
        profile = syntheticProfile(lambda t: 0.5 * np.log1p(t / 0.5)).fit(degree=TAYLOR_DEGREE)
        check = quadraticLawCheck(profile, exactDecayLaw("annulus_inner", r0=0.5))
        self.assertTrue(check.passed)
        self.assertAlmostEqual(check.measured, -1.0, delta=0.05)

    def testQuadraticLawCheckOnCylinderUsesAbsoluteTolerance(self):
        profile = syntheticProfile(lambda t: t + 0.03 * t ** 2).fit()
        self.assertTrue(quadraticLawCheck(profile, exactDecayLaw("cylinder")).passed)


if __name__ == '__main__':
    envtest.main()
