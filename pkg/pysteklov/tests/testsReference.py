import envtest  # modifies path
import math

import numpy as np

from pysteklov.reference import *
from pysteklov.geometry import Domain
from pysteklov.errors import ReferenceDomainError


class TestDisk(envtest.PySteklovTestCase):

    def testDiskSpectrumIsFrequencyOverRadius(self):
        self.assertEqual(diskSpectrum(2.0, 6), 3.0)

    def testGivenNegativeFrequency_shouldRaise(self):
        with self.assertRaises(ReferenceDomainError):
            diskSpectrum(1.0, -1)

    def testDiskEntriesCoverRequestedCount(self):
        entries = diskSpectrumEntries(1.0, 21)
        self.assertEqual(sum(e.multiplicity for e in entries), 21)
        self.assertEqual(entries[0].multiplicity, 1)
        self.assertEqual(entries[-1].index, 10)

    def testDiskModeHasUnitBoundaryNorm(self):
        theta = 2 * np.pi * np.arange(64) / 64
        values = diskMode(1.0, 5, 1.0, theta)
        self.assertAlmostEqual(float(np.sum(np.abs(values) ** 2) * 2 * np.pi / 64), 1.0, places=12)

    def testFivePointLaplacianOfDiskModeIsFourthOrderTruncation(self):
        # for z^6 the stencil error is exactly (s²/12)(∂x⁴ + ∂y⁴) z^6 = 60 s² z²
        s = 0.01
        points = np.array([[0.0, 0.0], [0.3, 0.1], [-0.2, 0.35], [0.1, -0.5]])
        laplacian = envtest.fivePointLaplacian(lambda x, y: diskMode(1.0, 6, np.hypot(x, y), np.arctan2(y, x)),
                                               points, s)
        z = points[:, 0] + 1j * points[:, 1]
        self.assertArrayAlmostEqual(laplacian, 60 * s ** 2 * z ** 2 / math.sqrt(2 * math.pi), 1e-10)


class TestAnnulus(envtest.PySteklovTestCase):

    def testRootsSatisfyQuadratic(self):
        for k in (1, 5, 40):
            for sigma in annulusSpectrum(0.5, k):
                self.assertAlmostEqual(annulusPolynomial(0.5, k, sigma) / (k * k), 0.0, places=10)

    def testRootsAreAscending(self):
        low, high = annulusSpectrum(0.5, 3)
        self.assertLess(low, high)

    def testLargeFrequencyBranchesApproachKAndKOverR0(self):
        low, high = annulusSpectrum(0.5, 40)
        self.assertAlmostEqual(low, 40, places=6)
        self.assertAlmostEqual(high, 80, places=6)

    def testZeroFrequencyBranches(self):
        low, high = annulusSpectrum(0.5, 0)
        self.assertEqual(low, 0.0)
        self.assertAlmostEqual(high, 3 / math.log(2), places=12)

    def testGivenInvalidInnerRadius_shouldRaise(self):
        with self.assertRaises(ReferenceDomainError):
            annulusSpectrum(1.0, 1)

    def testEntriesAreSortedAndCoverCount(self):
        entries = annulusSpectrumEntries(0.5, 40)
        sigmas = [e.sigma for e in entries]
        self.assertEqual(sigmas, sorted(sigmas))
        self.assertGreaterEqual(sum(e.multiplicity for e in entries), 40)

    def testModeHasUnitBoundaryNorm(self):
        sigma = annulusSpectrum(0.5, 3)[1]
        theta = 2 * np.pi * np.arange(64) / 64
        outer = annulusMode(0.5, 3, sigma, 1.0, theta)
        inner = annulusMode(0.5, 3, sigma, 0.5, theta)
        norm = np.sum(np.abs(outer) ** 2) * 2 * np.pi / 64 + 0.5 * np.sum(np.abs(inner) ** 2) * 2 * np.pi / 64
        self.assertAlmostEqual(float(norm), 1.0, places=12)

    def testModeSatisfiesOuterSteklovCondition(self):
        k, r0 = 4, 0.5
        sigma = annulusSpectrum(r0, k)[0]
        step = 1e-6
        derivative = (annulusMode(r0, k, sigma, 1 + step, 0.0) - annulusMode(r0, k, sigma, 1 - step, 0.0)) / (2 * step)
        self.assertAlmostEqual(abs(derivative - sigma * annulusMode(r0, k, sigma, 1.0, 0.0)), 0.0, places=6)

    def testOuterBranchModeApproachesDiskModeNearOuterCircle(self):
        for k in (10, 20):
            sigma = annulusSpectrum(0.5, k)[0]
            value = abs(annulusMode(0.5, k, sigma, 0.999, 0.0))
            disk = abs(diskMode(1.0, k, 0.999, 0.0))
            self.assertLess(abs(value - disk) / disk, 100 * 0.5 ** (2 * k))

    def testInnerBranchModeFollowsInnerCircleAsymptote(self):
        r0 = 0.5
        r = r0 + 0.1
        for k, bound in ((10, 1e-3), (20, 1e-6)):
            sigma = annulusSpectrum(r0, k)[1]
            value = abs(annulusMode(r0, k, sigma, r, 0.0))
            asymptote = r0 ** k * r ** (-k) / math.sqrt(2 * math.pi * r0)
            self.assertLess(abs(value - asymptote) / asymptote, bound)

    def testGivenPoleOfRadialProfile_shouldRaise(self):
        with self.assertRaises(ReferenceDomainError):
            annulusMode(0.5, 2, -2.0, 0.7, 0.0)


class TestCylinder(envtest.PySteklovTestCase):

    def testCylinderBranches(self):
        even, odd = cylinderSpectrum(2.0)
        self.assertAlmostEqual(even, 2 * math.tanh(2), places=14)
        self.assertAlmostEqual(odd, 2 / math.tanh(2), places=14)

    def testZeroFrequencyOddBranchIsOne(self):
        self.assertEqual(cylinderSpectrum(0.0), (0.0, 1.0))

    def testEntriesCoverCount(self):
        entries = cylinderSpectrumEntries(9)
        self.assertGreaterEqual(sum(e.multiplicity for e in entries), 9)
        self.assertEqual(entries[0].sigma, 0.0)

    def testModeIsNormalizedOnBothBoundaryCircles(self):
        mode = CylinderMode(3, "odd")
        for component in (0, 1):
            trace = mode.boundaryTrace(64, component)
            self.assertAlmostEqual(float(np.sum(np.abs(trace) ** 2) * 2 * np.pi / 64), 0.5, places=12)

    def testLargeFrequencyModeDoesNotOverflow(self):
        mode = CylinderMode(800)
        value = mode.evaluate([[0.0, 0.0]])[0]
        self.assertTrue(np.isfinite(value))
        self.assertLess(abs(value), 1e-300)

    def testModeDecaysLikeExponentialOfDistance(self):
        mode = CylinderMode(40)
        ratio = abs(mode.valuesAtFermi([0.0], 0.1)[0]) / mode.boundaryMaximum()
        self.assertAlmostEqual(-math.log(ratio) / mode.lam, 0.1, places=6)

    def testGivenUnknownParity_shouldRaise(self):
        with self.assertRaises(ReferenceDomainError):
            CylinderMode(2, "neither")


class TestExactDecayLaw(envtest.PySteklovTestCase):

    def testDiskLawTaylorCoefficients(self):
        law = exactDecayLaw("disk", R=1.0)
        t = 1e-3
        self.assertAlmostEqual(float(law(t)), t + t * t / 2, places=9)

    def testAnnulusInnerLawHasNegativeQuadratic(self):
        law = exactDecayLaw("annulus_inner", r0=0.5)
        self.assertEqual(law.quadratic, -1.0)
        self.assertAlmostEqual(float(law(0.1)), 0.5 * math.log(1.2), places=14)

    def testCylinderLawIsLinear(self):
        law = exactDecayLaw("cylinder")
        self.assertEqual(float(law(0.3)), 0.3)
        self.assertEqual(law.quadratic, 0.0)

    def testQuadraticCoefficientIsHalfTheBoundaryCurvature(self):
        laws = [(exactDecayLaw("disk", R=2.0), Domain.disk(2.0), 0),
                (exactDecayLaw("annulus_inner", r0=0.5), Domain.annulus(0.5), 1),
                (exactDecayLaw("annulus_outer"), Domain.annulus(0.5), 0),
                (exactDecayLaw("cylinder"), CylinderDomain(), 0)]
        for law, domain, component in laws:
            for t in (0.0, 1.0, 4.0):
                self.assertAlmostEqual(law.quadratic, 0.5 * domain.curvatureAt(t, component), places=12)

    def testLinearCoefficientIsOneForEveryExample(self):
        for law in (exactDecayLaw("disk", R=2.0), exactDecayLaw("annulus_inner", r0=0.5),
                    exactDecayLaw("annulus_outer"), exactDecayLaw("cylinder")):
            self.assertEqual(law.linear, 1.0)
            self.assertEqual(float(law(0.0)), 0.0)

    def testGivenUnknownExample_shouldRaise(self):
        with self.assertRaises(ReferenceDomainError):
            exactDecayLaw("sphere")


if __name__ == '__main__':
    envtest.main()
