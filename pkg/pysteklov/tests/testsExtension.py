import envtest  # modifies path
import math

import numpy as np

from pysteklov.geometry import Domain
from pysteklov.dtn import LayerOperators
from pysteklov.extension import ExtensionField, maxPrincipleCheck
from pysteklov.reference import CylinderMode, annulusMode, annulusSpectrum, diskMode, maxErrorUpToPhase
from pysteklov.errors import ExtensionError, TooCloseToBoundaryError, PointNotInsideError


class TestExtensionField(envtest.PySteklovTestCase):

    @classmethod
    def setUpClass(cls):
        super(TestExtensionField, cls).setUpClass()
        cls.spectrum = LayerOperators.assemble(Domain.disk(), N=64).solve(21)
        cls.mode = cls.spectrum.rotatingMode(9)
        cls.field = ExtensionField(cls.mode, upsampling=8)

    def testGivenInvalidUpsampling_shouldRaise(self):
        with self.assertRaises(ExtensionError):
            ExtensionField(self.mode, upsampling=0)

    def testMinimumDistance(self):
        self.assertAlmostEqual(self.field.dMin, 6 * 2 * math.pi / (8 * 64), places=14)

    def testExtensionOfRotatingModeMatchesPower(self):
        points = np.array([[0.5, 0.0], [0.0, -0.7], [0.3, 0.3]])
        r = np.linalg.norm(points, axis=1)
        values = self.field.evaluate(points)
        self.assertArrayAlmostEqual(np.abs(values), r ** 5 / math.sqrt(2 * math.pi), 1e-9)

    def testExtensionOfRotatingModeMatchesDiskModeUpToPhase(self):
        points = np.array([[0.5, 0.0], [0.0, -0.7], [0.3, 0.3], [-0.4, 0.1]])
        r = np.linalg.norm(points, axis=1)
        theta = np.arctan2(points[:, 1], points[:, 0])
        values = self.field.evaluate(points)
        self.assertLess(maxErrorUpToPhase(values, diskMode(1.0, 5, r, theta)), 1e-9)

    def testGivenOppositeRotation_shouldNotMatchDiskMode(self):
        points = np.array([[0.5, 0.0], [0.0, -0.7], [0.3, 0.3], [-0.4, 0.1]])
        r = np.linalg.norm(points, axis=1)
        theta = np.arctan2(points[:, 1], points[:, 0])
        values = np.conj(self.field.evaluate(points))
        self.assertGreater(maxErrorUpToPhase(values, diskMode(1.0, 5, r, theta)), 1e-3)

    def testFivePointLaplacianOfExtensionMatchesDiskMode(self):
        s = 0.02
        points = np.array([[0.0, 0.0], [0.3, 0.1], [-0.2, 0.35], [0.1, -0.5]])
        field = ExtensionField(self.spectrum.rotatingMode(11))
        laplacian = envtest.fivePointLaplacian(lambda x, y: field.evaluate(np.column_stack([x, y])), points, s)
        z = points[:, 0] + 1j * points[:, 1]
        expected = 60 * s ** 2 * z ** 2 / math.sqrt(2 * math.pi)
        self.assertLess(maxErrorUpToPhase(laplacian, expected), 1e-6)

    def testSingleLayerTermCarriesInverseFrequencyWeight(self):
        points = np.array([[0.5, 0.0], [0.0, -0.7], [0.3, 0.3]])
        r = np.linalg.norm(points, axis=1)
        for index, k in ((5, 3), (11, 6)):
            field = ExtensionField(self.spectrum.rotatingMode(index))
            singleLayer, doubleLayer = field.layerPotentials(points)
            self.assertArrayAlmostEqual(np.abs(singleLayer), r ** k / (2 * k * math.sqrt(2 * math.pi)), 1e-9)
            self.assertArrayAlmostEqual(field.sigma * singleLayer, -doubleLayer, 1e-9)

    def testExtensionOfConstantModeIsConstant(self):
        field = ExtensionField(self.spectrum[0])
        values = field.evaluate([[0.1, 0.2], [-0.5, 0.4]])
        self.assertArrayAlmostEqual(values, 1 / math.sqrt(2 * math.pi), 1e-10)

    def testThreadedEvaluationMatchesSerial(self):
        points = Domain.disk().interiorGrid(0.1, minimumDistance=0.1)
        threaded = ExtensionField(self.mode, threads=4, chunkSize=16)
        self.assertArrayAlmostEqual(threaded.evaluate(points), self.field.evaluate(points), 1e-14)

    def testGivenPointTooClose_shouldRaise(self):
        with self.assertRaises(TooCloseToBoundaryError):
            self.field.evaluate([[0.99, 0.0]])

    def testGivenOutsidePoint_shouldRaise(self):
        with self.assertRaises(PointNotInsideError):
            self.field.evaluate([[1.2, 0.0]])

    def testValuesAtFermiAtZeroDistanceIsTrace(self):
        t = np.array([0.0, 1.0])
        self.assertArrayAlmostEqual(self.field.valuesAtFermi(t, 0.0), self.mode.traceAt(t), 1e-14)

    def testValuesAtFermiFollowsInwardNormal(self):
        value = self.field.valuesAtFermi([0.0], 0.2)[0]
        self.assertAlmostEqual(abs(value), 0.8 ** 5 / math.sqrt(2 * math.pi), places=9)

    def testGivenFermiDistanceBelowMinimum_shouldRaise(self):
        with self.assertRaises(TooCloseToBoundaryError):
            self.field.valuesAtFermi([0.0], 1e-4)


class TestExtensionRefinement(envtest.PySteklovTestCase):

    def testValueAtMinimumDistanceApproachesTraceUnderRefinement(self):
        errors = []
        for N in (64, 128, 256):
            mode = LayerOperators.assemble(Domain.disk(), N=N).solve(7).rotatingMode(5)
            field = ExtensionField(mode)
            t = np.array([0.0, 2.0, 4.0])
            interior = field.valuesAtFermi(t, 1.001 * field.dMin)
            errors.append(float(np.max(np.abs(interior - mode.traceAt(t)))))
        for coarse, fine in zip(errors, errors[1:]):
            self.assertLess(fine, coarse)

    def testAnnulusExtensionMatchesClosedFormMode(self):
        spectrum = LayerOperators.assemble(Domain.annulus(0.5), N=64).solve(24)
        sigma = annulusSpectrum(0.5, 4)[0]
        index = spectrum.clusterOf(int(np.argmin(np.abs(spectrum.sigmas - sigma))))[0]
        field = ExtensionField(spectrum.rotatingMode(index))
        theta = np.array([0.0, 0.7, 2.0, 3.5, 5.1])
        points = 0.75 * np.column_stack([np.cos(theta), np.sin(theta)])

        values = field.evaluate(points)

        self.assertLess(maxErrorUpToPhase(values, annulusMode(0.5, 4, sigma, 0.75, theta)), 1e-6)
        self.assertArrayAlmostEqual(np.abs(values), 0.1370018, 1e-6)


class TestMaximumPrinciple(envtest.PySteklovTestCase):

    def testComputedModeSatisfiesMaximumPrinciple(self):
        mode = LayerOperators.assemble(Domain.ellipse(1.2, 1.0), N=64).solve(15)[10]
        field = ExtensionField(mode)
        points = mode.domain.interiorGrid(0.1, minimumDistance=0.1)
        report = maxPrincipleCheck(field, points)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.ratio, 1 + 1e-6)

    def testClosedFormModeSatisfiesMaximumPrinciple(self):
        mode = CylinderMode(10)
        points = np.array([[0.0, 0.0], [0.5, 1.0], [-0.9, 2.0]])
        report = maxPrincipleCheck(mode, points)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.boundaryMaximum, 1 / math.sqrt(4 * math.pi), places=14)


if __name__ == '__main__':
    envtest.main()
