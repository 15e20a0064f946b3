import logging
import math
import time
import warnings
from typing import List

import numpy as np
from scipy import linalg

from pysteklov.geometry import Domain
from pysteklov.errors import LayerAssemblyError, SteklovSolveError, IllConditionedError, UnresolvedModeWarning

logger = logging.getLogger(__name__)

twoPi = 2 * np.pi


def fourierCoefficients(values):
    """ Coefficients c_k of the trigonometric interpolant of equispaced samples, ordered as
    np.fft.fftfreq, with the Nyquist term of an even-length sample split in half. """
    values = np.asarray(values)
    N = len(values)
    c = np.fft.fft(values) / N
    frequencies = np.fft.fftfreq(N, d=1.0 / N)
    if N % 2 == 0:
        nyquist = c[N // 2] / 2
        c = np.concatenate([c, [nyquist]])
        c[N // 2] = nyquist
        frequencies = np.concatenate([frequencies, [N // 2]])
    return c, frequencies


def trigonometricInterpolation(values, t):
    c, frequencies = fourierCoefficients(values)
    t = np.asarray(t, dtype=float)
    result = np.exp(1j * np.multiply.outer(t, frequencies)) @ c
    if np.isrealobj(values):
        return result.real
    return result


def fourierUpsample(values, factor: int):
    """ Zero-padded FFT resampling of a periodic sequence onto factor·N equispaced nodes. """
    values = np.asarray(values)
    N = len(values)
    M = factor * N
    c = np.fft.fft(values)
    padded = np.zeros(M, dtype=complex)
    half = N // 2
    if N % 2 == 0:
        padded[:half] = c[:half]
        padded[half] = c[half] / 2
        padded[M - half] = c[half] / 2
        padded[M - half + 1:] = c[half + 1:]
    else:
        padded[:half + 1] = c[:half + 1]
        padded[M - half:] = c[half + 1:]
    upsampled = np.fft.ifft(padded) * factor
    if np.isrealobj(values):
        return upsampled.real
    return upsampled


class LayerOperators:
    """
    Nyström discretization of the single layer S and double layer K over N equispaced
    parameter nodes per boundary component, with G(x,y) = -(1/2π) log(c|x-y|).

    The logarithmic singularity of S on each component is integrated with the periodic
    Kress product rule; the diagonal of K is its smooth limit -κ/(4π). The capacity scale
    c = 1/diameter keeps S positive definite. Matrices act on nodal values and already
    contain the arclength weights, so S·ψ approximates ∫G ψ ds.
    """

    conditionLimit = 1e12

    def __init__(self, domain: Domain, N: int, capacityScale: float = None):
        self.domain = domain
        self.N = N
        self.capacityScale = capacityScale or 1 / domain.diameter

        nodes = domain.components[0].nodes(N)
        self.parameters = np.tile(nodes, len(domain.components))
        self.componentIndex = np.repeat(np.arange(len(domain.components)), N)
        self.points = np.concatenate([c.point(nodes) for c in domain.components])
        self.normals = np.concatenate([c.outwardNormal(nodes) for c in domain.components])
        self.speeds = np.concatenate([c.speed(nodes) for c in domain.components])
        self.curvatures = np.concatenate([c.curvature(nodes) for c in domain.components])
        self.weights = twoPi / N * self.speeds

        self.singleLayer = None
        self.doubleLayer = None
        self._luFactor = None
        self._conditionNumber = None

    @classmethod
    def assemble(cls, domain: Domain, N: int = 256, capacityScale: float = None) -> 'LayerOperators':
        if N % 2 != 0 or N < 32:
            raise LayerAssemblyError("Nyström grid needs an even N >= 32, got {0}".format(N))
        ops = cls(domain, N, capacityScale)
        ops._checkNodesAreDistinct()

        startTime = time.time()
        ops.singleLayer = ops._assembleSingleLayer()
        ops.doubleLayer = ops._assembleDoubleLayer()
        logger.info("Assembled {0}x{0} layer operators for {1} in {2:.2f} s".format(
            ops.size, domain, time.time() - startTime))
        return ops

    @property
    def size(self) -> int:
        return len(self.parameters)

    @property
    def componentCount(self) -> int:
        return len(self.domain.components)

    @property
    def halfPlusDoubleLayer(self):
        return 0.5 * np.eye(self.size) + self.doubleLayer

    def componentSlice(self, component: int) -> slice:
        return slice(component * self.N, (component + 1) * self.N)

    def _checkNodesAreDistinct(self):
        tolerance = 1e-12 * self.domain.diameter
        for i in range(self.componentCount):
            for j in range(i + 1, self.componentCount):
                a = self.points[self.componentSlice(i)]
                b = self.points[self.componentSlice(j)]
                gaps = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
                if np.min(gaps) < tolerance:
                    raise LayerAssemblyError("Nodes of components {0} and {1} coincide: boundary components "
                                             "must be disjoint".format(i, j))

    def _kressWeights(self):
        N = self.N
        n = N // 2
        t = twoPi * np.arange(N) / N
        m = np.arange(1, n)
        R = -(4 * np.pi / N) * np.sum(np.cos(np.multiply.outer(t, m)) / m, axis=1)
        R -= (4 * np.pi / N ** 2) * np.cos(n * t)
        offsets = np.subtract.outer(np.arange(N), np.arange(N)) % N
        return R[offsets]

    def _assembleSingleLayer(self):
        S = np.empty((self.size, self.size))
        differences = self.points[:, None, :] - self.points[None, :, :]
        distances = np.sqrt(np.sum(differences ** 2, axis=-1))
        capacityShift = -np.log(self.capacityScale) / twoPi

        # smooth kernel everywhere, the diagonal blocks are overwritten below
        with np.errstate(divide='ignore'):
            S[:] = -np.log(distances) / twoPi
        S += capacityShift
        S *= self.weights[None, :]

        R = self._kressWeights()
        t = self.domain.components[0].nodes(self.N)
        halfAngle = np.subtract.outer(t, t) / 2
        sinSquared = 4 * np.sin(halfAngle) ** 2
        np.fill_diagonal(sinSquared, 1.0)
        for c in range(self.componentCount):
            block = self.componentSlice(c)
            speeds = self.speeds[block]
            d2 = distances[block, block] ** 2
            np.fill_diagonal(d2, 1.0)
            smooth = -np.log(d2 / sinSquared) / (4 * np.pi)
            np.fill_diagonal(smooth, -np.log(speeds ** 2) / (4 * np.pi))
            S[block, block] = (-R / (4 * np.pi) + twoPi / self.N * smooth) * speeds[None, :]
            S[block, block] += capacityShift * self.weights[block][None, :]
        return S

    def _assembleDoubleLayer(self):
        differences = self.points[:, None, :] - self.points[None, :, :]
        d2 = np.sum(differences ** 2, axis=-1)
        np.fill_diagonal(d2, 1.0)
        numerator = np.sum(differences * self.normals[None, :, :], axis=-1)
        K = numerator / d2 / twoPi
        np.fill_diagonal(K, -self.curvatures / (4 * np.pi))
        return K * self.weights[None, :]

    def innerProduct(self, f, g) -> complex:
        return np.sum(self.weights * np.asarray(f) * np.conj(np.asarray(g)))

    def l2Norm(self, f) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(np.asarray(f)) ** 2)))

    @property
    def conditionNumber(self) -> float:
        if self._conditionNumber is None:
            self._conditionNumber = float(np.linalg.cond(self.singleLayer))
        return self._conditionNumber

    def apply(self, f):
        """ Dirichlet-to-Neumann map: solves S g = (½I + K) f for the outward normal derivative g
        of the harmonic extension of f. """
        f = np.asarray(f)
        if f.shape != (self.size,):
            raise SteklovSolveError("Boundary vector has shape {0}, expected ({1},)".format(f.shape, self.size))
        if self._luFactor is None:
            if self.conditionNumber > self.conditionLimit:
                raise IllConditionedError(self.conditionNumber)
            self._luFactor = linalg.lu_factor(self.singleLayer)

        rhs = self.halfPlusDoubleLayer @ f
        if np.iscomplexobj(rhs):
            return linalg.lu_solve(self._luFactor, rhs.real) + 1j * linalg.lu_solve(self._luFactor, rhs.imag)
        return linalg.lu_solve(self._luFactor, rhs)

    def solve(self, nModes: int, clusterTolerance: float = 1e-6) -> 'SteklovSpectrum':
        """ Lowest nModes eigenpairs of (½I + K)φ = σSφ, weight-orthonormalized. """
        if nModes < 1 or nModes > self.N // 2:
            raise SteklovSolveError("Can resolve between 1 and N/2 = {0} modes, {1} requested".format(
                self.N // 2, nModes))

        startTime = time.time()
        sqrtW = np.sqrt(self.weights)
        A = self.halfPlusDoubleLayer
        Sw = sqrtW[:, None] * self.singleLayer / sqrtW[None, :]
        Sw = (Sw + Sw.T) / 2
        Aw = sqrtW[:, None] * A / sqrtW[None, :]

        try:
            factor = linalg.cho_factor(Sw)
            Dw = linalg.cho_solve(factor, Aw)
            asymmetry = np.linalg.norm(Dw - Dw.T) / np.linalg.norm(Dw)
            logger.debug("Relative asymmetry of the weighted DtN matrix: {0:.3e}".format(asymmetry))
            sigmas, vectors = linalg.eigh((Dw + Dw.T) / 2, subset_by_index=[0, nModes - 1])
            traces = vectors / sqrtW[:, None]
        except linalg.LinAlgError:
            logger.warning("Single layer is not positive definite at capacity scale {0:.4g}, "
                           "falling back to QZ".format(self.capacityScale))
            sigmas, traces = self._solveQZ(A, nModes, clusterTolerance)

        tolerance = 1e-8 * max(1.0, float(np.max(np.abs(sigmas))))
        if np.min(sigmas) < -tolerance:
            raise SteklovSolveError("Negative Steklov eigenvalue {0:.3e} beyond tolerance".format(np.min(sigmas)))
        # the constant mode comes out at round-off level of either sign
        sigmas = np.where(np.abs(sigmas) <= tolerance, 0.0, sigmas)

        modes = []
        for index, (sigma, trace) in enumerate(zip(sigmas, traces.T)):
            trace = self._fixSign(trace)
            modes.append(SteklovMode(self, float(sigma), trace, self.residual(sigma, trace), index))

        unresolved = [m.index for m in modes if not m.isResolved]
        if unresolved:
            warnings.warn("{0} mode(s) have a dominant frequency above N/4 = {1} and are not resolved "
                          "(first index {2})".format(len(unresolved), self.N // 4, unresolved[0]),
                          UnresolvedModeWarning)

        logger.info("Solved for {0} Steklov modes in {1:.2f} s (largest σ = {2:.6g})".format(
            nModes, time.time() - startTime, sigmas[-1]))
        return SteklovSpectrum(modes, self, clusterTolerance)

    def _solveQZ(self, A, nModes, clusterTolerance):
        values, vectors = linalg.eig(A, self.singleLayer)
        finite = np.isfinite(values)
        values, vectors = values[finite].real, vectors[:, finite].real
        order = np.argsort(values)[:nModes]
        if len(order) < nModes:
            raise SteklovSolveError("QZ solve returned only {0} finite eigenvalues".format(len(order)))
        sigmas, traces = values[order], vectors[:, order]

        sqrtW = np.sqrt(self.weights)
        for cluster in _clusterRanges(sigmas, clusterTolerance):
            q, _ = np.linalg.qr(sqrtW[:, None] * traces[:, cluster])
            traces[:, cluster] = q / sqrtW[:, None]
        return sigmas, traces

    def _fixSign(self, trace):
        pivot = np.argmax(np.abs(trace))
        trace = trace / self.l2Norm(trace)
        return trace if trace[pivot] >= 0 else -trace

    def residual(self, sigma, trace) -> float:
        r = self.halfPlusDoubleLayer @ trace - sigma * (self.singleLayer @ trace)
        return self.l2Norm(r)

    def __repr__(self):
        return "LayerOperators(N={0}, {1})".format(self.N, self.domain)


def _clusterRanges(sigmas, tolerance) -> List[slice]:
    clusters = []
    start = 0
    for i in range(1, len(sigmas) + 1):
        if i == len(sigmas) or sigmas[i] - sigmas[i - 1] > tolerance * max(1.0, abs(sigmas[i - 1])):
            clusters.append(slice(start, i))
            start = i
    return clusters


class SteklovMode:
    """ One Steklov eigenpair: σ, h = 1/σ and the L²(∂Ω)-normalized boundary trace on the Nyström grid. """

    def __init__(self, operators: LayerOperators, sigma: float, trace, residual: float = None, index: int = None):
        self.operators = operators
        self.sigma = sigma
        self.trace = np.asarray(trace)
        self.residual = residual
        self.index = index

    @classmethod
    def fromTrace(cls, operators: LayerOperators, sigma: float, trace, index: int = None):
        trace = np.asarray(trace)
        trace = trace / operators.l2Norm(trace)
        return cls(operators, sigma, trace, operators.residual(sigma, trace), index)

    @property
    def domain(self) -> Domain:
        return self.operators.domain

    @property
    def h(self) -> float:
        if self.sigma <= 0:
            return math.inf
        return 1 / self.sigma

    @property
    def l2Norm(self) -> float:
        return self.operators.l2Norm(self.trace)

    def componentTrace(self, component: int):
        return self.trace[self.operators.componentSlice(component)]

    def componentMass(self, component: int) -> float:
        block = self.operators.componentSlice(component)
        return float(np.sum(self.operators.weights[block] * np.abs(self.trace[block]) ** 2))

    @property
    def dominantComponent(self) -> int:
        return int(np.argmax([self.componentMass(c) for c in range(self.operators.componentCount)]))

    @property
    def dominantFrequency(self) -> int:
        coefficients = np.abs(np.fft.fft(self.componentTrace(self.dominantComponent)))
        frequencies = np.abs(np.fft.fftfreq(self.operators.N, d=1.0 / self.operators.N))
        return int(frequencies[np.argmax(coefficients)])

    @property
    def isResolved(self) -> bool:
        return self.dominantFrequency <= self.operators.N // 4

    def traceAt(self, t, component: int = 0):
        """ Trigonometric interpolation of the trace of one component at parameters t. """
        return trigonometricInterpolation(self.componentTrace(component), t)

    def combine(self, other: 'SteklovMode') -> 'SteklovMode':
        """ Rotating combination (φa ± iφb)/√2 of two orthonormal modes of a degenerate pair. The
        sign puts the dominant Fourier content at positive frequencies, so the result does not
        depend on the signs the eigensolver gave φa and φb. """
        trace = (self.trace + 1j * other.trace) / math.sqrt(2)
        block = self.operators.componentSlice(self.dominantComponent)
        coefficients = np.abs(np.fft.fft(trace[block])) ** 2
        frequencies = np.fft.fftfreq(len(coefficients), d=1.0 / len(coefficients))
        if np.sum(coefficients[frequencies < 0]) > np.sum(coefficients[frequencies > 0]):
            trace = (self.trace - 1j * other.trace) / math.sqrt(2)
        sigma = (self.sigma + other.sigma) / 2
        return SteklovMode.fromTrace(self.operators, sigma, trace, self.index)

    def __repr__(self):
        return "SteklovMode(index={0}, σ={1:.10g}, residual={2:.2e})".format(self.index, self.sigma,
                                                                             self.residual or 0.0)


class SteklovSpectrum:
    """ Ordered collection of computed modes with near-degenerate cluster bookkeeping. """

    def __init__(self, modes: List[SteklovMode], operators: LayerOperators, clusterTolerance: float = 1e-6):
        self.modes = modes
        self.operators = operators
        self.clusterTolerance = clusterTolerance

    def __len__(self):
        return len(self.modes)

    def __getitem__(self, item):
        return self.modes[item]

    def __iter__(self):
        return iter(self.modes)

    @property
    def sigmas(self):
        return np.array([m.sigma for m in self.modes])

    def nearest(self, sigma: float) -> SteklovMode:
        return self.modes[int(np.argmin(np.abs(self.sigmas - sigma)))]

    def clusters(self) -> List[List[int]]:
        return [list(range(len(self.modes))[c]) for c in _clusterRanges(self.sigmas, self.clusterTolerance)]

    def clusterOf(self, index: int) -> List[int]:
        for cluster in self.clusters():
            if index in cluster:
                return cluster
        raise IndexError("No mode with index {0}".format(index))

    def multiplicityEstimates(self) -> List[int]:
        estimates = [1] * len(self.modes)
        for cluster in self.clusters():
            for index in cluster:
                estimates[index] = len(cluster)
        return estimates

    def rotatingMode(self, index: int) -> SteklovMode:
        cluster = self.clusterOf(index)
        if len(cluster) != 2:
            return self.modes[index]
        return self.modes[cluster[0]].combine(self.modes[cluster[1]])

    def concentratedMode(self, index: int, component: int, rotating: bool = False) -> SteklovMode:
        """
        Combination of the modes in the cluster of `index` carrying the most mass on one
        boundary component. Needed when eigenvalues living on different components collide,
        as σ_{k,2} and σ_{2k,1} do on the annulus r0 = ½.
        """
        cluster = self.clusterOf(index)
        traces = np.stack([self.modes[i].trace for i in cluster], axis=1)
        block = self.operators.componentSlice(component)
        w = self.operators.weights[block]
        gram = traces[block].T @ (w[:, None] * traces[block])
        masses, vectors = np.linalg.eigh(gram)
        sigmas = self.sigmas[cluster]

        def mix(vector):
            sigma = float(np.sum(vector ** 2 * sigmas))
            return SteklovMode.fromTrace(self.operators, sigma, traces @ vector, index)

        best = mix(vectors[:, -1])
        if rotating and len(cluster) >= 2 and masses[-2] > 0.5:
            return best.combine(mix(vectors[:, -2]))
        return best

    def __repr__(self):
        return "SteklovSpectrum({0} modes, σ up to {1:.6g})".format(len(self.modes), self.sigmas[-1])
