"""
FBI transforms of functions on a flat circle of period P (2π by default): the periodized
standard Gaussian transform and the heat-kernel (holomorphic) transform, the weights
ψ(α_ξ) of the decay theorems, and weighted phase-space norms computed in log space.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from pysteklov.dtn import SteklovMode, fourierCoefficients, fourierUpsample, trigonometricInterpolation
from pysteklov.errors import FbiError, WeightError

logger = logging.getLogger(__name__)

twoPi = 2 * np.pi
GEO = "geo"
HOL = "hol"


@dataclass(frozen=True)
class PhaseSpaceGrid:
    nx: int = 256
    xiMin: float = -3.0
    xiMax: float = 3.0
    nXi: int = 601
    period: float = twoPi

    def __post_init__(self):
        if self.nx < 2 or self.nXi < 2 or not self.xiMax > self.xiMin:
            raise FbiError("Phase-space grid must be strictly monotone with at least 2 points per axis")

    @property
    def alphaX(self):
        return self.period * np.arange(self.nx) / self.nx

    @property
    def alphaXi(self):
        return np.linspace(self.xiMin, self.xiMax, self.nXi)

    def withPeriod(self, period: float) -> 'PhaseSpaceGrid':
        return PhaseSpaceGrid(self.nx, self.xiMin, self.xiMax, self.nXi, period)


class PhaseSpaceTable:
    """ Values of an FBI transform on the grid α_x (columns) × α_ξ (rows). """

    def __init__(self, grid: PhaseSpaceGrid, values, h: float, transform: str):
        self.grid = grid
        self.values = np.asarray(values)
        self.h = h
        self.transform = transform
        if self.values.shape != (grid.nXi, grid.nx):
            raise FbiError("Table shape {0} does not match the grid".format(self.values.shape))
        if not np.all(np.isfinite(self.values)):
            raise FbiError("FBI table contains non-finite values")

    @property
    def alphaX(self):
        return self.grid.alphaX

    @property
    def alphaXi(self):
        return self.grid.alphaXi

    def _integrate(self, density, rows=None):
        """ Periodic trapezoid along α_x, trapezoid along α_ξ. """
        xi = self.alphaXi if rows is None else self.alphaXi[rows]
        alongX = np.sum(density, axis=1) * self.grid.period / self.grid.nx
        return float(integrate.trapezoid(alongX, xi))

    def l2Norm(self) -> float:
        return math.sqrt(self._integrate(np.abs(self.values) ** 2))

    def logWeightedNorm(self, weight: 'WeightSpec', norm: str = "L2") -> float:
        """ log ‖e^{ψ/h} T u‖ with the running maximum shifted out before exponentiation. """
        with np.errstate(divide='ignore'):
            logValues = np.log(np.abs(self.values)) + weight.evaluate(self.alphaXi)[:, None] / self.h
        mask = weight.restrictionMask(self.alphaXi)
        logValues = np.where(mask[:, None], logValues, -np.inf)

        shift = np.max(logValues)
        if not np.isfinite(shift):
            return -math.inf
        if norm == "Linf":
            return float(shift)
        elif norm == "L2":
            density = np.exp(2 * (logValues - shift))
            return float(shift + 0.5 * math.log(self._integrate(density)))
        raise FbiError("Unknown norm '{0}', expected 'L2' or 'Linf'".format(norm))

    def weightedNorm(self, weight: 'WeightSpec', norm: str = "L2") -> float:
        return math.exp(self.logWeightedNorm(weight, norm))

    def zeroSectionMass(self, epsilon: float) -> float:
        """ L² norm of the table restricted to |α_ξ| ≤ ε. """
        if epsilon >= 1:
            raise FbiError("Zero-section cutoff must be below 1, got {0}".format(epsilon))
        rows = np.abs(self.alphaXi) <= epsilon
        if np.count_nonzero(rows) < 2:
            return 0.0
        return math.sqrt(self._integrate(np.abs(self.values[rows]) ** 2, rows))

    def zeroSectionFraction(self, epsilon: float) -> float:
        return (self.zeroSectionMass(epsilon) / self.l2Norm()) ** 2

    def massFraction(self, low: float, high: float) -> float:
        """ Fraction of the squared L² norm carried by low ≤ |α_ξ| ≤ high. """
        rows = (np.abs(self.alphaXi) >= low) & (np.abs(self.alphaXi) <= high)
        if np.count_nonzero(rows) < 2:
            return 0.0
        return self._integrate(np.abs(self.values[rows]) ** 2, rows) / self.l2Norm() ** 2

    def rows(self):
        """ (α_x, α_ξ, Re, Im, |T|) rows in α_ξ-major order. """
        X, XI = np.meshgrid(self.alphaX, self.alphaXi)
        return np.column_stack([X.ravel(), XI.ravel(), self.values.real.ravel(), self.values.imag.ravel(),
                                np.abs(self.values).ravel()])

    def display(self, title: str = None):
        import matplotlib.pyplot as plt
        fig, ax = plt.subplots()
        extent = [0, self.grid.period, self.grid.xiMin, self.grid.xiMax]
        image = ax.imshow(np.abs(self.values), origin='lower', aspect='auto', extent=extent)
        ax.set_xlabel("α_x")
        ax.set_ylabel("α_ξ")
        ax.set_title(title or "|T_{0} u|, h={1:.4g}".format(self.transform, self.h))
        fig.colorbar(image, ax=ax)
        plt.show()

    def __repr__(self):
        return "PhaseSpaceTable({0}, h={1:.4g}, {2}x{3})".format(self.transform, self.h, self.grid.nXi,
                                                                self.grid.nx)


class WeightSpec:
    """ Weight ψ(α_ξ) built from the DtN model symbol p = |α_ξ| - 1, for which a0 = 1/(2|dp|²) = ½. """
    THM2 = "thm2"
    THM3_GAMMA = "thm3_gamma"
    THM3_SHARP = "thm3_sharp"
    ZERO = "zero"
    a0 = 0.5

    def __init__(self, family: str, delta: float = None, order: int = 1, gamma: float = None,
                 epsilon: float = None):
        self.family = family
        self.delta = delta
        self.order = order
        self.gamma = gamma
        self.epsilon = epsilon

        if family == self.THM2:
            if delta is None or delta <= 0:
                raise WeightError("thm2 weight needs δ > 0, got {0}".format(delta))
        elif family == self.THM3_GAMMA:
            if gamma is None or not 0 < gamma < 0.5:
                raise WeightError("thm3_gamma weight needs 0 < γ < ½, got {0}".format(gamma))
        elif family not in (self.THM3_SHARP, self.ZERO):
            raise WeightError("Unknown weight family '{0}'".format(family))

    @classmethod
    def thm2(cls, delta: float, order: int = 1):
        return cls(cls.THM2, delta=delta, order=order)

    @classmethod
    def thm3Gamma(cls, gamma: float, epsilon: float = 0.75):
        return cls(cls.THM3_GAMMA, gamma=gamma, epsilon=epsilon)

    @classmethod
    def thm3Sharp(cls, epsilon: float = 0.75):
        return cls(cls.THM3_SHARP, epsilon=epsilon)

    @classmethod
    def zero(cls):
        return cls(cls.ZERO)

    @staticmethod
    def symbol(alphaXi):
        return np.abs(alphaXi) - 1

    def evaluate(self, alphaXi):
        alphaXi = np.asarray(alphaXi, dtype=float)
        p = self.symbol(alphaXi)
        if self.family == self.THM2:
            return self.delta * p ** 2 / (1 + alphaXi ** 2) ** self.order
        elif self.family == self.THM3_GAMMA:
            return self.gamma * self.a0 * p ** 2
        elif self.family == self.THM3_SHARP:
            return self.a0 * p ** 2
        return np.zeros_like(alphaXi)

    def restrictionMask(self, alphaXi):
        if self.epsilon is None:
            return np.ones(np.shape(alphaXi), dtype=bool)
        return np.abs(self.symbol(alphaXi)) <= self.epsilon

    @property
    def label(self) -> str:
        if self.family == self.THM2:
            return "thm2(delta={0:g},order={1})".format(self.delta, self.order)
        elif self.family == self.THM3_GAMMA:
            return "thm3_gamma(gamma={0:g})".format(self.gamma)
        return self.family

    def __repr__(self):
        return "WeightSpec({0})".format(self.label)


def _validate(samples, h: float, period: float):
    samples = np.asarray(samples)
    if samples.ndim != 1 or len(samples) < 4:
        raise FbiError("FBI input must be a 1-D uniform sample of at least 4 values")
    if not h > 0:
        raise FbiError("Semiclassical parameter must be positive, got {0}".format(h))
    if period <= 0:
        raise FbiError("Period must be positive, got {0}".format(period))
    return samples


def fbiHolCircle(samples, h: float, grid: PhaseSpaceGrid = None, period: float = None) -> PhaseSpaceTable:
    """
    Heat-kernel FBI transform on the circle of length P:
    T u(α) = h^{-1/4} Σ_k û_k e^{iη_k α_x} e^{-(α_ξ - hη_k)²/2h},  η_k = 2πk/P,
    with û_k the exact Fourier coefficients of the trigonometric interpolant of the samples.
    """
    grid = grid or PhaseSpaceGrid()
    period = period or grid.period
    grid = grid.withPeriod(period)
    samples = _validate(samples, h, period)

    n = len(samples)
    etaMax = np.pi * n / period
    if math.exp(-etaMax ** 2 * h / 2) >= 1e-16:
        raise FbiError("Theta series truncated at |η| = {0:.4g} leaves a tail above 1e-16 for h={1:.4g}: "
                       "use more samples".format(etaMax, h))

    coefficients, k = fourierCoefficients(samples)
    eta = twoPi * k / period
    gaussians = np.exp(-np.subtract.outer(grid.alphaXi, h * eta) ** 2 / (2 * h))
    plane = np.exp(1j * np.multiply.outer(eta, grid.alphaX))
    values = h ** -0.25 * (gaussians * coefficients[None, :]) @ plane
    return PhaseSpaceTable(grid, values, h, HOL)


def fbiGeoCircle(samples, h: float, grid: PhaseSpaceGrid = None, period: float = None) -> PhaseSpaceTable:
    """
    Standard Gaussian FBI transform periodized over the circle of length P:
    T u(α) = 2^{-1/2}(πh)^{-3/4} Σ_m ∫ e^{i(α_x-y-mP)α_ξ/h - (α_x-y-mP)²/2h} u(y) dy.
    Evaluated as a circular convolution (FFT) of the periodized kernel with the trigonometric
    interpolant of u on a grid fine enough to resolve both the Gaussian and its phase.
    """
    grid = grid or PhaseSpaceGrid()
    period = period or grid.period
    grid = grid.withPeriod(period)
    samples = _validate(samples, h, period)
    scaledH = h * twoPi / period
    if scaledH > 1:
        raise FbiError("h={0:.4g} is too large for a circle of length {1:.4g}: periodized Gaussians "
                       "overlap".format(h, period))

    n = len(samples)
    xiExtent = max(abs(grid.xiMin), abs(grid.xiMax))
    bandwidth = xiExtent / h + np.pi * n / period + 8 / math.sqrt(h)
    M = grid.nx
    while M < n or M * np.pi / period < 2 * bandwidth:
        M *= 2
    if M % n == 0:
        fine = fourierUpsample(samples, M // n)
    else:
        fine = trigonometricInterpolation(samples, twoPi * np.arange(M) / M)

    images = int(math.ceil(math.sqrt(2 * h * 37) / period)) + 1
    z = period * np.arange(M) / M
    z = np.where(z >= period / 2, z - period, z)
    shifted = np.add.outer(z, -period * np.arange(-images, images + 1))
    kernels = np.zeros((grid.nXi, M), dtype=complex)
    for column in range(shifted.shape[1]):
        s = shifted[:, column]
        kernels += np.exp(1j * np.multiply.outer(grid.alphaXi, s) / h - s ** 2 / (2 * h))

    convolution = np.fft.ifft(np.fft.fft(kernels, axis=1) * np.fft.fft(fine)[None, :], axis=1)
    prefactor = 2 ** -0.5 * (np.pi * h) ** -0.75 * period / M
    values = prefactor * convolution[:, ::M // grid.nx]
    return PhaseSpaceTable(grid, values, h, GEO)


def fbiOfComputedMode(mode: SteklovMode, grid: PhaseSpaceGrid = None, transform: str = HOL,
                      component: int = None) -> PhaseSpaceTable:
    """
    Transform of a computed boundary trace after reparametrizing its component by arclength:
    the trace becomes a function on the circle of length L, α_x is arclength and α_ξ is dual to
    it, so the characteristic set is |α_ξ| = 1 with h = 1/σ.
    """
    if not mode.isResolved:
        raise FbiError("Mode {0} has dominant frequency {1} above N/4 and is not resolved".format(
            mode.index, mode.dominantFrequency))
    if component is None:
        component = mode.dominantComponent

    curve = mode.domain.components[component]
    N = mode.operators.N
    L = curve.length
    s = L * np.arange(N) / N
    t = curve.parameterAtArclength(s)
    samples = mode.traceAt(t, component)

    grid = (grid or PhaseSpaceGrid()).withPeriod(L)
    logger.debug("FBI of mode {0} on component {1} with length {2:.6g}".format(mode.index, component, L))
    if transform == HOL:
        return fbiHolCircle(samples, mode.h, grid, L)
    elif transform == GEO:
        return fbiGeoCircle(samples, mode.h, grid, L)
    raise FbiError("Unknown transform '{0}', expected 'geo' or 'hol'".format(transform))
