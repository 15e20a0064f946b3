"""
Closed-form Steklov data for the three worked examples: the disk B(0,R), the cylinder
(-1,1) x S^1 and the annulus B(0,1) minus B(0,r0). Every boundary trace is normalized to unit
L^2(∂Ω) norm here rather than with printed prefactors.
"""
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from pysteklov.errors import ReferenceDomainError

DISK = "disk"
CYLINDER_EVEN = "cylinder-even"
CYLINDER_ODD = "cylinder-odd"
ANNULUS_BRANCH_1 = "annulus-branch-1"
ANNULUS_BRANCH_2 = "annulus-branch-2"


@dataclass(frozen=True)
class ReferenceSpectrumEntry:
    index: int
    sigma: float
    multiplicity: int
    family: str


def diskSpectrum(R: float, k: int) -> float:
    if R <= 0 or k < 0:
        raise ReferenceDomainError("Disk spectrum needs R > 0 and k >= 0")
    return k / R


def diskMode(R: float, k: int, r, theta):
    r = np.asarray(r, dtype=float)
    return (r / R) ** k * np.exp(1j * k * np.asarray(theta)) / math.sqrt(2 * math.pi * R)


def maxErrorUpToPhase(values, expected) -> float:
    """ max |e^{iφ} values - expected| for the single phase φ that best aligns the two. """
    values = np.asarray(values, dtype=complex)
    expected = np.asarray(expected, dtype=complex)
    overlap = np.vdot(values, expected)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(phase * values - expected)))


def diskSpectrumEntries(R: float, count: int) -> List[ReferenceSpectrumEntry]:
    entries = [ReferenceSpectrumEntry(0, 0.0, 1, DISK)]
    k = 1
    while sum(e.multiplicity for e in entries) < count:
        entries.append(ReferenceSpectrumEntry(k, diskSpectrum(R, k), 2, DISK))
        k += 1
    return entries


def annulusPolynomial(r0: float, k: int, sigma):
    q = r0 ** (2 * k)
    return sigma ** 2 - sigma * k * ((1 + r0) / r0) * ((1 + q) / (1 - q)) + k ** 2 / r0


def annulusSpectrum(r0: float, k: int) -> Tuple[float, float]:
    """ The two Steklov eigenvalues of angular frequency k on B(0,1) minus B(0,r0), ascending.
    For k = 0 the first root is the constant mode and the second comes from u = a + b log r. """
    if not 0 < r0 < 1:
        raise ReferenceDomainError("Annulus needs 0 < r0 < 1, got {0}".format(r0))
    if k < 0:
        raise ReferenceDomainError("Annulus frequency must be nonnegative, got {0}".format(k))
    if k == 0:
        return 0.0, (1 + 1 / r0) / math.log(1 / r0)

    q = r0 ** (2 * k)
    b = k * ((1 + r0) / r0) * ((1 + q) / (1 - q))
    c = k ** 2 / r0
    root = math.sqrt(b * b - 4 * c)
    # larger root first to avoid cancellation, then Vieta
    sigma2 = (b + root) / 2
    sigma1 = c / sigma2
    return sigma1, sigma2


def annulusSpectrumEntries(r0: float, count: int) -> List[ReferenceSpectrumEntry]:
    entries = []
    low, high = annulusSpectrum(r0, 0)
    entries.append(ReferenceSpectrumEntry(0, low, 1, ANNULUS_BRANCH_1))
    entries.append(ReferenceSpectrumEntry(0, high, 1, ANNULUS_BRANCH_2))
    k = 1
    while True:
        sigma1, sigma2 = annulusSpectrum(r0, k)
        entries.append(ReferenceSpectrumEntry(k, sigma1, 2, ANNULUS_BRANCH_1))
        entries.append(ReferenceSpectrumEntry(k, sigma2, 2, ANNULUS_BRANCH_2))
        entries.sort(key=lambda e: e.sigma)
        covered = 0
        for entry in entries:
            covered += entry.multiplicity
            if covered >= count:
                break
        # σ_{k,1} ≈ k grows with k: once it passes the count-th value nothing below can change
        if covered >= count and sigma1 > entry.sigma:
            return entries
        k += 1


def _annulusRadialProfile(k: int, sigma: float, r):
    r = np.asarray(r, dtype=float)
    if k == 0:
        if sigma == 0:
            return np.ones_like(r)
        # u = a + b log r with a = b/σ from the outer boundary condition
        return 1 / sigma + np.log(r)
    if sigma == -k:
        raise ReferenceDomainError("Annulus mode coefficient has a pole at sigma = -k")
    return r ** k + ((k - sigma) / (k + sigma)) * r ** (-k)


def annulusModeConstant(r0: float, k: int, sigma: float, samples: int = 64) -> float:
    """ C_{k,σ} fixing the unit L^2 norm of the trace on both circles (trapezoid rule). """
    theta = 2 * np.pi * np.arange(samples) / samples
    outer = _annulusRadialProfile(k, sigma, 1.0) * np.exp(1j * k * theta)
    inner = _annulusRadialProfile(k, sigma, r0) * np.exp(1j * k * theta)
    weight = 2 * np.pi / samples
    normSquared = weight * np.sum(np.abs(outer) ** 2) + r0 * weight * np.sum(np.abs(inner) ** 2)
    return 1 / math.sqrt(normSquared)


def annulusMode(r0: float, k: int, sigma: float, r, theta):
    profile = _annulusRadialProfile(k, sigma, r)
    return annulusModeConstant(r0, k, sigma) * profile * np.exp(1j * k * np.asarray(theta))


def cylinderSpectrum(lam: float) -> Tuple[float, float]:
    """ (λ tanh λ, λ coth λ), the odd branch taking its limit 1 at λ = 0. """
    if lam < 0:
        raise ReferenceDomainError("Cylinder frequency must be nonnegative, got {0}".format(lam))
    if lam == 0:
        return 0.0, 1.0
    return lam * math.tanh(lam), lam / math.tanh(lam)


def cylinderSpectrumEntries(count: int) -> List[ReferenceSpectrumEntry]:
    """ Cross-section the unit circle: λ_k = k, each k ≥ 1 counted twice (e^{±ikx}). """
    entries = []
    k = 0
    while True:
        even, odd = cylinderSpectrum(float(k))
        multiplicity = 1 if k == 0 else 2
        entries.append(ReferenceSpectrumEntry(k, even, multiplicity, CYLINDER_EVEN))
        entries.append(ReferenceSpectrumEntry(k, odd, multiplicity, CYLINDER_ODD))
        entries.sort(key=lambda e: e.sigma)
        covered = 0
        for entry in entries:
            covered += entry.multiplicity
            if covered >= count:
                break
        # both branches of every larger k lie above k tanh k
        if covered >= count and even > entry.sigma:
            return entries
        k += 1


class CylinderMode:
    """
    Steklov eigenfunction of (-1,1)_t x S^1 with cross-section mode (2π)^{-1/2} e^{ikx}:
    cosh(λt)/cosh(λ) (even) or sinh(λt)/sinh(λ) (odd), normalized on the two boundary circles.
    Points are (t, x). Boundary component 0 is t = 1 and component 1 is t = -1.
    """

    def __init__(self, k: int, parity: str = "even"):
        if parity not in ("even", "odd"):
            raise ReferenceDomainError("Cylinder parity must be 'even' or 'odd', got {0}".format(parity))
        self.k = k
        self.lam = float(abs(k))
        self.parity = parity
        even, odd = cylinderSpectrum(self.lam)
        self.sigma = even if parity == "even" else odd
        self.normalization = 1 / math.sqrt(4 * math.pi)

    @property
    def h(self) -> float:
        return 1 / self.sigma if self.sigma > 0 else math.inf

    @property
    def family(self) -> str:
        return CYLINDER_EVEN if self.parity == "even" else CYLINDER_ODD

    def _profile(self, t):
        t = np.asarray(t, dtype=float)
        lam = self.lam
        if lam == 0:
            return np.ones_like(t) if self.parity == "even" else t
        decay = np.exp(lam * (np.abs(t) - 1))
        if self.parity == "even":
            return decay * (1 + np.exp(-2 * lam * np.abs(t))) / (1 + math.exp(-2 * lam))
        return np.sign(t) * decay * (1 - np.exp(-2 * lam * np.abs(t))) / (1 - math.exp(-2 * lam))

    def evaluate(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        t, x = points[:, 0], points[:, 1]
        return self.normalization * self._profile(t) * np.exp(1j * self.k * x)

    def valuesAtFermi(self, footParameters, distance: float, component: int = 0):
        x = np.asarray(footParameters, dtype=float)
        t = 1 - distance if component == 0 else -1 + distance
        return self.normalization * self._profile(np.full_like(x, t)) * np.exp(1j * self.k * x)

    def boundaryTrace(self, N: int, component: int = 0):
        x = 2 * np.pi * np.arange(N) / N
        return self.valuesAtFermi(x, 0.0, component)

    def boundaryMaximum(self) -> float:
        return self.normalization

    def __repr__(self):
        return "CylinderMode(k={0}, {1}, σ={2:.10g})".format(self.k, self.parity, self.sigma)


class CylinderDomain:
    """ (-1,1) x S^1 with its two flat boundary circles; stands in for a Domain wherever only
    boundary curvature is needed. """
    description = "Cylinder (-1,1) x S^1"
    componentCount = 2

    def curvatureInfimum(self) -> Tuple[float, int, float]:
        return 0.0, 0, 0.0

    def curvatureAt(self, footParameter: float, component: int = 0) -> float:
        return 0.0

    def mode(self, k: int, parity: str = "even") -> CylinderMode:
        return CylinderMode(k, parity)

    def interiorGrid(self, spacing: float, maximumHeight: float = 0.9):
        ts = np.arange(-maximumHeight, maximumHeight + spacing / 2, spacing)
        xs = np.arange(0, 2 * np.pi, spacing)
        return np.stack(np.meshgrid(ts, xs), axis=-1).reshape(-1, 2)

    def __repr__(self):
        return self.description


class ExactDecayLaw:
    """ Exact rate function d_exact(t) of a worked example as a function of the distance t to
    the boundary, with its first two Taylor coefficients. """

    def __init__(self, label: str, evaluator: Callable, linear: float, quadratic: float):
        self.label = label
        self._evaluator = evaluator
        self.linear = linear
        self.quadratic = quadratic

    def __call__(self, distance):
        return self._evaluator(np.asarray(distance, dtype=float))

    @classmethod
    def disk(cls, R: float = 1.0):
        return cls("disk R={0:g}".format(R), lambda d: -R * np.log1p(-d / R), 1.0, 1 / (2 * R))

    @classmethod
    def annulusInner(cls, r0: float):
        return cls("annulus inner r0={0:g}".format(r0), lambda d: r0 * np.log1p(d / r0), 1.0, -1 / (2 * r0))

    @classmethod
    def annulusOuter(cls):
        law = cls.disk(1.0)
        law.label = "annulus outer"
        return law

    @classmethod
    def cylinder(cls):
        return cls("cylinder", lambda d: d, 1.0, 0.0)

    def __repr__(self):
        return "ExactDecayLaw({0}: {1:g} t + {2:g} t^2 + ...)".format(self.label, self.linear, self.quadratic)


def exactDecayLaw(example: str, **parameters) -> ExactDecayLaw:
    if example == "disk":
        return ExactDecayLaw.disk(parameters.get("R", 1.0))
    elif example == "annulus_inner":
        return ExactDecayLaw.annulusInner(parameters["r0"])
    elif example == "annulus_outer":
        return ExactDecayLaw.annulusOuter()
    elif example == "cylinder":
        return ExactDecayLaw.cylinder()
    raise ReferenceDomainError("Unknown worked example '{0}'".format(example))
