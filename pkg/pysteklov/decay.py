import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import optimize

from pysteklov.errors import DecayError, DecayFitError, TheoremViolation
from pysteklov.logger import Check, Logger

logger = logging.getLogger(__name__)

underflowLimit = 1e-300
# degree whose low-order coefficients match the Taylor coefficients of the measured rates
TAYLOR_DEGREE = 5


@dataclass
class DecayProfile:
    """
    Samples f(t) = -h log|u_h| along the inward normal ray from one boundary foot point, and
    after fitting, the coefficients a_0, a_1, a_2, ... of f(t) ≈ Σ a_i t^i.
    """
    footParameter: float
    component: int
    h: float
    distances: np.ndarray
    values: np.ndarray
    dropped: List[float] = field(default_factory=list)
    coefficients: Optional[np.ndarray] = None
    residual: Optional[float] = None
    tRange: Optional[Tuple[float, float]] = None
    degree: Optional[int] = None

    @property
    def isFitted(self) -> bool:
        return self.coefficients is not None

    @property
    def wasRefused(self) -> bool:
        return self.residual is not None and self.coefficients is None

    def _coefficient(self, i):
        if self.coefficients is None or i >= len(self.coefficients):
            return None
        return float(self.coefficients[i])

    @property
    def a0(self) -> float:
        return self._coefficient(0)

    @property
    def a1(self) -> float:
        return self._coefficient(1)

    @property
    def a2(self) -> float:
        return self._coefficient(2)

    def fit(self, tRange=(0.02, 0.2), degree: int = 2, residualThreshold: float = 1e-3) -> 'DecayProfile':
        return fitDecay(self, tRange, degree, residualThreshold)

    def display(self, law=None):
        import matplotlib.pyplot as plt
        plt.plot(self.distances, self.values, 'o', label="-h log|u|")
        if self.isFitted:
            t = np.linspace(min(self.distances), max(self.distances), 200)
            plt.plot(t, Polynomial(self.coefficients)(t), label="fit")
        if law is not None:
            t = np.linspace(0, max(self.distances), 200)
            plt.plot(t, law(t) + (self.a0 or 0.0), '--', label=law.label)
        plt.xlabel("Distance to boundary")
        plt.ylabel("Rate")
        plt.legend()
        plt.show()


def _windowHalfWidth(field, footParameter, component):
    domain = getattr(field, "domain", None)
    speed = 1.0
    if domain is not None:
        speed = float(domain.components[component].speed(footParameter))
    # one oscillation period 2πh of arclength in total
    return math.pi * field.h / speed


def _envelope(field, footParameter, distance, component, halfWidth, samples):
    t = footParameter + np.linspace(-halfWidth, halfWidth, samples)
    values = np.abs(field.valuesAtFermi(t, distance, component))
    i = int(np.argmax(values))
    low, high = t[max(i - 1, 0)], t[min(i + 1, samples - 1)]
    result = optimize.minimize_scalar(lambda s: -abs(field.valuesAtFermi([s], distance, component)[0]),
                                      bounds=(low, high), method='bounded', options={'xatol': 1e-10})
    return max(float(values[i]), -float(result.fun))


def sampleNormalRay(field, footParameter: float, distances, component: int = 0, angularWindow: bool = True,
                    windowSamples: int = 33) -> DecayProfile:
    """ Unfitted decay profile. With the angular window, |u| is replaced by its supremum over one
    oscillation period along the parallel curve, which removes the nodal dips of real modes. """
    h = field.h
    if not np.isfinite(h):
        raise DecayError("Decay profiles need a mode with σ > 0")

    kept, values, dropped = [], [], []
    halfWidth = _windowHalfWidth(field, footParameter, component)
    for distance in np.asarray(distances, dtype=float):
        if angularWindow:
            modulus = _envelope(field, footParameter, distance, component, halfWidth, windowSamples)
        else:
            modulus = float(np.abs(field.valuesAtFermi([footParameter], distance, component)[0]))

        if modulus < underflowLimit:
            dropped.append(float(distance))
            continue
        kept.append(distance)
        values.append(-h * math.log(modulus))

    if dropped:
        logger.warning("Dropped {0} sample(s) with |u| below {1:g} at foot t={2:.4f}".format(
            len(dropped), underflowLimit, footParameter))
    return DecayProfile(float(footParameter), component, h, np.array(kept), np.array(values), dropped)


def fitDecay(profile: DecayProfile, tRange=(0.02, 0.2), degree: int = 2,
             residualThreshold: float = 1e-3) -> DecayProfile:
    """
    Least-squares polynomial fit of the profile on tRange with a free intercept. The default is
    the plain quadratic a0 + a1 t + a2 t²; the low-order coefficients of a TAYLOR_DEGREE fit are
    the Taylor coefficients of a curved rate to high accuracy. A fit whose RMS residual exceeds
    the threshold is refused: the returned profile has a residual but no coefficients.
    """
    low, high = tRange
    slack = 1e-12 * max(1.0, abs(high))
    inRange = (profile.distances >= low - slack) & (profile.distances <= high + slack)
    t, f = profile.distances[inRange], profile.values[inRange]
    if len(t) < max(8, degree + 1):
        raise DecayFitError("Decay fit of degree {0} needs at least {1} samples in [{2:g}, {3:g}], got {4}".format(
            degree, max(8, degree + 1), low, high, len(t)))

    polynomial, (_, rank, _, _) = Polynomial.fit(t, f, degree, full=True)
    if rank < degree + 1:
        raise DecayFitError("Rank-deficient decay fit (rank {0} for degree {1})".format(rank, degree))

    residual = float(np.sqrt(np.mean((f - polynomial(t)) ** 2)))
    coefficients = polynomial.convert().coef
    coefficients = np.concatenate([coefficients, np.zeros(max(0, degree + 1 - len(coefficients)))])

    if residual > residualThreshold:
        logger.warning("Refusing decay fit at foot t={0:.4f}: residual {1:.3e} above {2:g}".format(
            profile.footParameter, residual, residualThreshold))
        coefficients = None
    else:
        logger.info("Decay fit at foot t={0:.4f}: a1={1:.6f} a2={2:.6f} residual={3:.2e}".format(
            profile.footParameter, coefficients[1], coefficients[2] if degree >= 2 else 0.0, residual))

    return replace(profile, coefficients=coefficients, residual=residual, tRange=tuple(tRange), degree=degree)


@dataclass
class PredictedConstants:
    """ C = -3/2 + ½ inf Q over the boundary, and the pointwise a(x') = -3/2 + ½ Q(x'). In two
    dimensions the fiber infimum of the second fundamental form is the curvature itself. """
    domain: object
    infimumCurvature: float
    infimumComponent: int
    infimumParameter: float

    @property
    def globalConstant(self) -> float:
        return -1.5 + 0.5 * self.infimumCurvature

    @property
    def sharpQuadratic(self) -> float:
        return 0.5 * self.infimumCurvature

    def footConstant(self, footParameter: float, component: int = 0) -> float:
        return -1.5 + 0.5 * self.domain.curvatureAt(footParameter, component)

    def sharpQuadraticAt(self, footParameter: float, component: int = 0) -> float:
        return 0.5 * self.domain.curvatureAt(footParameter, component)


def predictedConstants(domain) -> PredictedConstants:
    value, component, t = domain.curvatureInfimum()
    return PredictedConstants(domain, value, component, t)


def profileLabel(profile: DecayProfile) -> str:
    return "c{0} t={1:.4f} h={2:.4g}".format(profile.component, profile.footParameter, profile.h)


class Theorem1Report:
    """ Outcome of the first-order sharpness and quadratic lower bound checks on fitted profiles. """

    def __init__(self, constants: PredictedConstants, delta: float, checks: Logger, h: float = None):
        self.constants = constants
        self.delta = delta
        self.h = h
        self._logger = checks

    @property
    def checks(self) -> List[Check]:
        return self._logger.getChecks()

    def checksFor(self, profile: DecayProfile) -> List[Check]:
        return self._logger.getChecks(profileLabel(profile))

    @property
    def failedChecks(self) -> List[Check]:
        return self._logger.failedChecks()

    @property
    def passed(self) -> bool:
        return self._logger.allPassed()

    def raiseIfFailed(self):
        if not self.passed:
            raise TheoremViolation(self.failedChecks)

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "h": self.h,
            "delta": self.delta,
            "C": self.constants.globalConstant,
            "checks": [c.asDict() for c in self.checks]
        }


def verifyTheorem1(domain, mode, profiles: List[DecayProfile], delta: float = 0.05,
                   linearTolerance: float = 0.01) -> Theorem1Report:
    """
    Checks every fitted profile against the decay bound: a1 = 1 within linearTolerance, a2 at
    least C - δ, and a2 at least the pointwise constant a(x') - δ of the foot point.
    The mode only labels the report and may be None.
    """
    constants = predictedConstants(domain)
    checks = Logger()
    for profile in profiles:
        label = profileLabel(profile)
        if not profile.isFitted:
            checks.logCheck(Check("fit " + label, None, 0.0), label)
            continue
        footConstant = constants.footConstant(profile.footParameter, profile.component)
        checks.logChecks([
            Check("a1 " + label, profile.a1, 1.0, linearTolerance),
            Check("a2 >= C - delta " + label, profile.a2, constants.globalConstant - delta, kind="lower_bound"),
            Check("a2 >= a(x') - delta " + label, profile.a2, footConstant - delta, kind="lower_bound")
        ], label)

    h = getattr(mode, "h", None) if mode is not None else None
    report = Theorem1Report(constants, delta, checks, h)
    if report.passed:
        logger.info("Decay bound verified on {0} profile(s) of {1}".format(len(profiles), domain))
    else:
        logger.warning("{0} decay check(s) failed on {1}".format(len(report.failedChecks), domain))
    return report


def quadraticLawCheck(profile: DecayProfile, law, relativeTolerance: float = 0.05,
                      absoluteTolerance: float = 0.05) -> Check:
    """ Fitted a2 against the quadratic coefficient of an exact decay law. """
    tolerance = max(relativeTolerance * abs(law.quadratic), absoluteTolerance if law.quadratic == 0 else 0.0)
    return Check("a2 = {0}".format(law.label), profile.a2, law.quadratic, tolerance)
