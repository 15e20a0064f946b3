import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy import optimize

from pysteklov.errors import GeometryError, PointNotInsideError, FoldingWarning

logger = logging.getLogger(__name__)

twoPi = 2 * np.pi


class BoundaryCurve:
    """
    A closed, regular, 2π-periodic parametrization t -> q(t) of one boundary component.
    Subclasses provide the counterclockwise parametrization and its first two derivatives
    analytically; a clockwise curve is the same curve traversed with t -> -t.

    With the convention "outer components counterclockwise, inner components clockwise",
    the right-hand normal (q'_y, -q'_x)/|q'| always points out of the domain and the signed
    curvature is +1/R on the boundary of a disk and -1/r0 on the inner circle of an annulus.
    """
    speedTolerance = 1e-13
    quadratureNodes = 512

    def __init__(self, clockwise: bool = False, description: str = None):
        self.clockwise = clockwise
        self.description = description or type(self).__name__
        self._speedCoefficients = None

    def _position(self, t):
        raise NotImplementedError()

    def _velocity(self, t):
        raise NotImplementedError()

    def _acceleration(self, t):
        raise NotImplementedError()

    def point(self, t):
        t = np.asarray(t, dtype=float)
        if self.clockwise:
            return self._position(np.mod(-t, twoPi))
        return self._position(np.mod(t, twoPi))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.clockwise:
            return -self._velocity(np.mod(-t, twoPi))
        return self._velocity(np.mod(t, twoPi))

    def secondDerivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.clockwise:
            return self._acceleration(np.mod(-t, twoPi))
        return self._acceleration(np.mod(t, twoPi))

    def speed(self, t):
        return np.linalg.norm(self.derivative(t), axis=-1)

    def tangent(self, t):
        dq = self.derivative(t)
        return dq / np.linalg.norm(dq, axis=-1, keepdims=True)

    def outwardNormal(self, t):
        dq = self.derivative(t)
        normal = np.stack([dq[..., 1], -dq[..., 0]], axis=-1)
        return normal / np.linalg.norm(dq, axis=-1, keepdims=True)

    def inwardNormal(self, t):
        return -self.outwardNormal(t)

    def curvature(self, t):
        dq = self.derivative(t)
        ddq = self.secondDerivative(t)
        speed = np.linalg.norm(dq, axis=-1)
        if np.any(speed < self.speedTolerance):
            raise GeometryError("Degenerate parametrization of {0}: |q'| below {1}".format(
                self.description, self.speedTolerance))
        cross = dq[..., 0] * ddq[..., 1] - dq[..., 1] * ddq[..., 0]
        return cross / speed ** 3

    def nodes(self, N: int):
        return twoPi * np.arange(N) / N

    @property
    def speedCoefficients(self):
        if self._speedCoefficients is None:
            M = self.quadratureNodes
            self._speedCoefficients = np.fft.fft(self.speed(self.nodes(M))) / M
        return self._speedCoefficients

    @property
    def length(self) -> float:
        return float(twoPi * self.speedCoefficients[0].real)

    def arclength(self, t):
        """ s(t) measured from t = 0, by term-wise integration of the Fourier series of |q'|. """
        t = np.asarray(t, dtype=float)
        c = self.speedCoefficients
        M = len(c)
        m = np.fft.fftfreq(M, d=1.0 / M)
        nonZero = m != 0
        phases = np.exp(1j * np.multiply.outer(t, m[nonZero]))
        periodic = ((phases - 1) / (1j * m[nonZero])) @ c[nonZero]
        return c[0].real * t + periodic.real

    def parameterAtArclength(self, s, tolerance=1e-13):
        s = np.asarray(s, dtype=float)
        L = self.length
        t = twoPi * s / L
        for _ in range(50):
            step = (self.arclength(t) - s) / self.speed(t)
            t = t - step
            if np.max(np.abs(step), initial=0) < tolerance:
                break
        return t

    def totalTurning(self, N: int = 256) -> float:
        t = self.nodes(N)
        return float(np.sum(self.curvature(t) * self.speed(t)) * twoPi / N)

    def minimumCurvatureRadius(self, samples: int = 1024) -> float:
        maxCurvature = np.max(np.abs(self.curvature(self.nodes(samples))))
        if maxCurvature == 0:
            return math.inf
        return float(1 / maxCurvature)

    def infimumCurvature(self, samples: int = 1024) -> Tuple[float, float]:
        """ Returns (inf κ, t realizing it) by dense sampling then bounded refinement. """
        t = self.nodes(samples)
        kappa = self.curvature(t)
        i = int(np.argmin(kappa))
        delta = twoPi / samples
        result = optimize.minimize_scalar(lambda s: float(self.curvature(s)), bounds=(t[i] - delta, t[i] + delta),
                                          method='bounded', options={'xatol': 1e-12})
        if result.success and result.fun < kappa[i]:
            return float(result.fun), float(np.mod(result.x, twoPi))
        return float(kappa[i]), float(t[i])

    def __repr__(self):
        orientation = "cw" if self.clockwise else "ccw"
        return "{0} ({1})".format(self.description, orientation)


class Circle(BoundaryCurve):
    def __init__(self, radius: float = 1.0, center=(0.0, 0.0), clockwise: bool = False):
        if radius <= 0:
            raise GeometryError("Circle radius must be positive, got {0}".format(radius))
        super(Circle, self).__init__(clockwise, description="Circle R={0:g}".format(radius))
        self.radius = radius
        self.center = np.asarray(center, dtype=float)

    def _position(self, t):
        return self.center + self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def _velocity(self, t):
        return self.radius * np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def _acceleration(self, t):
        return -self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)


class Ellipse(BoundaryCurve):
    def __init__(self, a: float, b: float, center=(0.0, 0.0), clockwise: bool = False):
        if a <= 0 or b <= 0:
            raise GeometryError("Ellipse semi-axes must be positive, got a={0} b={1}".format(a, b))
        super(Ellipse, self).__init__(clockwise, description="Ellipse a={0:g} b={1:g}".format(a, b))
        self.a = a
        self.b = b
        self.center = np.asarray(center, dtype=float)

    def _position(self, t):
        return self.center + np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def _velocity(self, t):
        return np.stack([-self.a * np.sin(t), self.b * np.cos(t)], axis=-1)

    def _acceleration(self, t):
        return -np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)


class RadialFourierCurve(BoundaryCurve):
    """ Star-shaped curve q(θ) = r(θ)(cos θ, sin θ) with
    r(θ) = c_0 + Σ_{m≥1} c_m cos(mθ) + s_m sin(mθ). Derivatives are taken term by term. """

    def __init__(self, cosines, sines=(), center=(0.0, 0.0), clockwise: bool = False):
        super(RadialFourierCurve, self).__init__(clockwise, description="Radial Fourier curve")
        self.cosines = np.asarray(cosines, dtype=float)
        sines = np.asarray(sines, dtype=float)
        if len(self.cosines) == 0:
            raise GeometryError("Radial Fourier curve needs at least the mean radius c_0")
        order = max(len(self.cosines), len(sines) + 1)
        self.cosines = np.pad(self.cosines, (0, order - len(self.cosines)))
        self.sines = np.zeros(order)
        self.sines[1:len(sines) + 1] = sines
        self.center = np.asarray(center, dtype=float)

        if np.min(self._radius(self.nodes(4096), 0)) <= 0:
            raise GeometryError("Radial Fourier curve must have a positive radius everywhere")

    def _radius(self, t, derivative: int):
        m = np.arange(len(self.cosines))
        mt = np.multiply.outer(t, m)
        # d^n/dt^n of (c cos + s sin) cycles through four phases
        phase = derivative % 4
        if phase == 0:
            terms = self.cosines * np.cos(mt) + self.sines * np.sin(mt)
        elif phase == 1:
            terms = -self.cosines * np.sin(mt) + self.sines * np.cos(mt)
        elif phase == 2:
            terms = -self.cosines * np.cos(mt) - self.sines * np.sin(mt)
        else:
            terms = self.cosines * np.sin(mt) - self.sines * np.cos(mt)
        return np.sum(terms * m.astype(float) ** derivative, axis=-1)

    def _position(self, t):
        r = self._radius(t, 0)
        return self.center + r[..., None] * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def _velocity(self, t):
        r, dr = self._radius(t, 0), self._radius(t, 1)
        radial = np.stack([np.cos(t), np.sin(t)], axis=-1)
        angular = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        return dr[..., None] * radial + r[..., None] * angular

    def _acceleration(self, t):
        r, dr, ddr = self._radius(t, 0), self._radius(t, 1), self._radius(t, 2)
        radial = np.stack([np.cos(t), np.sin(t)], axis=-1)
        angular = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        return (ddr - r)[..., None] * radial + 2 * dr[..., None] * angular


@dataclass(frozen=True)
class FermiPoint:
    component: int
    footParameter: float
    distance: float
    position: np.ndarray = field(repr=False)
    mayFold: bool = False


class Domain:
    """
    A bounded planar domain given by its boundary components. The first component is the outer
    boundary (counterclockwise); holes are clockwise so that every component's right-hand
    normal points out of the domain.
    """
    seedSamples = 1024

    def __init__(self, components: List[BoundaryCurve], description: str = ""):
        if len(components) == 0:
            raise GeometryError("A domain needs at least one boundary component")
        self.components = list(components)
        self.description = description
        self._checkComponentsAreDisjoint()

    @classmethod
    def disk(cls, radius: float = 1.0):
        return cls([Circle(radius)], description="Disk R={0:g}".format(radius))

    @classmethod
    def ellipse(cls, a: float, b: float):
        return cls([Ellipse(a, b)], description="Ellipse a={0:g} b={1:g}".format(a, b))

    @classmethod
    def annulus(cls, innerRadius: float, outerRadius: float = 1.0):
        if not 0 < innerRadius < outerRadius:
            raise GeometryError("Annulus needs 0 < r0 < R, got r0={0} R={1}".format(innerRadius, outerRadius))
        return cls([Circle(outerRadius), Circle(innerRadius, clockwise=True)],
                   description="Annulus r0={0:g} R={1:g}".format(innerRadius, outerRadius))

    @classmethod
    def radialFourier(cls, cosines, sines=()):
        return cls([RadialFourierCurve(cosines, sines)], description="Radial Fourier domain")

    def _checkComponentsAreDisjoint(self):
        samples = [c.point(c.nodes(256)) for c in self.components]
        scale = self.diameter
        for i in range(len(samples)):
            for j in range(i + 1, len(samples)):
                gaps = np.linalg.norm(samples[i][:, None, :] - samples[j][None, :, :], axis=-1)
                if np.min(gaps) < 1e-8 * scale:
                    raise GeometryError("Boundary components {0} and {1} intersect".format(i, j))

    @property
    def boundingBox(self) -> Tuple[np.ndarray, np.ndarray]:
        points = np.concatenate([c.point(c.nodes(self.seedSamples)) for c in self.components])
        return points.min(axis=0), points.max(axis=0)

    @property
    def diameter(self) -> float:
        points = np.concatenate([c.point(c.nodes(256)) for c in self.components])
        differences = points[:, None, :] - points[None, :, :]
        return float(np.sqrt(np.max(np.sum(differences ** 2, axis=-1))))

    @property
    def totalLength(self) -> float:
        return sum(c.length for c in self.components)

    def reach(self) -> float:
        return min(c.minimumCurvatureRadius() for c in self.components)

    def curvatureInfimum(self) -> Tuple[float, int, float]:
        """ inf over the whole boundary of the signed curvature, with the component and parameter. """
        best = None
        for index, component in enumerate(self.components):
            value, t = component.infimumCurvature()
            if best is None or value < best[0]:
                best = (value, index, t)
        return best

    def curvatureAt(self, footParameter: float, component: int = 0) -> float:
        return float(self.components[component].curvature(footParameter))

    def _closestOnComponent(self, point, component: BoundaryCurve) -> Tuple[float, float]:
        t = component.nodes(self.seedSamples)
        samples = component.point(t)
        seed = t[int(np.argmin(np.sum((samples - point) ** 2, axis=-1)))]

        tFoot = seed
        converged = False
        for _ in range(50):
            r = component.point(tFoot) - point
            dq = component.derivative(tFoot)
            ddq = component.secondDerivative(tFoot)
            slope = np.dot(dq, dq) + np.dot(r, ddq)
            if slope <= 0:
                break
            step = np.dot(r, dq) / slope
            tFoot -= step
            if abs(step) < 1e-12:
                converged = True
                break

        if not converged or abs(tFoot - seed) > twoPi / self.seedSamples:
            delta = twoPi / self.seedSamples
            result = optimize.minimize_scalar(lambda s: float(np.sum((component.point(s) - point) ** 2)),
                                              bounds=(seed - delta, seed + delta), method='bounded',
                                              options={'xatol': 1e-13})
            tFoot = result.x

        tFoot = float(np.mod(tFoot, twoPi))
        return float(np.linalg.norm(component.point(tFoot) - point)), tFoot

    def closestBoundaryPoint(self, point) -> FermiPoint:
        """ Nearest boundary point with the signed distance (positive inside). """
        point = np.asarray(point, dtype=float)
        best = None
        for index, component in enumerate(self.components):
            d, tFoot = self._closestOnComponent(point, component)
            if best is None or d < best[0]:
                best = (d, index, tFoot)

        d, index, tFoot = best
        component = self.components[index]
        side = np.dot(point - component.point(tFoot), component.inwardNormal(tFoot))
        signedDistance = d if side >= 0 else -d
        return FermiPoint(index, tFoot, signedDistance, point)

    def contains(self, point) -> bool:
        return self.closestBoundaryPoint(point).distance > 1e-14 * self.diameter

    def distanceToBoundary(self, point) -> Tuple[float, FermiPoint]:
        foot = self.closestBoundaryPoint(point)
        if foot.distance <= 1e-14 * self.diameter:
            raise PointNotInsideError(point, foot.distance)
        return foot.distance, foot

    def fermiToCartesian(self, footParameter: float, distance: float, component: int = 0) -> FermiPoint:
        if distance < 0:
            raise GeometryError("Fermi normal coordinate must be nonnegative, got {0}".format(distance))
        curve = self.components[component]
        position = curve.point(footParameter) + distance * curve.inwardNormal(footParameter)
        mayFold = distance > 0.5 * curve.minimumCurvatureRadius()
        if mayFold:
            warnings.warn("Fermi distance {0:.4g} exceeds half the minimal curvature radius of {1}: "
                          "coordinates may fold".format(distance, curve), FoldingWarning)
        return FermiPoint(component, float(footParameter), float(distance), position, mayFold)

    def approximateDistances(self, points, samplesPerComponent: int = 2048) -> Tuple[np.ndarray, np.ndarray]:
        """ Vectorized distance to a dense boundary sampling and inside flags from the nearest
        sample's inward normal. Accurate to O(spacing²/radius) for points away from the boundary. """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        samples, normals = [], []
        for component in self.components:
            t = component.nodes(samplesPerComponent)
            samples.append(component.point(t))
            normals.append(component.inwardNormal(t))
        samples = np.concatenate(samples)
        normals = np.concatenate(normals)

        distances = np.empty(len(points))
        inside = np.empty(len(points), dtype=bool)
        for start in range(0, len(points), 256):
            chunk = points[start:start + 256]
            offsets = chunk[:, None, :] - samples[None, :, :]
            d2 = np.sum(offsets ** 2, axis=-1)
            nearest = np.argmin(d2, axis=1)
            rows = np.arange(len(chunk))
            distances[start:start + 256] = np.sqrt(d2[rows, nearest])
            inside[start:start + 256] = np.sum(offsets[rows, nearest] * normals[nearest], axis=-1) > 0
        return distances, inside

    def interiorGrid(self, spacing: float, minimumDistance: float = 0.0) -> np.ndarray:
        low, high = self.boundingBox
        xs = np.arange(low[0] + spacing / 2, high[0], spacing)
        ys = np.arange(low[1] + spacing / 2, high[1], spacing)
        points = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
        distances, inside = self.approximateDistances(points)
        return points[inside & (distances >= minimumDistance)]

    def validateNormals(self, samples: int = 64):
        step = 1e-6 * self.diameter
        for index, component in enumerate(self.components):
            for t in component.nodes(samples):
                inward = component.point(t) + step * component.inwardNormal(t)
                outward = component.point(t) - step * component.inwardNormal(t)
                if not self.contains(inward) or self.contains(outward):
                    raise GeometryError("Inward normal of component {0} at t={1:.4f} does not point into "
                                        "the domain".format(index, t))

    def __repr__(self):
        return "Domain '{0}' with {1} component(s)".format(self.description, len(self.components))
