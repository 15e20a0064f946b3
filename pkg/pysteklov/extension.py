import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from pysteklov.dtn import SteklovMode, fourierUpsample
from pysteklov.errors import ExtensionError, TooCloseToBoundaryError, PointNotInsideError

logger = logging.getLogger(__name__)

twoPi = 2 * np.pi


class ExtensionField:
    """
    Harmonic extension u = σ S[φ] - D[φ] of a Steklov mode, from Green's identity with the
    Neumann data σφ. Both boundary integrals use the trapezoid rule on an FFT-upsampled copy
    of the trace, which stays accurate down to d_min = 6 L / (upsampling N) from the boundary.
    """

    def __init__(self, mode: SteklovMode, upsampling: int = 8, threads: int = 1, chunkSize: int = 256):
        if upsampling < 1:
            raise ExtensionError("Upsampling factor must be at least 1, got {0}".format(upsampling))
        self.mode = mode
        self.upsampling = upsampling
        self.threads = threads or os.cpu_count()
        self.chunkSize = chunkSize

        operators = mode.operators
        domain = operators.domain
        fineCount = upsampling * operators.N
        t = twoPi * np.arange(fineCount) / fineCount

        self._nodes = np.concatenate([c.point(t) for c in domain.components])
        self._normals = np.concatenate([c.outwardNormal(t) for c in domain.components])
        weights = np.concatenate([twoPi / fineCount * c.speed(t) for c in domain.components])
        self._trace = np.concatenate([fourierUpsample(mode.componentTrace(c), upsampling)
                                      for c in range(len(domain.components))])
        self._weightedTrace = weights * self._trace

        self.dMin = 6 * max(c.length for c in domain.components) / fineCount

    @property
    def h(self) -> float:
        return self.mode.h

    @property
    def sigma(self) -> float:
        return self.mode.sigma

    @property
    def domain(self):
        return self.mode.domain

    def _layerPotentialsChunk(self, points):
        offsets = points[:, None, :] - self._nodes[None, :, :]
        d2 = np.sum(offsets ** 2, axis=-1)
        singleLayer = -np.log(d2) / (4 * np.pi)
        doubleLayer = np.sum(offsets * self._normals[None, :, :], axis=-1) / d2 / twoPi
        return singleLayer @ self._weightedTrace, doubleLayer @ self._weightedTrace

    def _evaluateChunk(self, points):
        singleLayer, doubleLayer = self._layerPotentialsChunk(points)
        return self.sigma * singleLayer - doubleLayer

    def layerPotentials(self, points, checkDistances: bool = True):
        """ (S[φ], D[φ]) at interior points, so that u = σ S[φ] - D[φ]. """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if checkDistances:
            self.checkPoints(points)
        return self._layerPotentialsChunk(points)

    def checkPoints(self, points):
        distances = np.empty(len(points))
        inside = np.empty(len(points), dtype=bool)
        for start in range(0, len(points), self.chunkSize):
            chunk = points[start:start + self.chunkSize]
            offsets = chunk[:, None, :] - self._nodes[None, :, :]
            d2 = np.sum(offsets ** 2, axis=-1)
            nearest = np.argmin(d2, axis=1)
            rows = np.arange(len(chunk))
            distances[start:start + self.chunkSize] = np.sqrt(d2[rows, nearest])
            inside[start:start + self.chunkSize] = np.sum(offsets[rows, nearest] * self._normals[nearest],
                                                          axis=-1) < 0

        if not np.all(inside):
            first = int(np.argmin(inside))
            raise PointNotInsideError(points[first], -distances[first])

        tooClose = distances < self.dMin
        if np.any(tooClose):
            raise TooCloseToBoundaryError(points[tooClose], distances[tooClose], self.dMin)
        return distances

    def evaluate(self, points, checkDistances: bool = True):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if checkDistances:
            self.checkPoints(points)

        chunks = [points[start:start + self.chunkSize] for start in range(0, len(points), self.chunkSize)]
        if self.threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                values = list(executor.map(self._evaluateChunk, chunks))
        else:
            values = [self._evaluateChunk(chunk) for chunk in chunks]
        return np.concatenate(values)

    def valuesAtFermi(self, footParameters, distance: float, component: int = 0):
        """ u at the points q(t) + distance·ν_inward(t) for every foot parameter t; the boundary
        trace itself when distance is 0. """
        footParameters = np.atleast_1d(np.asarray(footParameters, dtype=float))
        if distance == 0:
            return self.mode.traceAt(footParameters, component)
        if distance < self.dMin:
            curve = self.domain.components[component]
            raise TooCloseToBoundaryError(curve.point(footParameters), np.full(len(footParameters), distance),
                                          self.dMin)
        curve = self.domain.components[component]
        points = curve.point(footParameters) + distance * curve.inwardNormal(footParameters)
        return self.evaluate(points)

    def boundaryMaximum(self) -> float:
        return float(np.max(np.abs(self._trace)))

    def __repr__(self):
        return "ExtensionField({0}, upsampling={1}, d_min={2:.4g})".format(self.mode, self.upsampling, self.dMin)


@dataclass
class MaximumPrincipleReport:
    interiorMaximum: float
    boundaryMaximum: float
    tolerance: float

    @property
    def ratio(self) -> float:
        return self.interiorMaximum / self.boundaryMaximum

    @property
    def passed(self) -> bool:
        return self.ratio <= 1 + self.tolerance


def maxPrincipleCheck(field, points, tolerance: float = 1e-6) -> MaximumPrincipleReport:
    """ Compares max |u| over interior points with max |φ| on the boundary. Works for an
    ExtensionField or a closed-form mode exposing evaluate() and boundaryMaximum(). """
    values = np.abs(field.evaluate(points))
    report = MaximumPrincipleReport(float(np.max(values)), field.boundaryMaximum(), tolerance)
    if not report.passed:
        logger.warning("Maximum principle violated by {0}: ratio {1:.8f}".format(field, report.ratio))
    else:
        logger.info("Maximum principle ratio {0:.8f} over {1} points".format(report.ratio, len(values)))
    return report
