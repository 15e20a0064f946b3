import logging
import math
import signal
import time
from typing import List

import numpy as np

from pysteklov.config import ExperimentConfig
from pysteklov.decay import sampleNormalRay, verifyTheorem1, quadraticLawCheck
from pysteklov.dtn import LayerOperators, SteklovMode, SteklovSpectrum
from pysteklov.errors import ConfigError
from pysteklov.extension import ExtensionField, maxPrincipleCheck
from pysteklov.fbi import PhaseSpaceTable, fbiGeoCircle, fbiHolCircle, fbiOfComputedMode, WeightSpec, HOL
from pysteklov.logger import Check, Logger
from pysteklov.reference import (CylinderMode, diskMode, diskSpectrumEntries, annulusSpectrumEntries,
                                 cylinderSpectrumEntries, exactDecayLaw, maxErrorUpToPhase)
from pysteklov.results import ResultWriter, readPoints

logger = logging.getLogger(__name__)

COMMANDS = ("spectrum", "extend", "fbi", "decay-fit", "verify")


class Experiment:
    """
    Application context of one configured run: builds the domain and its spectrum once, runs
    the requested pipelines, accumulates their checks and writes CSV and JSON artifacts.
    """

    def __init__(self, config: ExperimentConfig, outputDirectory: str = None, threads: int = 1):
        self.config = config
        self.outputDirectory = outputDirectory or config.get("output", "directory")
        self.threads = threads
        self.writer = ResultWriter(self.outputDirectory)
        self.checks = Logger()
        self.startTime = None
        self._domain = None
        self._operators = None
        self._spectrum = None

    @property
    def isCylinder(self) -> bool:
        return self.config.isCylinder

    @property
    def domain(self):
        if self._domain is None:
            self._domain = self.config.buildDomain()
            if not self.isCylinder:
                self._domain.validateNormals()
        return self._domain

    @property
    def operators(self) -> LayerOperators:
        if self._operators is None:
            self._operators = LayerOperators.assemble(self.domain, self.config.get("solver", "n"),
                                                      self.config.get("solver", "capacity_scale"))
        return self._operators

    @property
    def spectrum(self) -> SteklovSpectrum:
        if self._spectrum is None:
            self._spectrum = self.operators.solve(self.config.get("solver", "n_modes"),
                                                  self.config.get("solver", "cluster_tolerance"))
        return self._spectrum

    def run(self, command: str) -> bool:
        dispatch = {"spectrum": self.runSpectrum, "extend": self.runExtend, "fbi": self.runFbi,
                    "decay-fit": self.runDecayFit, "verify": self.runVerify}
        if command not in dispatch:
            raise ConfigError("Unknown command '{0}', expected one of {1}".format(command, ", ".join(COMMANDS)))

        from pysteklov import __version__
        self._startCalculation()
        self.config.writeResolved(self.writer.path("config.json"))
        passed = dispatch[command]()
        elapsed = self._completeCalculation()
        self.writer.writeMetadata(command, __version__, self.config.path)
        logger.info("'{0}' finished in {1:.1f} s: {2}".format(command, elapsed, "passed" if passed else "FAILED"))
        return passed

    def _cylinderMode(self) -> CylinderMode:
        return CylinderMode(int(round(self.config.get("domain", "lambda"))), self.config.get("decay", "parity"))

    def _selectMode(self, sigma: float, component: int = None) -> SteklovMode:
        """ Rotating mode nearest to sigma. With several boundary components, eigenvalues of modes
        living on different components can be within a few 1e-5 of each other: every cluster
        within 2% of sigma is considered and the one concentrated on `component` wins. """
        spectrum = self.spectrum
        sigmas = spectrum.sigmas
        index = int(np.argmin(np.abs(sigmas - sigma)))
        if component is None or self.operators.componentCount == 1:
            return spectrum.rotatingMode(index)

        window = 0.02 * max(1.0, sigma)
        best, bestScore = None, None
        for cluster in spectrum.clusters():
            if not np.any(np.abs(sigmas[cluster] - sigma) <= window) and index not in cluster:
                continue
            mode = spectrum.concentratedMode(cluster[0], component, rotating=True)
            score = (mode.componentMass(component) > 0.9, -abs(mode.sigma - sigma))
            if bestScore is None or score > bestScore:
                best, bestScore = mode, score
        logger.debug("Selected {0} on component {1} for target σ={2:g}".format(best, component, sigma))
        return best

    def _isSelected(self, mode) -> bool:
        indices = self.config.get("modes", "indices")
        low = self.config.get("modes", "sigma_min")
        high = self.config.get("modes", "sigma_max")
        if indices is not None and mode.index not in indices:
            return False
        if low is not None and mode.sigma < low:
            return False
        if high is not None and mode.sigma > high:
            return False
        return True

    def _stageSummary(self, stage: str, **extra) -> dict:
        checks = self.checks.getChecks(stage)
        summary = {"passed": all(c.passed for c in checks), "checks": [c.asDict() for c in checks]}
        summary.update(extra)
        return summary

    def runSpectrum(self) -> bool:
        stage = "spectrum"
        count = self.config.get("solver", "n_modes")
        header = ["index", "sigma", "multiplicity_estimate", "residual"]

        if self.isCylinder:
            rows, index = [], 0
            for entry in cylinderSpectrumEntries(count):
                for _ in range(entry.multiplicity):
                    if index < count:
                        rows.append([index, entry.sigma, entry.multiplicity, 0.0])
                    index += 1
            self.writer.writeCsv("spectrum.csv", header, rows)
            self.writer.writeJson("spectrum.json", self._stageSummary(stage, domain=str(self.domain)))
            return True

        spectrum = self.spectrum
        multiplicities = spectrum.multiplicityEstimates()
        rows = [[m.index, m.sigma, multiplicity, m.residual]
                for m, multiplicity in zip(spectrum, multiplicities) if self._isSelected(m)]
        self.writer.writeCsv("spectrum.csv", header, rows)

        self.checks.logChecks(self._spectrumChecks(spectrum), stage)
        self.writer.writeJson("spectrum.json", self._stageSummary(stage, domain=str(self.domain),
                                                                  n=self.operators.N, modes=len(spectrum)))
        return self.checks.allPassed()

    def _referenceSigmas(self, count: int):
        kind = self.config.get("domain", "kind")
        radius = self.config.get("domain", "radius")
        if kind == "circle":
            entries = diskSpectrumEntries(radius, count)
        elif kind == "annulus":
            entries = annulusSpectrumEntries(self.config.get("domain", "r0") / radius, count)
        else:
            return None
        sigmas = []
        for entry in entries:
            sigmas.extend([entry.sigma / radius] * entry.multiplicity)
        return np.array(sorted(sigmas)[:count])

    def _spectrumChecks(self, spectrum: SteklovSpectrum) -> List[Check]:
        checks = []
        sigmas = spectrum.sigmas
        reference = self._referenceSigmas(len(sigmas))
        if reference is not None:
            error = float(np.max(np.abs(sigmas - reference)))
            checks.append(Check("max |sigma - sigma_ref|", error, self.config.get("solver", "oracle_tolerance"),
                                kind="upper_bound"))

        checks.append(Check("smallest sigma", float(sigmas[0]), 0.0, 1e-8))

        operators = self.operators
        traces = np.stack([m.trace for m in spectrum], axis=1)
        gram = traces.conj().T @ (operators.weights[:, None] * traces)
        checks.append(Check("trace orthonormality", float(np.max(np.abs(gram - np.eye(len(spectrum))))), 1e-8,
                            kind="upper_bound"))

        for index, curve in enumerate(self.domain.components):
            expected = -2 * math.pi if curve.clockwise else 2 * math.pi
            checks.append(Check("total turning c{0}".format(index), curve.totalTurning(operators.N), expected, 1e-8))

        rng = np.random.default_rng(self.config.get("output", "seed"))
        f, g = self._randomTrigonometric(rng), self._randomTrigonometric(rng)
        left = operators.innerProduct(operators.apply(f), g)
        right = operators.innerProduct(f, operators.apply(g))
        checks.append(Check("DtN self-adjointness", float(abs(left - right)),
                            self.config.get("solver", "self_adjoint_tolerance"), kind="upper_bound"))
        return checks

    def _randomTrigonometric(self, rng, order: int = 8):
        t = self.operators.parameters
        values = np.zeros(self.operators.size)
        for k in range(1, order + 1):
            a, b = rng.standard_normal(2)
            values += (a * np.cos(k * t) + b * np.sin(k * t)) / k
        return values

    def runExtend(self) -> bool:
        stage = "extend"
        spacing = self.config.get("extension", "grid_spacing")
        pointsPath = self.config.get("extension", "points")
        tolerance = self.config.get("extension", "tolerance")

        if self.isCylinder:
            field = self._cylinderMode()
            points = readPoints(pointsPath) if pointsPath else self.domain.interiorGrid(spacing)
        else:
            mode = self._extensionMode()
            field = ExtensionField(mode, self.config.get("extension", "upsampling"), self.threads)
            minimumDistance = max(self.config.get("extension", "minimum_distance"), field.dMin)
            points = readPoints(pointsPath) if pointsPath else self.domain.interiorGrid(spacing, minimumDistance)

        values = field.evaluate(points)
        rows = [[x, y, u.real, u.imag, abs(u)] for (x, y), u in zip(points, values)]
        self.writer.writeCsv("extend.csv", ["x", "y", "re_u", "im_u", "abs_u"], rows)

        report = maxPrincipleCheck(field, points, tolerance)
        self.checks.logCheck(Check("max principle ratio", report.ratio, 1 + tolerance, kind="upper_bound"), stage)
        if self.config.get("domain", "kind") == "circle":
            self.checks.logCheck(self._diskExtensionCheck(field, points, values), stage)

        self.writer.writeJson("extend.json", self._stageSummary(stage, field=str(field), points=len(points)))
        return all(c.passed for c in self.checks.getChecks(stage))

    def _extensionMode(self) -> SteklovMode:
        """ Mode at [extension] mode_index when set, otherwise the one nearest mode_sigma. """
        index = self.config.get("extension", "mode_index")
        if index is None:
            return self._selectMode(self.config.get("extension", "mode_sigma"))
        if not 0 <= index < len(self.spectrum):
            raise ConfigError("Extension mode_index {0} outside the {1} computed modes".format(
                index, len(self.spectrum)), path=self.config.path)
        return self.spectrum.rotatingMode(index)

    def _diskExtensionCheck(self, field: ExtensionField, points, values) -> Check:
        radius = self.config.get("domain", "radius")
        k = int(round(field.sigma * radius))
        r = np.linalg.norm(points, axis=1)
        theta = np.arctan2(points[:, 1], points[:, 0])
        expected = diskMode(radius, k, r, theta)
        error = maxErrorUpToPhase(values, expected) / float(np.max(np.abs(expected)))
        return Check("disk extension relative error k={0}".format(k), error,
                     self.config.get("extension", "oracle_tolerance"), kind="upper_bound")

    def _fbiTables(self):
        """ (label, table, input norm) for every transform the configuration asks for. """
        grid = self.config.phaseSpaceGrid()
        transform = self.config.get("fbi", "transform")
        function = fbiHolCircle if transform == HOL else fbiGeoCircle
        n = self.config.get("fbi", "samples")
        y = 2 * np.pi * np.arange(n) / n

        tables = []
        if self.config.get("fbi", "source") == "circle":
            for h in self.config.get("fbi", "h_sweep"):
                k = int(round(1 / h))
                samples = np.exp(1j * k * y)
                tables.append(("circle k={0}".format(k), function(samples, 1 / k, grid), math.sqrt(2 * math.pi)))
        elif self.isCylinder:
            parity = self.config.get("decay", "parity")
            for target in self.config.get("fbi", "target_sigma"):
                mode = CylinderMode(int(round(target)), parity)
                samples = mode.boundaryTrace(n)
                tables.append(("cylinder k={0}".format(mode.k), function(samples, mode.h, grid),
                               math.sqrt(2 * math.pi) * mode.normalization))
        else:
            for target in self.config.get("fbi", "target_sigma"):
                mode = self._selectMode(target)
                component = mode.dominantComponent
                table = fbiOfComputedMode(mode, grid, transform, component)
                tables.append(("mode sigma={0:.6g}".format(mode.sigma), table,
                               math.sqrt(mode.componentMass(component))))
        return tables

    def runFbi(self) -> bool:
        stage = "fbi"
        weights = self.config.weightSpecs()
        epsilon = self.config.get("fbi", "zero_section_epsilon")
        tables = self._fbiTables()

        summaries = []
        for number, (label, table, inputNorm) in enumerate(tables):
            self.writer.writeCsv("fbi_{0}.csv".format(number), ["alpha_x", "alpha_xi", "re", "im", "abs"],
                                 table.rows())
            summaries.append({
                "label": label,
                "file": "fbi_{0}.csv".format(number),
                "h": table.h,
                "transform": table.transform,
                "l2_norm": table.l2Norm(),
                "input_norm": inputNorm,
                "zero_section_mass": table.zeroSectionMass(epsilon),
                "zero_section_fraction": table.zeroSectionFraction(epsilon),
                "band_fraction": table.massFraction(0.5, 1.5),
                "weighted": {w.label: {"L2": table.weightedNorm(w, "L2"), "Linf": table.weightedNorm(w, "Linf")}
                             for w in weights}
            })

        self.checks.logChecks(self._fbiChecks(tables, weights, epsilon), stage)
        self.writer.writeJson("fbi.json", self._stageSummary(stage, tables=summaries))
        return all(c.passed for c in self.checks.getChecks(stage))

    def _fbiChecks(self, tables, weights: List[WeightSpec], epsilon: float) -> List[Check]:
        checks = []
        isCircle = self.config.get("fbi", "source") == "circle"
        hs = np.array([table.h for _, table, _ in tables])

        for label, table, inputNorm in tables:
            if isCircle:
                checks.extend(self._circleExactnessChecks(label, table))
            else:
                checks.append(Check("band fraction 0.5<=|xi|<=1.5 " + label, table.massFraction(0.5, 1.5),
                                    self.config.get("fbi", "concentration_min"), kind="lower_bound"))
                checks.append(Check("zero-section fraction " + label, table.zeroSectionFraction(epsilon),
                                    self.config.get("fbi", "zero_section_max"), kind="upper_bound"))

        if len(tables) < 2:
            return checks

        stability = np.array([table.l2Norm() / inputNorm for _, table, inputNorm in tables])
        checks.append(Check("table norm variation", float(np.max(stability) / np.min(stability) - 1), 0.02,
                            kind="upper_bound"))

        for weight in weights:
            if weight.family == WeightSpec.THM3_SHARP and (isCircle or self.isCylinder):
                logLinf = np.array([table.logWeightedNorm(weight, "Linf") for _, table, _ in tables])
                slope = np.polyfit(np.log(hs), logLinf, 1)[0]
                checks.append(Check("log-log slope of Linf, " + weight.label, float(slope), -0.25, 0.02))
                if isCircle:
                    for (label, table, _), value in zip(tables, logLinf):
                        gain = 1.0 if table.transform == HOL else math.pi ** -0.25
                        checks.append(Check("Linf / h^(-1/4) {0}".format(label), math.exp(value) * table.h ** 0.25,
                                            gain, 0.01 * gain))
            elif weight.family in (WeightSpec.THM2, WeightSpec.THM3_GAMMA):
                norms = np.array([table.weightedNorm(weight, "L2") for _, table, _ in tables])
                limit = 2.0 if weight.family == WeightSpec.THM2 else 1.5
                checks.append(Check("max/min L2 over h, " + weight.label, float(np.max(norms) / np.min(norms)),
                                    limit, kind="upper_bound"))

        masses = np.array([table.zeroSectionMass(epsilon) for _, table, _ in tables])
        if np.all(masses > 0):
            slope = np.polyfit(1 / hs, np.log(masses), 1)[0]
            checks.append(Check("zero-section log-mass slope vs 1/h", float(slope), 0.0, kind="upper_bound"))
        if isCircle:
            smallest = tables[int(np.argmin(hs))][1]
            checks.append(Check("zero-section fraction at smallest h", smallest.zeroSectionFraction(epsilon), 1e-6,
                                kind="upper_bound"))
        return checks

    def _circleExactnessChecks(self, label: str, table: PhaseSpaceTable) -> List[Check]:
        h = table.h
        X, XI = np.meshgrid(table.alphaX, table.alphaXi)
        closedForm = np.exp(1j * X / h - (XI - 1) ** 2 / (2 * h))
        if table.transform == HOL:
            closedForm *= h ** -0.25
        else:
            closedForm *= (np.pi * h) ** -0.25
        error = float(np.max(np.abs(table.values - closedForm)))
        return [Check("closed form {0} {1}".format(table.transform, label), error, 1e-10, kind="upper_bound")]

    def runDecayFit(self) -> bool:
        stage = "decay"
        config = self.config
        targets = config.get("decay", "target_sigma")
        components = _broadcast(config.get("decay", "component"), len(targets))
        laws = _broadcast(config.get("decay", "law") or [None], len(targets))
        distances = config.distances()
        tRange = (config.get("decay", "t_min"), config.get("decay", "t_max"))

        rows, sampleRows, reports = [], [], []
        for target, component, lawName in zip(targets, components, laws):
            if self.isCylinder:
                field = self._cylinderMode()
            else:
                mode = self._selectMode(target, component)
                field = ExtensionField(mode, self._upsamplingFor(mode, float(np.min(distances))), self.threads)

            profiles = []
            for foot in config.get("decay", "feet"):
                profile = sampleNormalRay(field, foot, distances, component, config.get("decay", "window"))
                profiles.append(profile.fit(tRange, config.get("decay", "degree"),
                                            config.get("decay", "residual_threshold")))
                sampleRows.extend([[foot, component, field.sigma, t, f]
                                   for t, f in zip(profile.distances, profile.values)])

            report = verifyTheorem1(self.domain, field, profiles, config.get("decay", "delta"),
                                    config.get("decay", "linear_tolerance"))
            self.checks.logChecks(report.checks, stage)
            law = self._decayLaw(lawName)
            for profile in profiles:
                lawCheck = None
                if law is not None and profile.isFitted:
                    tolerance = config.get("decay", "quadratic_tolerance")
                    lawCheck = quadraticLawCheck(profile, law, tolerance, tolerance)
                    self.checks.logCheck(lawCheck, stage)
                passed = all(c.passed for c in report.checksFor(profile)) and (lawCheck is None or lawCheck.passed)
                lowerBound = report.constants.footConstant(profile.footParameter, component) - report.delta
                rows.append([profile.footParameter, profile.a0, profile.a1, profile.a2, profile.residual, lowerBound,
                             passed, component, field.sigma])
            summary = report.summary()
            summary["sigma"] = field.sigma
            summary["law"] = lawName
            reports.append(summary)

        self.writer.writeCsv("decay.csv", ["t_foot", "a0", "a1", "a2", "residual", "predicted_a2_lower_bound",
                                           "pass", "component", "sigma"], rows)
        self.writer.writeCsv("decay_samples.csv", ["t_foot", "component", "sigma", "distance", "rate"], sampleRows)
        self.writer.writeJson("decay.json", self._stageSummary(stage, reports=reports))
        return all(c.passed for c in self.checks.getChecks(stage))

    def _upsamplingFor(self, mode: SteklovMode, closestDistance: float) -> int:
        """ Configured upsampling, raised until d_min is at most the closest sampled distance. """
        upsampling = self.config.get("extension", "upsampling")
        longest = max(c.length for c in mode.domain.components)
        needed = math.floor(6 * longest / (mode.operators.N * closestDistance)) + 1
        if needed > upsampling:
            logger.info("Raising upsampling from {0} to {1} to sample down to d={2:g}".format(
                upsampling, needed, closestDistance))
            return needed
        return upsampling

    def _decayLaw(self, name: str):
        if name is None:
            return None
        return exactDecayLaw(name, R=self.config.get("domain", "radius"), r0=self.config.get("domain", "r0"))

    def runVerify(self) -> bool:
        """ Chains spectrum, extension, decay and FBI stages for every section present. """
        self.runSpectrum()
        if self.config.hasSection("extension"):
            self.runExtend()
        if self.config.hasSection("decay"):
            self.runDecayFit()
        if self.config.hasSection("fbi"):
            self.runFbi()

        summary = self.checks.summary()
        summary["failed"] = [c.name for c in self.checks.failedChecks()]
        self.writer.writeJson("verify.json", summary)
        if not self.checks.allPassed():
            for check in self.checks.failedChecks():
                logger.error("Check failed: {0} (measured {1}, expected {2})".format(check.name, check.measured,
                                                                                   check.expected))
        return self.checks.allPassed()

    def _startCalculation(self):
        if 'SIGUSR1' in dir(signal):
            # `kill -USR1 processID` toggles debug logging of a long run
            signal.signal(signal.SIGUSR1, self._processSignal)
        self.startTime = time.time()

    def _completeCalculation(self) -> float:
        if 'SIGUSR1' in dir(signal):
            signal.signal(signal.SIGUSR1, signal.SIG_DFL)
        elapsed = time.time() - self.startTime
        self.startTime = None
        return elapsed

    def _processSignal(self, signum, frame):
        root = logging.getLogger()
        root.setLevel(logging.INFO if root.level == logging.DEBUG else logging.DEBUG)
        logger.info("Toggled log level to {0}".format(logging.getLevelName(root.level)))


def _broadcast(values, count: int):
    if len(values) == 1:
        return list(values) * count
    if len(values) != count:
        raise ConfigError("Decay lists must have one entry or one per target sigma ({0}), got {1}".format(
            count, len(values)))
    return list(values)
