from dataclasses import dataclass, asdict
from typing import List


@dataclass
class Check:
    """ One verification: a measured value against an expected value, either as an equality
    within tolerance or as a lower bound. """
    name: str
    measured: float
    expected: float
    tolerance: float = 0.0
    kind: str = "equal"
    passed: bool = None

    def __post_init__(self):
        if self.passed is None:
            if self.measured is None:
                self.passed = False
            elif self.kind == "lower_bound":
                self.passed = self.measured >= self.expected - self.tolerance
            elif self.kind == "upper_bound":
                self.passed = self.measured <= self.expected + self.tolerance
            else:
                self.passed = abs(self.measured - self.expected) <= self.tolerance

    @property
    def margin(self) -> float:
        if self.measured is None:
            return None
        if self.kind == "upper_bound":
            return self.expected - self.measured
        return self.measured - self.expected

    def asDict(self) -> dict:
        values = asdict(self)
        values["margin"] = self.margin
        return values


class Logger:
    """ Accumulates the checks of a verification run, grouped by stage. """
    def __init__(self):
        self._checks = []
        self._stages = []

    def logCheck(self, check: Check, stage: str = None):
        self._checks.append(check)
        self._stages.append(stage)

    def logChecks(self, checks: List[Check], stage: str = None):
        for check in checks:
            self.logCheck(check, stage)

    def getChecks(self, stage: str = None) -> List[Check]:
        if stage is None:
            return list(self._checks)
        return [c for c, s in zip(self._checks, self._stages) if s == stage]

    def getStages(self) -> List[str]:
        stages = []
        for stage in self._stages:
            if stage not in stages:
                stages.append(stage)
        return stages

    def failedChecks(self) -> List[Check]:
        return [c for c in self._checks if not c.passed]

    def allPassed(self) -> bool:
        return len(self.failedChecks()) == 0

    def summary(self) -> dict:
        return {
            "passed": self.allPassed(),
            "stages": {str(stage): [c.asDict() for c in self.getChecks(stage)] for stage in self.getStages()}
        }
