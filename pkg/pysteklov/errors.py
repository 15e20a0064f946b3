class SteklovError(Exception):
    """ Root of every numerical or configuration failure raised by pysteklov.
    The module tag tells the command line which stage failed. """
    module = "pysteklov"

    def __init__(self, message: str, module: str = None):
        super(SteklovError, self).__init__(message)
        if module is not None:
            self.module = module

    def __str__(self):
        return "[{0}] {1}".format(self.module, super(SteklovError, self).__str__())


class GeometryError(SteklovError):
    module = "geometry"


class PointNotInsideError(GeometryError):
    def __init__(self, point, distance: float):
        super(PointNotInsideError, self).__init__(
            "Point ({0:.6g}, {1:.6g}) is not strictly inside the domain "
            "(distance to boundary {2:.3g})".format(point[0], point[1], distance))
        self.point = point
        self.distance = distance


class ReferenceDomainError(SteklovError):
    module = "reference"


class LayerAssemblyError(SteklovError):
    module = "dtn"


class SteklovSolveError(SteklovError):
    module = "dtn"


class IllConditionedError(SteklovError):
    module = "dtn"

    def __init__(self, conditionNumber: float):
        super(IllConditionedError, self).__init__(
            "Single layer system is ill-conditioned (condition number {0:.3e})".format(conditionNumber))
        self.conditionNumber = conditionNumber


class ExtensionError(SteklovError):
    module = "extension"


class TooCloseToBoundaryError(ExtensionError):
    def __init__(self, points, distances, minimumDistance: float):
        first = points[0]
        super(TooCloseToBoundaryError, self).__init__(
            "{0} point(s) closer than d_min={1:.4g} to the boundary, first at ({2:.6g}, {3:.6g}) "
            "with d={4:.4g}".format(len(points), minimumDistance, first[0], first[1], distances[0]))
        self.points = points
        self.distances = distances
        self.minimumDistance = minimumDistance


class FbiError(SteklovError):
    module = "fbi"


class WeightError(FbiError):
    pass


class DecayError(SteklovError):
    module = "decay"


class DecayFitError(DecayError):
    pass


class TheoremViolation(DecayError):
    def __init__(self, failedChecks):
        lines = ["{0}: measured {1} vs predicted {2:.6g}".format(
                 c.name, "n/a" if c.measured is None else "{0:.6g}".format(c.measured), c.expected)
                 for c in failedChecks]
        super(TheoremViolation, self).__init__("Decay bound violated: " + "; ".join(lines))
        self.failedChecks = failedChecks


class ConfigError(SteklovError):
    module = "cli"

    def __init__(self, message: str, path: str = None, line: int = None):
        self.path = path
        self.line = line
        if path is not None and line is not None:
            message = "{0}:{1}: {2}".format(path, line, message)
        elif path is not None:
            message = "{0}: {1}".format(path, message)
        super(ConfigError, self).__init__(message)


class FoldingWarning(UserWarning):
    pass


class UnresolvedModeWarning(UserWarning):
    pass
