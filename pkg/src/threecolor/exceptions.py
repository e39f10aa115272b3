"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`ThreeColorError`, so callers (and the CLI) can catch one type.
"""


class ThreeColorError(Exception):
    """Base class for all package errors."""


class GeometryError(ThreeColorError, ValueError):
    pass


class NotConvex(GeometryError):
    pass


class WrongOrientation(GeometryError):
    pass


class CollinearVertices(GeometryError):
    pass


class TooFewSegments(GeometryError):
    pass


class IsParallelogram(GeometryError):
    """The body is a parallelogram; three-direction illumination is impossible."""


class DegenerateCone(GeometryError):
    pass


class DegenerateAnchors(GeometryError):
    pass


class ClassificationAmbiguous(GeometryError):
    """A translate violated the localisation properties for the chosen cell size."""


class DegeneratePerturbation(GeometryError):
    """A candidate translate touches a third boundary; perturb the input points."""


class NotComplete(ThreeColorError):
    pass


class LpInfeasible(ThreeColorError):
    pass


class SubsetTooSmall(ThreeColorError, ValueError):
    pass


class RetriesExhausted(ThreeColorError):
    def __init__(self, message, best=None, report=None):
        super().__init__(message)
        self.best = best
        self.report = report


class NoColoringFound(ThreeColorError):
    pass


class SizeOverflow(ThreeColorError, ValueError):
    pass


class TooLarge(ThreeColorError, ValueError):
    pass
