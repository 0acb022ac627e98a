"""Exception taxonomy shared by all quadlab modules."""


class QuadlabError(Exception):
    """Base class for every error raised by quadlab."""


class InputError(QuadlabError):
    """Malformed or invalid input (CLI exit code 2)."""


# geom_core
class InvalidPolygon(InputError):
    pass


class SelfIntersection(InvalidPolygon):
    def __init__(self, i, j, msg=None):
        self.edges = (i, j)
        super().__init__(msg or f"edges {i} and {j} intersect")


class DegenerateEdge(InvalidPolygon):
    pass


class InvalidMarks(InputError):
    pass


class MarksNotDistinct(InvalidMarks):
    pass


class MarksOutOfOrder(InvalidMarks):
    pass


# internal_distance
class InvalidDelta(InputError):
    pass


class GridTooCoarse(QuadlabError):
    pass


# modulus
class NotRectilinear(InputError):
    pass


class CoordinatesNotOnGrid(InputError):
    pass


class SolverDiverged(QuadlabError):
    pass


class NonPositiveDistance(InputError):
    pass


# rectification
class CornerTouch(GridTooCoarse):
    """Extracted cell boundary touches itself at a grid corner."""


class IterationCap(QuadlabError):
    pass


# disk_placement
class RatioBoundViolated(InputError):
    pass


class DegenerateSplit(QuadlabError):
    pass


class ClassificationFailure(QuadlabError):
    pass


class ModulusOutOfRange(QuadlabError):
    def __init__(self, M, K, msg=None):
        self.M = M
        self.K = K
        super().__init__(msg or f"modulus {M!r} outside [1/{K}, {K}]")


# harness
class GenerationFailed(QuadlabError):
    pass


class InvalidParams(InputError):
    pass
