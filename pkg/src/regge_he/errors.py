"""Exception types raised across the package."""


class GeometryError(Exception):
    """Base class for all errors raised by regge_he."""


class InputError(GeometryError):
    """Malformed or combinatorially invalid input."""


class PreconditionError(GeometryError):
    """Input is well formed but violates a mathematical precondition."""


class SolverError(GeometryError):
    """A numerical procedure failed to reach its goal."""


# mesh
class NonManifoldFace(InputError):
    pass


class Disconnected(InputError):
    pass


class NotASphere(InputError):
    pass


# geom
class DegenerateTriangle(PreconditionError):
    pass


class DegenerateTet(PreconditionError):
    def __init__(self, message, tet=None):
        super().__init__(message)
        self.tet = tet


class IllConditioned(PreconditionError):
    def __init__(self, message, tet=None):
        super().__init__(message)
        self.tet = tet


class PyramidInfeasible(PreconditionError):
    def __init__(self, message, triangle=None):
        super().__init__(message)
        self.triangle = triangle


# rigidity
class StarPointInvalid(PreconditionError):
    pass


class NotFlat(PreconditionError):
    pass


class DegenerateTwist(PreconditionError):
    pass


# alexandrov
class InvalidTargetMetric(PreconditionError):
    pass


class FlipLoop(SolverError):
    pass


class InitFailed(SolverError):
    pass


class JacobianSingular(SolverError):
    pass


class StepUnderflow(SolverError):
    pass


class EmbeddingInconsistent(SolverError):
    pass


class DegeneratesToPolygon(SolverError):
    pass
