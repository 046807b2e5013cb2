"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class Eight4BodyError(Exception):
    """Base class for all package errors."""


class CollisionProximity(Eight4BodyError):
    """Two bodies came closer than the collision guard allows."""

    def __init__(self, message: str, distance: float = float("nan"), t: float = float("nan")):
        super().__init__(message)
        self.distance = distance
        self.t = t


class DimensionMismatch(Eight4BodyError, ValueError):
    pass


class InvalidIndex(Eight4BodyError, ValueError):
    pass


class StepSizeUnderflow(Eight4BodyError):
    pass


class NoSignChange(Eight4BodyError, ValueError):
    pass


class NoConvergence(Eight4BodyError):
    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class CorrectorDivergence(Eight4BodyError):
    pass


class AmbiguousLabel(Eight4BodyError):
    pass


class DomainError(Eight4BodyError, ValueError):
    pass


class NoPhysicalSolution(Eight4BodyError, ValueError):
    pass
