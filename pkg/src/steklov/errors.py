"""Exception types raised across the package."""


class SteklovError(Exception):
    """Base class for all package errors."""


class DomainError(SteklovError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(SteklovError, OverflowError):
    """The requested computation would overflow double precision."""

    def __init__(self, message, safe_max=None):
        super().__init__(message)
        self.safe_max = safe_max


class QuadratureError(SteklovError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class GeometryError(SteklovError, ValueError):
    """Invalid domain geometry (self-intersection, non star-shaped, ...)."""


class ResolutionError(SteklovError, ValueError):
    """Mesh size too coarse to resolve a geometric feature."""


class MeshError(SteklovError):
    """Mesh is invalid or numerically unusable."""


class ConvergenceError(SteklovError, ArithmeticError):
    """An iterative method hit its iteration cap."""

    def __init__(self, message, residual=None, best=None):
        super().__init__(message)
        self.residual = residual
        self.best = best
