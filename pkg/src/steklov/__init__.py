"""Steklov eigenvalues on space forms and numerical checks of a curvature-corrected Brock-Weinstock bound."""

from .errors import (
    ConvergenceError,
    DomainError,
    GeometryError,
    MeshError,
    QuadratureError,
    RangeError,
    ResolutionError,
    SteklovError,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "GeometryError",
    "MeshError",
    "QuadratureError",
    "RangeError",
    "ResolutionError",
    "SteklovError",
]
