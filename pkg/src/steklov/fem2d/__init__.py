"""P1 finite elements for the Steklov problem on planar and hyperbolic domains."""

from .assembly import (
    boundary_mass_matrix,
    domain_diameter,
    domain_volume,
    perimeter,
    stiffness_matrix,
)
from .center import CenterOfMass, center_of_mass, gh_volume_quotient, test_function_quotient
from .mesh import DomainSpec, TriMesh, build_mesh
from .spectrum import SteklovSpectrum, dtn_schur, steklov_spectrum

__all__ = [
    "CenterOfMass",
    "DomainSpec",
    "SteklovSpectrum",
    "TriMesh",
    "boundary_mass_matrix",
    "build_mesh",
    "center_of_mass",
    "domain_diameter",
    "domain_volume",
    "dtn_schur",
    "gh_volume_quotient",
    "perimeter",
    "steklov_spectrum",
    "stiffness_matrix",
    "test_function_quotient",
]
