"""Discrete Dirichlet-to-Neumann operator and the Steklov spectrum.

The Steklov problem only has boundary mass, so the interior unknowns are
eliminated exactly: ``S = K_bb - K_bi K_ii^{-1} K_ib`` is the discrete
Dirichlet-to-Neumann map, and the spectrum solves ``S phi = sigma M_b phi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from ..errors import ConvergenceError, DomainError, MeshError
from .assembly import boundary_mass_matrix, stiffness_matrix
from .mesh import DomainSpec, build_mesh


@dataclass(frozen=True, eq=False)
class SchurReduction:
    """Boundary Schur complement together with the data to extend harmonically."""

    S: np.ndarray
    boundary: np.ndarray
    interior: np.ndarray
    extension: np.ndarray  # K_ii^{-1} K_ib, shape (n_interior, n_boundary)

    def extend(self, phi):
        """Discrete harmonic extension of boundary values to all vertices."""
        phi = np.asarray(phi)
        n = len(self.boundary) + len(self.interior)
        out = np.empty((n,) + phi.shape[1:])
        out[self.boundary] = phi
        out[self.interior] = -self.extension @ phi
        return out


def schur_reduction(K, boundary):
    boundary = np.asarray(boundary)
    n = K.shape[0]
    mask = np.ones(n, dtype=bool)
    mask[boundary] = False
    interior = np.flatnonzero(mask)
    K = K.tocsr()
    Kbb = K[boundary][:, boundary].toarray()
    if len(interior) == 0:
        return SchurReduction(Kbb, boundary, interior, np.zeros((0, len(boundary))))
    Kii = K[interior][:, interior].tocsc()
    Kib = K[interior][:, boundary].toarray()
    try:
        lu = spla.splu(Kii, permc_spec="MMD_AT_PLUS_A", options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise MeshError(f"interior stiffness block is singular: {exc}") from exc
    X = lu.solve(Kib)
    if not np.all(np.isfinite(X)):
        raise MeshError("interior stiffness factorization produced non-finite values")
    S = Kbb - Kib.T @ X
    return SchurReduction(S, boundary, interior, X)


def dtn_schur(K, boundary):
    """Boundary Schur complement of the stiffness matrix (dense, symmetric PSD)."""
    return schur_reduction(K, boundary).S


@dataclass(frozen=True, eq=False)
class SteklovSpectrum:
    """Lowest Steklov eigenpairs; eigenvectors are M_b-orthonormal."""

    eigenvalues: np.ndarray
    boundary_vectors: np.ndarray
    interior_extensions: np.ndarray
    boundary: np.ndarray
    sigma1_index: int
    mass: np.ndarray

    @property
    def sigma1(self):
        return float(self.eigenvalues[self.sigma1_index])


def generalized_eigh(S, M, k):
    """Smallest k+1 eigenpairs of S x = sigma M x by Cholesky reduction of M."""
    try:
        L = la.cholesky(M, lower=True)
    except la.LinAlgError as exc:
        raise MeshError(f"boundary mass matrix is not positive definite: {exc}") from exc
    A = la.solve_triangular(L, S, lower=True)
    C = la.solve_triangular(L, A.T, lower=True)
    C = 0.5 * (C + C.T)
    top = min(k, len(C) - 1)
    try:
        vals, Y = la.eigh(C, subset_by_index=[0, top])
    except la.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc
    X = la.solve_triangular(L.T, Y, lower=False)
    resid = np.linalg.norm(S @ X - (M @ X) * vals, axis=0)
    scale = np.linalg.norm(S, 2) * np.linalg.norm(X, axis=0) + 1e-300
    if np.any(resid / scale > 1e-8):
        raise ConvergenceError(
            "eigenpair residual too large", residual=float(np.max(resid / scale))
        )
    return vals, X


def steklov_spectrum(spec_or_mesh, k=4, parallel=False):
    """Lowest k+1 Steklov eigenvalues (sigma_0 = 0 first) of a domain or mesh."""
    if k < 1:
        raise DomainError("need k >= 1")
    mesh = build_mesh(spec_or_mesh) if isinstance(spec_or_mesh, DomainSpec) else spec_or_mesh
    K = stiffness_matrix(mesh, parallel=parallel)
    red = schur_reduction(K, mesh.boundary_vertices)
    M = boundary_mass_matrix(mesh).toarray()
    vals, X = generalized_eigh(red.S, M, k)
    vals = np.maximum(vals, 0.0) if vals[0] > -1e-10 * abs(vals[-1]) else vals
    ones = np.ones(len(M))
    means = (ones @ M @ X) / np.sqrt(ones @ M @ ones)
    idx = next(
        (i for i in range(1, len(vals)) if abs(means[i]) <= 1e-6 * np.linalg.norm(X[:, i])),
        1,
    )
    return SteklovSpectrum(
        eigenvalues=vals,
        boundary_vectors=X,
        interior_extensions=red.extend(X),
        boundary=red.boundary,
        sigma1_index=idx,
        mass=M,
    )
