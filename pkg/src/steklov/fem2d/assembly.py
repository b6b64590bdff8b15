"""P1 assembly on a :class:`TriMesh` and basic geometric measurements.

The Dirichlet energy is conformally invariant in two dimensions, so the
stiffness matrix is the Euclidean one in both ambients. Only boundary lengths
and areas see the Poincare conformal factor.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import pdist

from ..errors import MeshError
from . import poincare
from .mesh import MIN_TRIANGLE_AREA

GAUSS2 = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))


def _element_stiffness(p):
    # p: (m, 3, 2) triangle coordinates
    x, y = p[..., 0], p[..., 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    with np.errstate(divide="ignore", invalid="ignore"):
        # degenerate triangles are reported by the caller
        ke = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4.0 * area[:, None, None])
    return ke, area


def stiffness_matrix(mesh, parallel=False, workers=4):
    """Assemble the P1 stiffness matrix (CSR, symmetric, constants in the kernel).

    ``parallel=True`` computes element matrices in thread chunks; the chunks are
    concatenated in element order, so the result matches the serial assembly.
    """
    tri = mesh.triangles
    p = mesh.vertices[tri]
    if parallel and len(tri) > 1:
        chunks = np.array_split(np.arange(len(tri)), workers)
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda idx: _element_stiffness(p[idx]), chunks))
        ke = np.concatenate([k for k, _ in parts])
        area = np.concatenate([a for _, a in parts])
    else:
        ke, area = _element_stiffness(p)
    bad = np.flatnonzero(area < MIN_TRIANGLE_AREA)
    if len(bad):
        raise MeshError(f"degenerate triangle {bad[0]} (area {area[bad[0]]:.3e})")
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def edge_lengths(mesh, edges=None):
    """Ambient lengths of edges (boundary edges by default).

    Euclidean length, or the Poincare length by two-point Gauss quadrature of
    the conformal factor along the straight segment.
    """
    e = mesh.boundary_edges if edges is None else edges
    a = mesh.vertices[e[:, 0]]
    b = mesh.vertices[e[:, 1]]
    length = np.linalg.norm(b - a, axis=1)
    if mesh.model == "euclidean":
        return length
    rho = sum(0.5 * poincare.conformal_factor(a + t * (b - a), mesh.kappa0) for t in GAUSS2)
    return length * rho


def boundary_mass_matrix(mesh):
    """Consistent P1 boundary mass matrix indexed by ``mesh.boundary_vertices``."""
    bv = mesh.boundary_vertices
    local = -np.ones(mesh.n_vertices, dtype=np.int64)
    local[bv] = np.arange(len(bv))
    e = local[mesh.boundary_edges]
    L = edge_lengths(mesh)
    diag = L / 3.0
    off = L / 6.0
    rows = np.concatenate([e[:, 0], e[:, 1], e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 0], e[:, 1], e[:, 1], e[:, 0]])
    vals = np.concatenate([diag, diag, off, off])
    nb = len(bv)
    return sp.coo_matrix((vals, (rows, cols)), shape=(nb, nb)).tocsr()


def perimeter(mesh):
    return float(np.sum(edge_lengths(mesh)))


def volume_quadrature(mesh):
    """Points and weights of the three-point edge-midpoint rule in the ambient metric.

    Returns ``(points (m, 3, 2), weights (m, 3))``; the rule is exact for
    quadratics on each triangle and second-order accurate for the Poincare
    area element.
    """
    p = mesh.vertices[mesh.triangles]
    mids = 0.5 * (p + np.roll(p, -1, axis=1))
    area = np.abs(mesh.areas())
    w = np.repeat(area[:, None] / 3.0, 3, axis=1)
    if mesh.model == "poincare":
        w = w * poincare.conformal_factor(mids, mesh.kappa0) ** 2
    return mids, w


def boundary_quadrature(mesh):
    """Two-point Gauss nodes on every boundary edge with ambient line weights."""
    e = mesh.boundary_edges
    a = mesh.vertices[e[:, 0]]
    b = mesh.vertices[e[:, 1]]
    L = np.linalg.norm(b - a, axis=1)
    pts = np.stack([a + t * (b - a) for t in GAUSS2], axis=1)
    w = np.repeat(0.5 * L[:, None], 2, axis=1)
    if mesh.model == "poincare":
        w = w * poincare.conformal_factor(pts, mesh.kappa0)
    return pts.reshape(-1, 2), w.ravel()


def domain_volume(mesh):
    """Area of the meshed domain in the ambient metric."""
    if mesh.model == "euclidean":
        return float(np.sum(np.abs(mesh.areas())))
    return float(np.sum(volume_quadrature(mesh)[1]))


def domain_diameter(mesh):
    """Largest ambient distance between two boundary vertices."""
    x = mesh.vertices[mesh.boundary_vertices]
    if len(x) < 2:
        raise MeshError("need at least two boundary vertices")
    if mesh.model == "euclidean":
        return float(np.max(pdist(x)))
    return poincare.pairwise_max_distance(x, mesh.kappa0)
