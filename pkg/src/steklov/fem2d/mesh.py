"""Domain descriptions and triangulation of star-shaped planar domains.

Every supported geometry is star-shaped about some kernel point ``c`` (the
annulus is handled as a star-shaped domain with a concentric hole). The mesher
places nested scaled copies of the boundary curve about ``c``, samples each by
arc length, triangulates the point cloud with Delaunay and discards triangles
outside the domain. Boundary vertices are evaluated on the analytic curve, so
they lie exactly on it.

For the Poincare ambient the geometry is described in geodesic polar
coordinates about the origin (a chart disk of radius R becomes the geodesic
disk of radius R), optionally moved by the hyperbolic translation taking the
origin to ``center``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import Delaunay

from ..errors import DomainError, GeometryError, MeshError, ResolutionError
from . import poincare

GEOMETRY_TYPES = ("disk", "ellipse", "annulus", "polygon", "polar")
MIN_TRIANGLE_AREA = 1e-14
# interior point spacing relative to h; shrunk on retry if an edge exceeds h
SPACING_FRACTION = 0.7


@dataclass(frozen=True)
class DomainSpec:
    """Declarative test domain: geometry, ambient model, comparison curvatures, mesh size."""

    geometry: dict
    model: str = "euclidean"
    kappa0: float = 0.0
    kappa: float | None = None
    bigK: float | None = None
    h: float = 0.1
    name: str = ""

    def __post_init__(self):
        geom = dict(self.geometry)
        object.__setattr__(self, "geometry", geom)
        if self.kappa is None:
            object.__setattr__(self, "kappa", float(self.kappa0))
        if self.bigK is None:
            object.__setattr__(self, "bigK", float(self.kappa0))
        self.validate()

    def validate(self):
        g = self.geometry
        kind = g.get("type")
        if kind not in GEOMETRY_TYPES:
            raise DomainError(f"unknown geometry type {kind!r}")
        if self.model not in ("euclidean", "poincare"):
            raise DomainError(f"unknown ambient model {self.model!r}")
        if self.model == "euclidean" and self.kappa0 != 0:
            raise DomainError("euclidean ambient must have curvature 0")
        if self.model == "poincare" and not self.kappa0 < 0:
            raise DomainError("poincare ambient needs curvature < 0")
        if not self.bigK <= self.kappa0 <= self.kappa <= 0:
            raise DomainError(
                f"need K <= kappa0 <= kappa <= 0, got K={self.bigK}, "
                f"kappa0={self.kappa0}, kappa={self.kappa}"
            )
        if not self.h > 0:
            raise DomainError("mesh size h must be positive")
        if kind == "disk" and not g["R"] > 0:
            raise DomainError("disk radius must be positive")
        if kind == "ellipse" and not (g["a"] > 0 and g["b"] > 0):
            raise DomainError("ellipse semi-axes must be positive")
        if kind == "annulus" and not 0 < g["r_in"] < g["r_out"]:
            raise DomainError("annulus needs 0 < r_in < r_out")
        if kind == "polar":
            theta = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
            if np.min(_polar_radius(g, theta)) <= 0:
                raise DomainError("polar radius function must be strictly positive")
        if kind == "polygon" and len(g["vertices"]) < 3:
            raise DomainError("polygon needs at least three vertices")
        c = g.get("center")
        if c is not None and self.model == "poincare" and math.hypot(*c) >= 1:
            raise DomainError("poincare center must lie inside the unit disk")

    @classmethod
    def from_dict(cls, d, name=""):
        amb = d.get("ambient", {})
        comp = d.get("comparison", {})
        return cls(
            geometry=d["geometry"],
            model=amb.get("model", "euclidean"),
            kappa0=float(amb.get("curvature", 0.0)),
            kappa=comp.get("kappa"),
            bigK=comp.get("K"),
            h=float(d.get("mesh", {}).get("h", 0.1)),
            name=d.get("name", name),
        )

    def to_dict(self):
        return {
            "name": self.name,
            "geometry": self.geometry,
            "ambient": {"model": self.model, "curvature": self.kappa0},
            "comparison": {"kappa": self.kappa, "K": self.bigK},
            "mesh": {"h": self.h},
        }

    def with_h(self, h):
        return DomainSpec(self.geometry, self.model, self.kappa0, self.kappa, self.bigK, h, self.name)


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Triangulation with boundary loops; ``vertices`` are model coordinates."""

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_loops: list
    model: str = "euclidean"
    kappa0: float = 0.0
    h: float = float("nan")
    boundary_edges: np.ndarray = field(init=False)
    boundary_vertices: np.ndarray = field(init=False)

    def __post_init__(self):
        edges = np.concatenate(
            [np.stack([lp, np.roll(lp, -1)], axis=1) for lp in self.boundary_loops]
        )
        object.__setattr__(self, "boundary_edges", edges)
        object.__setattr__(self, "boundary_vertices", np.concatenate(self.boundary_loops))

    @property
    def n_vertices(self):
        return len(self.vertices)

    def areas(self):
        """Signed Euclidean triangle areas (positive for counterclockwise)."""
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def edges(self):
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def max_edge_length(self):
        e = self.edges()
        return float(np.max(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)))

    def validate(self):
        a = self.areas()
        bad = np.flatnonzero(a < MIN_TRIANGLE_AREA)
        if len(bad):
            raise MeshError(f"triangle {bad[0]} has area {a[bad[0]]:.3e}")
        t = self.triangles
        half = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        key = np.sort(half, axis=1)
        uniq, counts = np.unique(key, axis=0, return_counts=True)
        once = {tuple(e) for e in uniq[counts == 1]}
        loops = {tuple(sorted(e)) for e in self.boundary_edges}
        if once != loops:
            raise MeshError("boundary loops do not match the triangulation boundary")
        if np.any(counts > 2):
            raise MeshError("non-manifold edge")
        if self.model == "poincare" and np.any(np.sum(self.vertices**2, axis=1) >= 1):
            raise MeshError("poincare vertices must lie inside the unit disk")


def _polar_radius(g, theta):
    theta = np.asarray(theta, dtype=float)
    r = np.full_like(theta, float(g.get("a0", 1.0)))
    for k, c in enumerate(g.get("cos", []), start=1):
        r = r + c * np.cos(k * theta)
    for k, s in enumerate(g.get("sin", []), start=1):
        r = r + s * np.sin(k * theta)
    return r


class _Curve:
    """Closed curve star-shaped about the origin, given by a polar radius function."""

    def __init__(self, radius_fn, n_dense=8192):
        self.radius_fn = radius_fn
        u = np.linspace(0.0, 1.0, n_dense + 1)
        pts = self.point(u)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        self._u = u
        self._s = np.concatenate(([0.0], np.cumsum(seg)))
        self.length = float(self._s[-1])

    def point(self, u):
        th = 2.0 * np.pi * np.asarray(u)
        r = self.radius_fn(th)
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    def sample(self, scale, spacing, offset=0.0):
        # a multiple of 4 puts samples on both axes of curves symmetric about them
        m = 4 * max(1, int(math.ceil(scale * self.length / spacing / 4)))
        s = (np.arange(m) + offset) / m * self.length
        u = np.interp(s, self._s, self._u)
        return scale * self.point(u)

    def max_radius(self):
        return float(np.max(self.radius_fn(2 * np.pi * self._u)))


class _Polygon:
    """Polygon star-shaped about the origin (vertices already shifted, CCW)."""

    def __init__(self, verts):
        self.verts = np.asarray(verts, dtype=float)
        nxt = np.roll(self.verts, -1, axis=0)
        self.length = float(np.sum(np.linalg.norm(nxt - self.verts, axis=1)))

    def sample(self, scale, spacing, offset=0.0):
        out = []
        v = scale * self.verts
        nxt = np.roll(v, -1, axis=0)
        for a, b in zip(v, nxt):
            m = max(1, int(math.ceil(np.linalg.norm(b - a) / spacing)))
            t = np.arange(m) / m
            out.append(a + t[:, None] * (b - a))
        return np.concatenate(out)

    def max_radius(self):
        return float(np.max(np.linalg.norm(self.verts, axis=1)))


def _segments_intersect(p1, p2, p3, p4):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p3, p4, p1), orient(p3, p4, p2)
    d3, d4 = orient(p1, p2, p3), orient(p1, p2, p4)
    return d1 * d2 < 0 and d3 * d4 < 0


def polygon_kernel_point(verts):
    """Chebyshev center of the kernel of a simple CCW polygon.

    Raises :class:`GeometryError` for self-intersecting polygons or polygons
    whose kernel has empty interior.
    """
    v = np.asarray(verts, dtype=float)
    m = len(v)
    for i in range(m):
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue
            if _segments_intersect(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]):
                raise GeometryError(f"polygon edges {i} and {j} intersect")
    e = np.roll(v, -1, axis=0) - v
    nrm = np.stack([-e[:, 1], e[:, 0]], axis=1)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    # maximize t subject to nrm_i . (c - v_i) >= t
    A = np.hstack([-nrm, np.ones((m, 1))])
    b = -np.sum(nrm * v, axis=1)
    res = linprog([0, 0, -1], A_ub=A, b_ub=b, bounds=[(None, None), (None, None), (0, None)])
    if not res.success or res.x[2] <= 1e-9 * np.max(np.abs(v)):
        raise GeometryError("polygon is not star-shaped about an interior point")
    return res.x[:2]


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _shape(g):
    """Return (outer boundary, hole radius or None, kernel offset)."""
    kind = g["type"]
    if kind == "disk":
        R = float(g["R"])
        return _Curve(lambda th: np.full_like(th, R)), None, np.zeros(2)
    if kind == "ellipse":
        a, b = float(g["a"]), float(g["b"])
        return (
            _Curve(lambda th: a * b / np.sqrt((b * np.cos(th)) ** 2 + (a * np.sin(th)) ** 2)),
            None,
            np.zeros(2),
        )
    if kind == "annulus":
        ro = float(g["r_out"])
        return _Curve(lambda th: np.full_like(th, ro)), float(g["r_in"]), np.zeros(2)
    if kind == "polar":
        return _Curve(lambda th: _polar_radius(g, th)), None, np.zeros(2)
    verts = np.asarray(g["vertices"], dtype=float)
    if _signed_area(verts) < 0:
        verts = verts[::-1]
    c = polygon_kernel_point(verts)
    return _Polygon(verts - c), None, c


def _points_in(poly, pts):
    from matplotlib.path import Path

    return Path(poly).contains_points(pts)


def _triangulate(outer, hole, spacing):
    rmax = outer.max_radius()
    pts = [np.zeros((1, 2))] if hole is None else []
    loops = []
    if hole is None:
        n_rings = max(2, int(math.ceil(rmax / spacing)))
        scales = np.arange(1, n_rings + 1) / n_rings
        rings = [outer.sample(s, spacing, offset=0.5 * (k % 2)) for k, s in enumerate(scales)]
        rings[-1] = outer.sample(1.0, spacing)
    else:
        gap = rmax - hole
        n_rings = max(2, int(math.ceil(gap / spacing)))
        radii = hole + gap * np.arange(n_rings + 1) / n_rings
        rings = [
            outer.sample(r / rmax, spacing, offset=0.5 * (k % 2)) for k, r in enumerate(radii)
        ]
        rings[0] = outer.sample(hole / rmax, spacing)
        rings[-1] = outer.sample(1.0, spacing)
    pts.extend(rings)
    xy = np.concatenate(pts)
    offsets = np.cumsum([0] + [len(p) for p in pts])
    outer_idx = np.arange(offsets[-2], offsets[-1])
    loops.append(outer_idx)
    if hole is not None:
        # inner boundary runs clockwise so the domain stays on the left
        inner_idx = np.arange(offsets[0], offsets[1])[::-1]
        loops.append(inner_idx)

    tri = Delaunay(xy, qhull_options="Qbb Qc Qz Q12 Qt").simplices.astype(np.int64)
    cen = xy[tri].mean(axis=1)
    keep = _points_in(xy[outer_idx], cen)
    if hole is not None:
        keep &= ~_points_in(xy[loops[1][::-1]], cen)
    tri = tri[keep]
    p = xy[tri]
    area = 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                  - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    flip = area < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    # drop slivers qhull may emit along collinear boundary samples
    tri = tri[np.abs(area) > 1e-10 * spacing**2]
    return xy, tri, loops


def _compact(xy, tri, loops):
    used = np.zeros(len(xy), dtype=bool)
    used[tri.ravel()] = True
    for lp in loops:
        if not np.all(used[lp]):
            raise GeometryError("boundary vertex not attached to any triangle")
    new = -np.ones(len(xy), dtype=np.int64)
    new[used] = np.arange(int(used.sum()))
    return xy[used], new[tri], [new[lp] for lp in loops]


def build_mesh(spec, max_tries=6):
    """Triangulate ``spec`` with every edge no longer than ``spec.h``.

    Lengths are measured in the construction chart (Euclidean coordinates, or
    geodesic polar coordinates for the Poincare ambient).
    """
    g = spec.geometry
    outer, hole, kernel = _shape(g)
    h = spec.h
    if hole is not None and outer.max_radius() - hole < h:
        raise ResolutionError(
            f"h = {h} cannot resolve the annulus gap {outer.max_radius() - hole}"
        )
    spacing = SPACING_FRACTION * h
    for _ in range(max_tries):
        xy, tri, loops = _triangulate(outer, hole, spacing)
        xy, tri, loops = _compact(xy, tri, loops)
        chart = TriMesh(xy + kernel, tri, loops, "euclidean", 0.0, h)
        try:
            chart.validate()
        except MeshError as exc:
            raise GeometryError(f"could not triangulate geometry: {exc}") from exc
        if chart.max_edge_length() <= h:
            break
        spacing *= 0.85
    else:
        raise MeshError(f"could not meet the edge-length bound h = {h}")
    center = g.get("center")
    if spec.model == "euclidean":
        v = chart.vertices + (np.asarray(center, dtype=float) if center is not None else 0.0)
        return TriMesh(v, chart.triangles, chart.boundary_loops, "euclidean", 0.0, h)
    v = poincare.chart_to_model(chart.vertices, spec.kappa0)
    if center is not None:
        v = poincare.mobius_from_origin(center, v)
    mesh = TriMesh(v, chart.triangles, chart.boundary_loops, "poincare", spec.kappa0, h)
    mesh.validate()
    return mesh


def boundary_curve_residual(mesh, spec):
    """Max deviation of boundary vertices from the analytic boundary (chart units)."""
    g = spec.geometry
    if g["type"] not in ("disk", "annulus"):
        raise DomainError("analytic residual implemented for circles only")
    v = mesh.vertices
    c = np.asarray(g.get("center", (0.0, 0.0)), dtype=float)
    if spec.model == "poincare":
        if g.get("center") is not None:
            v = poincare.mobius_to_origin(c, v)
        r = 2.0 * np.arctanh(np.linalg.norm(v, axis=1)) / math.sqrt(-spec.kappa0)
    else:
        r = np.linalg.norm(v - c, axis=1)
    targets = [g["R"]] if g["type"] == "disk" else [g["r_out"], g["r_in"]]
    res = 0.0
    for lp, target in zip(mesh.boundary_loops, targets):
        res = max(res, float(np.max(np.abs(r[lp] - target))))
    return res
