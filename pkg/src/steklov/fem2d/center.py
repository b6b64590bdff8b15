"""Center of mass for the radial test functions and the quotients built on it.

For a point p the vector field

    X(p) = int_{dOmega} F(eta(r_p(x))) * u_p(x) dA(x),

where u_p(x) is the unit tangent at p of the geodesic towards x, has a zero
inside the hull of the domain. At that zero the functions F(eta(r_p)) u_p^i
have boundary mean zero and are admissible trial functions for sigma_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import root
from scipy.spatial import Delaunay

from .. import spaceform as sf
from ..errors import ConvergenceError, DomainError
from ..radial import gh_from_fp
from . import poincare
from .assembly import boundary_quadrature, domain_diameter, volume_quadrature

MAX_ITER = 500
REL_TOL = 1e-8
# r_p below this (in length units) is replaced by it; the integrands stay bounded as r -> 0
R_FLOOR = 1e-12


def radial_distances(mesh, p, x):
    """Ambient distance from p to each point x."""
    if mesh.model == "euclidean":
        return np.linalg.norm(x - p, axis=-1)
    return poincare.distance_from(p, x, mesh.kappa0)


def unit_directions(mesh, p, x):
    """Unit tangent directions at p towards x, in model coordinates."""
    if mesh.model == "euclidean":
        d = x - p
        nrm = np.linalg.norm(d, axis=-1, keepdims=True)
        return d / np.where(nrm > 0, nrm, 1.0)
    return poincare.directions_from(p, x)[0]


def _transported(eta, r):
    return eta(np.maximum(r, R_FLOOR))


def _step(mesh, p, v):
    """Move from p along the tangent vector v (ambient length |v|)."""
    if mesh.model == "euclidean":
        return p + v
    s = float(np.linalg.norm(v))
    if s == 0:
        return p.copy()
    a = math.sqrt(-mesh.kappa0)
    w = v / s * math.tanh(0.5 * a * s)
    return poincare.mobius_from_origin(p, w[None, :])[0]


@dataclass(frozen=True)
class CenterOfMass:
    """Zero of the boundary vector field; ``residual <= tolerance`` once constructed."""

    point: np.ndarray
    residual: float
    tolerance: float
    iterations: int
    method: str = "fixed-point"


class _Field:
    def __init__(self, mesh, eta, profile):
        self.mesh = mesh
        self.eta = eta
        self.profile = profile
        self.pts, self.w = boundary_quadrature(mesh)

    def __call__(self, p):
        r = radial_distances(self.mesh, p, self.pts)
        F = self.profile.evaluate(_transported(self.eta, r))[0]
        u = unit_directions(self.mesh, p, self.pts)
        fw = F * self.w
        return fw @ u, float(np.sum(fw)), float(np.sum(fw * r) / np.sum(fw))


def _inside_model(mesh, p):
    return mesh.model == "euclidean" or float(np.hypot(*p)) < 1.0


def center_of_mass(mesh, eta, profile, max_iter=MAX_ITER, p0=None, fallback=True):
    """Locate p with |X(p)| <= 1e-8 * F(eta(d)) * perimeter.

    Damped fixed-point iteration p <- p + tau X(p)/W, where W is the total
    boundary weight, with tau adapted by backtracking on |X|. A derivative-free
    root finder takes over if the iteration stalls (unless ``fallback`` is off).
    """
    field = _Field(mesh, eta, profile)
    d = domain_diameter(mesh)
    perim = float(np.sum(field.w))
    tol = REL_TOL * profile.evaluate(float(eta(d)))[0] * perim
    bv = mesh.vertices[mesh.boundary_vertices]
    p = np.mean(bv, axis=0) if p0 is None else np.asarray(p0, dtype=float)
    if mesh.model == "poincare":
        p = p * min(1.0, 0.9 / max(float(np.hypot(*p)), 1e-300))
    X, W, rbar = field(p)
    res = float(np.linalg.norm(X))
    best_p, best_res = p, res
    tau = rbar
    it = 0
    while res > tol and it < max_iter:
        it += 1
        cand = _step(mesh, p, tau * X / W)
        if _inside_model(mesh, cand):
            Xc, Wc, rc = field(cand)
            rc_res = float(np.linalg.norm(Xc))
            if rc_res < res:
                p, X, W, res = cand, Xc, Wc, rc_res
                tau = min(1.5 * tau, 4.0 * rc)
                best_p, best_res = p, res
                continue
        tau *= 0.5
        if tau < 1e-14 * rbar:
            break
    method = "fixed-point"
    if best_res > tol and fallback:
        sol = root(lambda q: field(q)[0] if _inside_model(mesh, q) else np.full(2, 1e300),
                   best_p, method="df-sane", options={"fatol": tol, "maxfev": 2000})
        q = np.asarray(sol.x, dtype=float)
        if _inside_model(mesh, q):
            q_res = float(np.linalg.norm(field(q)[0]))
            if q_res < best_res:
                best_p, best_res = q, q_res
        method = "df-sane"
    if best_res > tol:
        raise ConvergenceError(
            f"center of mass did not converge (|X| = {best_res:.3e} > {tol:.3e})",
            residual=best_res,
            best=best_p,
        )
    return CenterOfMass(np.asarray(best_p, dtype=float), best_res, tol, it, method)


def in_convex_hull(mesh, p):
    hull = Delaunay(mesh.vertices[mesh.boundary_vertices])
    return bool(hull.find_simplex(np.asarray(p)[None, :])[0] >= 0)


def _require_converged(com):
    if com.residual > com.tolerance:
        raise DomainError("center of mass residual exceeds its tolerance")


@dataclass(frozen=True, eq=False)
class ElementSamples:
    """Transported radial quantities at the volume quadrature nodes."""

    r: np.ndarray
    eta: np.ndarray
    eta_prime: np.ndarray
    F: np.ndarray
    Fprime: np.ndarray
    weights: np.ndarray


def element_samples(mesh, com, eta, profile):
    _require_converged(com)
    pts, w = volume_quadrature(mesh)
    pts = pts.reshape(-1, 2)
    r = np.maximum(radial_distances(mesh, com.point, pts), R_FLOOR)
    e = np.asarray(eta(r))
    ep = np.asarray(eta.derivative(r))
    F, P = profile.evaluate(e)
    return ElementSamples(r, e, ep, F, P, w.ravel())


def test_function_quotient(mesh, com, eta, profile):
    """Upper bound for sigma_1 from the trial functions F(eta(r_p)) u_p^i.

    Numerator: int_Omega (F'(eta) eta')^2 + (n-1) F(eta)^2 / sn_kappa(r)^2 by the
    edge-midpoint rule. Denominator: int_dOmega F(eta)^2 by two-point Gauss.
    """
    s = element_samples(mesh, com, eta, profile)
    n, kappa = profile.n, profile.kappa
    sn_r = np.asarray(sf.sn(kappa, s.r))
    num = np.sum(((s.Fprime * s.eta_prime) ** 2 + (n - 1) * (s.F / sn_r) ** 2) * s.weights)
    bpts, bw = boundary_quadrature(mesh)
    rb = radial_distances(mesh, com.point, bpts)
    Fb = profile.evaluate(_transported(eta, rb))[0]
    return float(num / np.sum(Fb**2 * bw))


test_function_quotient.__test__ = False  # not a pytest test despite the name


def transported_gh(mesh, com, eta, profile):
    """Values of G(eta(r_p)) and H(eta(r_p)) at the volume nodes, with their weights."""
    s = element_samples(mesh, com, eta, profile)
    G, H = gh_from_fp(profile.n, profile.kappa, s.eta, s.F, s.Fprime)
    return np.asarray(G), np.asarray(H), s.weights


def gh_volume_quotient(mesh, com, eta, profile):
    """int_Omega H(eta(r_p)) / int_Omega G(eta(r_p)) (without the curvature constant)."""
    G, H, w = transported_gh(mesh, com, eta, profile)
    return float(np.sum(H * w) / np.sum(G * w))
