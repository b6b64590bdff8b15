"""Radial part of the first Steklov eigenfunctions of geodesic balls.

On a geodesic ball of M_kappa the first nonzero Steklov eigenfunctions are
``F(r) * x_i / |x|`` where F solves

    F'' + (n - 1) sn'/sn F' - (n - 1)/sn^2 F = 0,   F(0) = 0, F'(0) = 1.

The equation has a regular singular point at r = 0, so the integration is
launched from a short power series at ``r = eps`` and continued with the
classical fixed-step Runge-Kutta scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import spaceform as sf
from .errors import DomainError, RangeError

DEFAULT_STEPS = 4096
START_FRACTION = 1e-4
_OVERFLOW_EXPONENT = 700.0


def series_coefficient(n, kappa):
    """Coefficient a3 of F(r) = r + a3 r^3 + O(r^5) near the origin."""
    return (n - 1) * kappa / (3.0 * (n + 2))


def max_safe_radius(n, kappa):
    """Largest radius for which sn_kappa^(n-1) stays finite in double precision."""
    if kappa >= 0:
        return math.pi / math.sqrt(kappa) if kappa > 0 else math.inf
    return _OVERFLOW_EXPONENT / ((n - 1) * math.sqrt(-kappa))


def _coefficients(n, kappa, r):
    s = np.asarray(sf.sn(kappa, r))
    p = (n - 1) * np.asarray(sf.sn_prime(kappa, r)) / s
    q = (n - 1) / (s * s)
    return p, q


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled solution of the radial equation on ``[eps, R]``.

    G and H are evaluated pointwise from (F, F') at every node, never by
    differencing arrays.
    """

    n: int
    kappa: float
    grid: np.ndarray
    F: np.ndarray
    Fprime: np.ndarray
    G: np.ndarray
    H: np.ndarray

    @property
    def R(self):
        return float(self.grid[-1])

    @property
    def eps(self):
        return float(self.grid[0])

    def evaluate(self, r):
        """Return ``(F(r), F'(r))`` for any ``0 <= r <= R``.

        Points below the first node use the launch series; all others take one
        Runge-Kutta step from the nearest node below, so the result carries the
        same fourth-order accuracy as the nodes themselves.
        """
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        if np.any(r < 0) or np.any(r > self.R * (1 + 1e-12)):
            raise DomainError(f"radius outside [0, {self.R}]")
        r = np.minimum(r, self.R)
        F = np.empty_like(r)
        P = np.empty_like(r)
        low = r < self.grid[0]
        if np.any(low):
            a3 = series_coefficient(self.n, self.kappa)
            rl = r[low]
            F[low] = rl + a3 * rl**3
            P[low] = 1.0 + 3.0 * a3 * rl**2
        hi = ~low
        if np.any(hi):
            rh = r[hi]
            idx = np.clip(np.searchsorted(self.grid, rh, side="right") - 1, 0, len(self.grid) - 1)
            r0 = self.grid[idx]
            h = rh - r0
            y = (self.F[idx].copy(), self.Fprime[idx].copy())
            F[hi], P[hi] = _rk4_step_vec(self.n, self.kappa, r0, h, y)
        if scalar:
            return float(F[0]), float(P[0])
        return F, P

    def gh(self, r):
        """Return ``(G(r), H(r))`` at arbitrary radii in ``(0, R]``."""
        F, P = self.evaluate(r)
        return gh_from_fp(self.n, self.kappa, r, F, P)


def gh_from_fp(n, kappa, r, F, P):
    """G = (F^2)' + (n-1) sn'/sn F^2 and H = F'^2 + (n-1) F^2 / sn^2."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(sf.sn(kappa, r))
    c = np.asarray(sf.sn_prime(kappa, r))
    F = np.asarray(F)
    P = np.asarray(P)
    G = 2.0 * F * P + (n - 1) * c / s * F * F
    H = P * P + (n - 1) * (F / s) ** 2
    if G.ndim == 0:
        return float(G), float(H)
    return G, H


def _rk4_step_vec(n, kappa, r0, h, y):
    F, P = y
    half = r0 + 0.5 * h
    end = r0 + h
    p0, q0 = _coefficients(n, kappa, r0)
    pm, qm = _coefficients(n, kappa, half)
    p1, q1 = _coefficients(n, kappa, end)
    k1f, k1p = P, -p0 * P + q0 * F
    f2, P2 = F + 0.5 * h * k1f, P + 0.5 * h * k1p
    k2f, k2p = P2, -pm * P2 + qm * f2
    f3, P3 = F + 0.5 * h * k2f, P + 0.5 * h * k2p
    k3f, k3p = P3, -pm * P3 + qm * f3
    f4, P4 = F + h * k3f, P + h * k3p
    k4f, k4p = P4, -p1 * P4 + q1 * f4
    Fn = F + h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f)
    Pn = P + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return Fn, Pn


def solve_profile(n, kappa, R, steps=DEFAULT_STEPS):
    """Integrate the radial equation on [eps, R] with eps = 1e-4 R.

    The initial data come from F = r + a3 r^3, which is exact to O(eps^5);
    ``steps`` fixed RK4 steps follow. Raises :class:`RangeError` if R is
    beyond :func:`max_safe_radius`.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {n}")
    if not R > 0:
        raise DomainError(f"radius must be positive, got {R}")
    if steps < 64:
        raise DomainError(f"need at least 64 steps, got {steps}")
    safe = max_safe_radius(n, kappa)
    if R >= safe:
        raise RangeError(
            f"R = {R} too large for n={n}, kappa={kappa}; safe maximum is {safe:.6g}",
            safe_max=safe,
        )
    eps = START_FRACTION * R
    grid = np.linspace(eps, R, steps + 1)
    h = grid[1] - grid[0]
    p_node, q_node = _coefficients(n, kappa, grid)
    p_mid, q_mid = _coefficients(n, kappa, grid[:-1] + 0.5 * h)
    a3 = series_coefficient(n, kappa)
    F = np.empty(steps + 1)
    P = np.empty(steps + 1)
    f, v = eps + a3 * eps**3, 1.0 + 3.0 * a3 * eps**2
    F[0], P[0] = f, v
    h2, h6 = 0.5 * h, h / 6.0
    p_node_l = p_node.tolist()
    q_node_l = q_node.tolist()
    p_mid_l = p_mid.tolist()
    q_mid_l = q_mid.tolist()
    for i in range(steps):
        p0, q0 = p_node_l[i], q_node_l[i]
        pm, qm = p_mid_l[i], q_mid_l[i]
        p1, q1 = p_node_l[i + 1], q_node_l[i + 1]
        k1f, k1p = v, q0 * f - p0 * v
        f2, v2 = f + h2 * k1f, v + h2 * k1p
        k2f, k2p = v2, qm * f2 - pm * v2
        f3, v3 = f + h2 * k2f, v + h2 * k2p
        k3f, k3p = v3, qm * f3 - pm * v3
        f4, v4 = f + h * k3f, v + h * k3p
        k4f, k4p = v4, q1 * f4 - p1 * v4
        f = f + h6 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        v = v + h6 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        F[i + 1] = f
        P[i + 1] = v
    G, H = gh_from_fp(n, kappa, grid, F, P)
    return RadialProfile(n=n, kappa=kappa, grid=grid, F=F, Fprime=P, G=G, H=H)


def sigma1_ball(n, kappa, R, steps=DEFAULT_STEPS):
    """First nonzero Steklov eigenvalue of the geodesic ball of radius R: F'(R)/F(R)."""
    prof = solve_profile(n, kappa, R, steps)
    return float(prof.Fprime[-1] / prof.F[-1])


def radial_weight(n, kappa, r):
    return np.asarray(sf.sn(kappa, r)) ** (n - 1)


def gh_integrals(profile):
    """Return (int_0^R H sn^(n-1) dr, int_0^R G sn^(n-1) dr) by composite Simpson.

    The sliver [0, eps] is added from the leading-order behaviour
    H ~ n, G ~ (n + 1) r.
    """
    n = profile.n
    w = radial_weight(n, profile.kappa, profile.grid)
    eps = profile.eps
    int_h = simpson(profile.H * w, x=profile.grid) + eps**n
    int_g = simpson(profile.G * w, x=profile.grid) + eps ** (n + 1)
    return float(int_h), float(int_g)


def sigma1_via_GH(n, kappa, R, steps=DEFAULT_STEPS):
    """sigma_1 of the ball as the ratio of the volume integrals of H and G."""
    int_h, int_g = gh_integrals(solve_profile(n, kappa, R, steps))
    return int_h / int_g


def rayleigh_quotient(profile, phi):
    """Radial Steklov quotient of a trial function sampled on ``profile.grid``.

    ``Q(phi) = int (phi'^2 + (n-1) phi^2 / sn^2) sn^(n-1) dr / (phi(R)^2 sn(R)^(n-1))``
    with phi' from second-order centered differences.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != profile.grid.shape:
        raise DomainError("phi must be sampled on the profile grid")
    if phi[-1] == 0:
        raise DomainError("phi(R) must be nonzero")
    n, kappa, r = profile.n, profile.kappa, profile.grid
    s = np.asarray(sf.sn(kappa, r))
    dphi = np.gradient(phi, r, edge_order=2)
    integrand = (dphi**2 + (n - 1) * (phi / s) ** 2) * s ** (n - 1)
    # on [0, eps] phi is taken linear, where the integrand is n (phi(eps)/eps)^2 r^(n-1)
    num = simpson(integrand, x=r) + (phi[0] / r[0]) ** 2 * r[0] ** n
    return float(num / (phi[-1] ** 2 * s[-1] ** (n - 1)))


_PROFILE_CACHE: dict = {}


def cached_profile(n, kappa, r_needed):
    """Return a profile for (n, kappa) covering ``[0, r_needed]``, reusing earlier ones."""
    key = (int(n), float(kappa))
    prof = _PROFILE_CACHE.get(key)
    if prof is None or prof.R < r_needed:
        R = max(1.0, 1.25 * r_needed) if prof is None else max(2.0 * prof.R, 1.25 * r_needed)
        R = min(R, 0.99 * max_safe_radius(n, kappa))
        if R < r_needed:
            R = r_needed
        prof = solve_profile(n, kappa, R)
        _PROFILE_CACHE[key] = prof
    return prof


def gh_values(n, kappa, r):
    """Point values (G(r), H(r)) from a cached profile."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise DomainError("r must be positive")
    prof = cached_profile(n, kappa, float(np.max(r_arr)))
    return prof.gh(r)
