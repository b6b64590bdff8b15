"""Closed-form geometry of the simply connected space forms M_kappa.

Everything here is radial: the generalized sine ``sn``, volumes of geodesic
balls, areas of geodesic spheres, their inverse, and the comparison constant
``(sn_K(d) / sn_kappa(d)) ** (2n - 2)``.

Functions accept scalars or numpy arrays for the radius argument and return a
float for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError

#: below this value of |kappa| t^2 the Taylor branch of sn / sn' is used
SERIES_THRESHOLD = 1e-6

QUAD_TOL = 1e-12
# below this |kappa| r^2 the curvature correction to volumes is under one ulp
FLAT_THRESHOLD = 1e-18
_MAX_SIMPSON_DEPTH = 48


@dataclass(frozen=True)
class CurvatureSpec:
    """Dimension, ambient model curvature and the two comparison curvatures.

    ``kappa`` bounds the sectional curvature from above and ``bigK`` bounds the
    Ricci curvature from below; ``kappa0`` is the curvature of the concrete
    ambient model the domain lives in.
    """

    n: int
    kappa0: float
    kappa: float
    bigK: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        if not self.bigK <= self.kappa0 <= self.kappa <= 0.0:
            raise DomainError(
                "curvatures must satisfy K <= kappa0 <= kappa <= 0, got "
                f"K={self.bigK}, kappa0={self.kappa0}, kappa={self.kappa}"
            )


@dataclass(frozen=True)
class SpaceFormBall:
    """Geodesic ball of a given radius in the n-dimensional space form M_kappa."""

    n: int
    kappa: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius}")
        if self.kappa > 0 and self.radius >= math.pi / math.sqrt(self.kappa):
            raise DomainError("radius must be below pi/sqrt(kappa) for kappa > 0")

    @property
    def volume(self):
        return ball_volume(self.n, self.kappa, self.radius)

    @property
    def boundary_area(self):
        return sphere_area(self.n, self.kappa, self.radius)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def sn(kappa, t):
    """Generalized sine: the solution of f'' + kappa f = 0, f(0) = 0, f'(0) = 1."""
    t = np.asarray(t, dtype=float)
    kt2 = kappa * t * t
    if kappa == 0:
        res = t.copy()
    elif kappa > 0:
        s = math.sqrt(kappa)
        res = np.sin(s * t) / s
    else:
        s = math.sqrt(-kappa)
        with np.errstate(over="ignore"):
            res = np.sinh(s * t) / s
    small = np.abs(kt2) < SERIES_THRESHOLD
    if kappa != 0 and np.any(small):
        series = t * (1.0 - kt2 / 6.0 + kt2 * kt2 / 120.0)
        res = np.where(small, series, res)
    return _out(res)


def sn_prime(kappa, t):
    """Derivative of :func:`sn` in t (the matching cosine-type function)."""
    t = np.asarray(t, dtype=float)
    kt2 = kappa * t * t
    if kappa == 0:
        res = np.ones_like(t)
    elif kappa > 0:
        res = np.cos(math.sqrt(kappa) * t)
    else:
        with np.errstate(over="ignore"):
            res = np.cosh(math.sqrt(-kappa) * t)
    small = np.abs(kt2) < SERIES_THRESHOLD
    if kappa != 0 and np.any(small):
        series = 1.0 - kt2 / 2.0 + kt2 * kt2 / 24.0
        res = np.where(small, series, res)
    return _out(res)


def sn_second(kappa, t):
    """Second derivative of :func:`sn`, equal to ``-kappa * sn``."""
    return _out(-kappa * np.asarray(sn(kappa, t)))


def unit_sphere_area(n):
    """Area n * omega_n of the unit (n-1)-sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def unit_ball_volume(n):
    """Volume omega_n of the unit ball in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_area(n, kappa, r):
    """Area of the geodesic sphere of radius r in M_kappa: n omega_n sn^(n-1)."""
    return _out(unit_sphere_area(n) * np.asarray(sn(kappa, r)) ** (n - 1))


def adaptive_simpson(f, a, b, tol=QUAD_TOL):
    """Integrate a scalar function on [a, b] by adaptive Simpson.

    The local acceptance test is ``|S2 - S1| <= 15 * eps`` with the tolerance
    split between halves; ``tol`` acts as both absolute and relative tolerance.
    Raises :class:`QuadratureError` if the depth limit is hit before the
    tolerance is met.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # crude scale so the tolerance behaves relatively for large integrands
    scale = max(abs(whole), 1.0)
    total = 0.0
    worst = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol * scale, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if abs(delta) <= 15.0 * eps or depth >= _MAX_SIMPSON_DEPTH:
            if abs(delta) > 15.0 * eps:
                worst = max(worst, abs(delta) / 15.0)
            total += left + right + delta / 15.0
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    if worst > 0.0:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a}, {b}]", achieved=worst
        )
    return total


def ball_volume_quad(n, kappa, r):
    """Ball volume by adaptive quadrature of n omega_n sn^(n-1) (scalar r)."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    integral = adaptive_simpson(lambda t: sn(kappa, t) ** (n - 1), 0.0, float(r))
    return unit_sphere_area(n) * integral


def _ball_volume_closed(n, kappa, r):
    if kappa == 0 or abs(kappa) * float(np.max(r)) ** 2 < FLAT_THRESHOLD:
        return unit_ball_volume(n) * r**n
    if n == 2 and kappa < 0:
        a = math.sqrt(-kappa)
        return 4.0 * math.pi * np.sinh(0.5 * a * r) ** 2 / (a * a)
    if n == 3 and kappa < 0:
        a = math.sqrt(-kappa)
        x = 2.0 * a * r
        x2 = x * x
        # sinh(x) - x loses all digits for small x; switch to its series
        with np.errstate(over="ignore"):
            direct = np.sinh(x) - x
        series = x * x2 / 6.0 * (1.0 + x2 / 20.0 + x2 * x2 / 840.0 + x2**3 / 60480.0)
        return math.pi / a**3 * np.where(x < 0.1, series, direct)
    return None


def ball_volume(n, kappa, r):
    """Volume m_kappa(r) of the geodesic ball of radius r in M_kappa.

    Closed forms are used for kappa = 0 and for n = 2, 3; every other case goes
    through :func:`adaptive_simpson`. :func:`ball_volume_quad` always integrates
    and serves as the cross-check.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radius must be positive")
    closed = _ball_volume_closed(n, kappa, r)
    if closed is not None:
        return _out(closed)
    if r.ndim == 0:
        return ball_volume_quad(n, kappa, float(r))
    return np.array([ball_volume_quad(n, kappa, float(x)) for x in r.ravel()]).reshape(
        r.shape
    )


def solve_radius(n, kappa, volume, max_iter=100):
    """Invert m_kappa by bisection to a 1e-3 bracket followed by safeguarded Newton.

    Valid for kappa <= 0, where the Euclidean radius of the same volume is an
    upper bracket, and for kappa > 0 below the volume of the whole sphere.
    """
    if not volume > 0:
        raise DomainError(f"volume must be positive, got {volume}")
    lo = 0.0
    hi = (volume / unit_ball_volume(n)) ** (1.0 / n)
    if kappa > 0:
        hi = math.pi / math.sqrt(kappa)
        if ball_volume(n, kappa, hi) < volume:
            raise DomainError("volume exceeds the volume of the space form")
    else:
        # the Euclidean radius is a valid but possibly huge bracket (sinh overflows
        # far below it); double up from the curvature scale instead
        if kappa < 0:
            hi = min(hi, 1.0 / math.sqrt(-kappa))
        while ball_volume(n, kappa, hi) < volume:
            hi *= 2.0
    it = 0
    while hi - lo > 1e-3 * hi and it < max_iter:
        mid = 0.5 * (lo + hi)
        if ball_volume(n, kappa, mid) < volume:
            lo = mid
        else:
            hi = mid
        it += 1
    r = 0.5 * (lo + hi)
    for _ in range(max_iter - it):
        resid = ball_volume(n, kappa, r) - volume
        if resid < 0:
            lo = r
        else:
            hi = r
        step = resid / sphere_area(n, kappa, r)
        new = r - step
        if not lo <= new <= hi:
            new = 0.5 * (lo + hi)
        if abs(new - r) <= 4e-16 * r:
            return new
        r = new
    return r


def radius_from_volume(n, kappa, volume):
    """Radius of the geodesic ball of the given volume in M_kappa (kappa <= 0)."""
    v = np.asarray(volume, dtype=float)
    if np.any(v <= 0):
        raise DomainError("volume must be positive")
    r0 = (v / unit_ball_volume(n)) ** (1.0 / n)
    if kappa == 0 or abs(kappa) * float(np.max(r0)) ** 2 < FLAT_THRESHOLD:
        return _out(r0)
    if n == 2 and kappa < 0:
        a = math.sqrt(-kappa)
        return _out(2.0 * np.arcsinh(a * np.sqrt(v / (4.0 * math.pi))) / a)
    if v.ndim == 0:
        return solve_radius(n, kappa, float(v))
    return np.array([solve_radius(n, kappa, float(x)) for x in v.ravel()]).reshape(v.shape)


def isoperimetric_profile(n, kappa, t):
    """Boundary area of the geodesic ball of volume t in M_kappa."""
    return sphere_area(n, kappa, radius_from_volume(n, kappa, t))


def sn_ratio(bigK, kappa, d):
    """``sn_K(d) / sn_kappa(d)``, non-decreasing in d when K <= kappa."""
    return _out(np.asarray(sn(bigK, d)) / np.asarray(sn(kappa, d)))


def bound_constant(n, kappa, bigK, d):
    """The comparison constant (sn_K(d) / sn_kappa(d)) ** (2n - 2).

    Requires K <= kappa <= 0 and d > 0; the result is >= 1 and equals 1 when
    K == kappa.
    """
    if bigK > kappa:
        raise DomainError(f"need K <= kappa, got K={bigK} > kappa={kappa}")
    if kappa > 0:
        raise DomainError(f"need kappa <= 0, got {kappa}")
    if not d > 0:
        raise DomainError(f"diameter must be positive, got {d}")
    if bigK == kappa:
        return 1.0
    ratio = sn(bigK, d) / sn(kappa, d)
    return float(max(ratio, 1.0) ** (2 * n - 2))
