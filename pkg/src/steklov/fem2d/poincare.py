"""Poincare disk model of the hyperbolic plane with curvature kappa0 < 0.

Points are planar coordinates inside the unit disk. The metric is
``rho(x)^2 |dx|^2`` with ``rho(x) = 2 / ((1 - |x|^2) sqrt(-kappa0))``.
"""

import math

import numpy as np


def conformal_factor(x, kappa0):
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    return 2.0 / ((1.0 - r2) * math.sqrt(-kappa0))


def _c(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1]


def _xy(z):
    return np.stack([z.real, z.imag], axis=-1)


def mobius_to_origin(p, x):
    """Isometry z -> (z - p) / (1 - conj(p) z) sending p to the origin."""
    zp = complex(p[0], p[1])
    z = _c(x)
    return _xy((z - zp) / (1.0 - np.conj(zp) * z))


def mobius_from_origin(p, x):
    """Inverse of :func:`mobius_to_origin`: sends the origin to p."""
    zp = complex(p[0], p[1])
    z = _c(x)
    return _xy((z + zp) / (1.0 + np.conj(zp) * z))


def chart_to_model(x, kappa0):
    """Map geodesic polar coordinates about the origin into the disk model.

    A chart point at Euclidean radius t goes to model radius tanh(sqrt(-kappa0) t / 2),
    so chart radii are geodesic distances from the origin.
    """
    x = np.asarray(x, dtype=float)
    t = np.linalg.norm(x, axis=-1)
    a = math.sqrt(-kappa0)
    scale = np.empty_like(t)
    small = t < 1e-8
    scale[small] = 0.5 * a
    scale[~small] = np.tanh(0.5 * a * t[~small]) / t[~small]
    return x * scale[..., None]


def distance_from(p, x, kappa0):
    """Hyperbolic distance from p to each x, via the Mobius translate (stable near 0)."""
    w = mobius_to_origin(p, x)
    s = np.minimum(np.linalg.norm(w, axis=-1), 1.0 - 1e-16)
    return 2.0 * np.arctanh(s) / math.sqrt(-kappa0)


def directions_from(p, x):
    """Unit tangent directions at p of the geodesics towards each x.

    The Mobius map to the origin has a positive real derivative at p, so the
    direction at p equals the direction of the translated point at the origin.
    """
    w = mobius_to_origin(p, x)
    nrm = np.linalg.norm(w, axis=-1, keepdims=True)
    return w / np.where(nrm > 0, nrm, 1.0), nrm[..., 0]


def pairwise_max_distance(x, kappa0, chunk=512):
    """Largest hyperbolic distance between any two of the given points."""
    x = np.asarray(x, dtype=float)
    denom = 1.0 - np.sum(x * x, axis=1)
    best = 0.0
    for i in range(0, len(x), chunk):
        xi = x[i : i + chunk]
        d2 = np.sum((xi[:, None, :] - x[None, :, :]) ** 2, axis=-1)
        arg = d2 / (denom[i : i + chunk, None] * denom[None, :])
        best = max(best, float(arg.max()))
    return math.acosh(1.0 + 2.0 * best) / math.sqrt(-kappa0)
