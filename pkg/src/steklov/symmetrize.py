"""Spherical rearrangements of weighted samples and the volume-transfer radius.

A function on a domain is represented by a :class:`WeightedSampleSet`: pairs of
value and measure (e.g. element averages with element areas). Rearrangements
sort the samples and stack them as concentric shells of a geodesic ball in
M_kappa, each shell carrying exactly the measure of its sample, so every L^s
norm is preserved up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spaceform as sf
from .errors import DomainError


@dataclass(frozen=True, eq=False)
class WeightedSampleSet:
    values: np.ndarray
    measures: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        m = np.asarray(self.measures, dtype=float).ravel()
        if v.shape != m.shape:
            raise DomainError("values and measures must have the same length")
        if np.any(~(m > 0)):
            raise DomainError("all sample measures must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "measures", m)

    @property
    def total_measure(self):
        return float(np.sum(self.measures))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Piecewise-constant radial function on a geodesic ball of M_kappa.

    ``breaks`` holds ``0 = r_0 < r_1 < ... < r_m``; ``values[k]`` is the value on
    the shell ``(r_k, r_{k+1}]``.
    """

    n: int
    kappa: float
    breaks: np.ndarray
    values: np.ndarray
    monotonicity: str = "none"

    def __post_init__(self):
        if self.monotonicity not in ("none", "nonincreasing", "nondecreasing"):
            raise DomainError(f"unknown monotonicity tag {self.monotonicity!r}")
        if len(self.breaks) != len(self.values) + 1:
            raise DomainError("need one more breakpoint than values")

    @property
    def radius(self):
        return float(self.breaks[-1])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        idx = np.clip(np.searchsorted(self.breaks, r, side="left") - 1, 0, len(self.values) - 1)
        out = self.values[idx]
        return float(out) if out.ndim == 0 else out

    def shell_measures(self):
        vol = np.empty(len(self.breaks))
        vol[0] = 0.0
        vol[1:] = sf.ball_volume(self.n, self.kappa, self.breaks[1:])
        return np.diff(vol)

    def is_monotone(self):
        d = np.diff(self.values)
        if self.monotonicity == "nonincreasing":
            return bool(np.all(d <= 0))
        if self.monotonicity == "nondecreasing":
            return bool(np.all(d >= 0))
        return True


def superlevel_measure(samples, t):
    """mu_f(t): total measure of the samples whose value exceeds t."""
    return float(np.sum(samples.measures[samples.values > t]))


def _rearrange(samples, n, kappa, order, tag):
    if len(samples) == 0:
        raise DomainError("cannot rearrange an empty sample set")
    cum = np.cumsum(samples.measures[order])
    radii = np.atleast_1d(sf.radius_from_volume(n, kappa, cum))
    breaks = np.concatenate(([0.0], radii))
    return RadialFunction(n, kappa, breaks, samples.values[order].copy(), tag)


def rearrange_decreasing(samples, n, kappa):
    """Spherical decreasing rearrangement f^* on the ball of equal volume in M_kappa."""
    order = np.argsort(-samples.values, kind="stable")
    return _rearrange(samples, n, kappa, order, "nonincreasing")


def rearrange_increasing(samples, n, kappa):
    """Spherical increasing rearrangement f_*: the largest values sit at the rim."""
    order = np.argsort(samples.values, kind="stable")
    return _rearrange(samples, n, kappa, order, "nondecreasing")


def ls_norm(obj, s, n=None, kappa=None):
    """L^s norm of a sample set or of a piecewise-constant radial function.

    Radial functions are integrated against the geodesic-polar volume element
    of M_kappa, i.e. shell measures are differences of ball volumes.
    """
    if s < 1:
        raise DomainError(f"need s >= 1, got {s}")
    if isinstance(obj, WeightedSampleSet):
        return float(np.sum(np.abs(obj.values) ** s * obj.measures) ** (1.0 / s))
    if isinstance(obj, RadialFunction):
        if n is not None and n != obj.n or kappa is not None and kappa != obj.kappa:
            raise DomainError("n / kappa do not match the radial function")
        return float(np.sum(np.abs(obj.values) ** s * obj.shell_measures()) ** (1.0 / s))
    raise TypeError(f"unsupported object {type(obj).__name__}")


@dataclass(frozen=True)
class EtaTransfer:
    """Volume transfer eta from M_{source_kappa} to M_{target_kappa}.

    eta(r) is the radius of the ball in M_{target_kappa} whose volume equals that
    of the radius-r ball in M_{source_kappa}.
    """

    n: int
    source_kappa: float
    target_kappa: float

    def __post_init__(self):
        if not self.source_kappa <= self.target_kappa <= 0:
            raise DomainError(
                "need source_kappa <= target_kappa <= 0, got "
                f"{self.source_kappa}, {self.target_kappa}"
            )

    @property
    def is_identity(self):
        return self.source_kappa == self.target_kappa

    def __call__(self, r):
        return eta_transfer(self, r)

    def derivative(self, r):
        return eta_derivative(self, r)


def eta_transfer(t, r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    if t.is_identity:
        return float(r) if r.ndim == 0 else r.copy()
    vol = sf.ball_volume(t.n, t.source_kappa, r)
    return sf.radius_from_volume(t.n, t.target_kappa, vol)


def eta_derivative(t, r):
    """eta'(r) = |dB_r| in the source form over |dB_eta(r)| in the target form."""
    r = np.asarray(r, dtype=float)
    if t.is_identity:
        return float(np.ones_like(r)) if r.ndim == 0 else np.ones_like(r)
    return sf.sphere_area(t.n, t.source_kappa, r) / np.asarray(
        sf.sphere_area(t.n, t.target_kappa, eta_transfer(t, r))
    )


def sector_samples(transfer, f, sector_radii, nr, weights=None):
    """Sample f(eta(r_p)) on a star-shaped domain of M_{source_kappa}.

    The domain is a union of angular sectors about p, sector j reaching out to
    geodesic radius ``sector_radii[j]`` and covering the fraction ``weights[j]``
    of the unit sphere (equal fractions by default). Each sector is cut into
    ``nr`` shells; every cell carries its exact measure and the value of f at
    the cell's outer radius. For monotone f this is the cell supremum
    (non-decreasing f) or infimum (non-increasing f).
    """
    rho = np.asarray(sector_radii, dtype=float)
    if weights is None:
        weights = np.full(len(rho), 1.0 / len(rho))
    n, kp = transfer.n, transfer.source_kappa
    vals, meas = [], []
    for rj, wj in zip(rho, weights):
        edges = np.linspace(0.0, rj, nr + 1)
        vol = np.concatenate(([0.0], sf.ball_volume(n, kp, edges[1:])))
        meas.append(wj * np.diff(vol))
        vals.append(f(transfer(edges[1:])))
    return WeightedSampleSet(np.concatenate(vals), np.concatenate(meas))


def domination_margins(samples, f, n, kappa, kind):
    """Shell-wise margins of the comparison between a rearrangement and f(r_q).

    kind="increasing" (f non-decreasing): ``f_*`` on shell k minus the maximum
    of f(r_q) over that shell, i.e. ``v_k - f(r_{k+1})``.
    kind="decreasing" (f non-increasing): ``f(r_{k+1}) - v_k`` for ``f^*``.
    Non-negative margins mean the pointwise domination holds on every shell.
    """
    if kind == "increasing":
        rf = rearrange_increasing(samples, n, kappa)
        return rf.values - f(rf.breaks[1:])
    if kind == "decreasing":
        rf = rearrange_decreasing(samples, n, kappa)
        return f(rf.breaks[1:]) - rf.values
    raise DomainError(f"kind must be 'increasing' or 'decreasing', got {kind!r}")
