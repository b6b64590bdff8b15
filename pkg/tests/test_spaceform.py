import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from steklov import spaceform as sf
from steklov.errors import DomainError


def test_sn_branches():
    assert sf.sn(0.0, 2.0) == 2.0
    assert sf.sn(-1.0, 1.0) == pytest.approx(math.sinh(1.0), rel=1e-14)
    assert sf.sn(4.0, 0.3) == pytest.approx(math.sin(0.6) / 2.0, rel=1e-14)
    assert sf.sn_prime(0.0, 5.0) == 1.0
    assert sf.sn_prime(-1.0, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-14)


def test_sn_continuous_at_zero_curvature():
    assert abs(sf.sn(-1e-14, 1.0) - 1.0) <= 1e-12
    assert abs(sf.sn(1e-14, 1.0) - 1.0) <= 1e-12
    # either side of the series threshold
    for t in (0.999e-3, 1.001e-3):
        a = sf.sn(-1.0, t)
        assert a == pytest.approx(math.sinh(t), rel=1e-14)


def test_sn_vectorised():
    t = np.linspace(0, 3, 7)
    np.testing.assert_allclose(sf.sn(-1.0, t), np.sinh(t), rtol=1e-14)
    assert isinstance(sf.sn(-1.0, 0.5), float)


@pytest.mark.parametrize("kappa", [0.0, -0.25, -1.0, -4.0])
def test_wronskian_identity_and_positivity(kappa):
    t = np.linspace(1e-3, 20.0, 400)
    s, c, s2 = sf.sn(kappa, t), sf.sn_prime(kappa, t), sf.sn_second(kappa, t)
    assert np.all(s > 0)
    assert np.all(c >= 1.0)
    # both products grow like e^(2 sqrt(-kappa) t), so the residual is measured against c^2
    resid = np.abs(s * s2 - c * c + 1.0) / np.maximum(1.0, c * c)
    assert np.all(resid <= 1e-10)


def test_wronskian_at_spec_point():
    t = 0.7
    val = sf.sn(-1, t) * sf.sn_second(-1, t) - sf.sn_prime(-1, t) ** 2
    assert val == pytest.approx(-1.0, abs=1e-14)


def test_ball_volume_examples():
    assert sf.ball_volume(2, 0.0, 1.0) == pytest.approx(math.pi, rel=1e-14)
    assert sf.ball_volume(3, 0.0, 2.0) == pytest.approx(32 * math.pi / 3, rel=1e-14)
    exact = 4 * math.pi * math.sinh(0.5) ** 2
    assert sf.ball_volume(2, -1.0, 1.0) == pytest.approx(exact, rel=1e-13)
    assert exact == pytest.approx(2 * math.pi * (math.cosh(1.0) - 1.0), rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("kappa", [0.0, -0.5, -1.0])
@pytest.mark.parametrize("r", [0.01, 0.5, 2.0])
def test_closed_forms_match_quadrature(n, kappa, r):
    assert sf.ball_volume(n, kappa, r) == pytest.approx(sf.ball_volume_quad(n, kappa, r), rel=1e-11)


def test_sphere_area_examples():
    assert sf.sphere_area(2, 0.0, 1.0) == pytest.approx(2 * math.pi)
    assert sf.sphere_area(2, -1.0, 1.0) == pytest.approx(2 * math.pi * math.sinh(1.0), rel=1e-14)
    assert sf.sphere_area(3, 0.0, 2.0) == pytest.approx(16 * math.pi)


def test_radius_from_volume_examples():
    assert sf.radius_from_volume(2, 0.0, math.pi) == pytest.approx(1.0, abs=1e-14)
    v = 4 * math.pi * math.sinh(0.5) ** 2
    assert abs(sf.radius_from_volume(2, -1.0, v) - 1.0) <= 1e-6
    assert sf.radius_from_volume(3, 0.0, 32 * math.pi / 3) == pytest.approx(2.0, abs=1e-14)
    # the root finder path (no closed-form inverse)
    assert abs(sf.solve_radius(2, -1.0, v) - 1.0) <= 1e-12


def test_radius_from_volume_rejects_nonpositive():
    with pytest.raises(DomainError):
        sf.radius_from_volume(2, 0.0, 0.0)
    with pytest.raises(DomainError):
        sf.radius_from_volume(3, -1.0, -1.0)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 5),
    kappa=st.floats(-4.0, 0.0),
    r=st.floats(0.01, 4.0),
)
@example(n=4, kappa=-4.0, r=4.0)
@example(n=3, kappa=-2.225073858507203e-309, r=1.0)
def test_volume_radius_roundtrip(n, kappa, r):
    v = sf.ball_volume(n, kappa, r)
    r2 = sf.radius_from_volume(n, kappa, v)
    assert r2 == pytest.approx(r, rel=1e-8)
    assert abs(sf.ball_volume(n, kappa, r2) - v) <= 1e-10 * v


def test_bound_constant_examples():
    assert sf.bound_constant(2, -1.0, -1.0, 3.0) == 1.0
    assert sf.bound_constant(2, 0.0, -1.0, 1.0) == pytest.approx(math.sinh(1.0) ** 2, rel=1e-14)
    assert sf.bound_constant(2, 0.0, -1.0, 2.0) == pytest.approx((math.sinh(2) / 2) ** 2, rel=1e-14)
    assert sf.bound_constant(4, 0.0, -1.0, 1.0) == pytest.approx(math.sinh(1.0) ** 6, rel=1e-14)
    with pytest.raises(DomainError):
        sf.bound_constant(2, -1.0, 0.0, 1.0)


@pytest.mark.parametrize("bigK,kappa", [(-1.0, 0.0), (-1.0, -0.5), (-4.0, -1.0)])
def test_sn_ratio_nondecreasing(bigK, kappa):
    d = np.linspace(0.01, 10.0, 2000)
    ratio = sf.sn_ratio(bigK, kappa, d)
    assert np.all(np.diff(ratio) >= -1e-12)
    assert np.all(ratio >= 1.0 - 1e-15)


def test_isoperimetric_profile():
    assert sf.isoperimetric_profile(2, 0.0, math.pi) == pytest.approx(2 * math.pi)
    assert sf.isoperimetric_profile(3, 0.0, 4 * math.pi / 3) == pytest.approx(4 * math.pi)
    assert sf.isoperimetric_profile(2, -1.0, math.pi) > sf.isoperimetric_profile(2, 0.0, math.pi)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("kp,k", [(-1.0, 0.0), (-1.0, -0.5), (-4.0, -1.0)])
def test_isoperimetric_comparison(n, kp, k):
    t = np.geomspace(1e-3, 50.0, 60)
    lower = np.array([sf.isoperimetric_profile(n, kp, x) for x in t])
    upper = np.array([sf.isoperimetric_profile(n, k, x) for x in t])
    assert np.all(lower >= upper * (1 - 1e-12))


def test_curvature_spec_invariants():
    sf.CurvatureSpec(2, -1.0, 0.0, -1.0)
    with pytest.raises(DomainError):
        sf.CurvatureSpec(2, -1.0, -2.0, -1.0)
    with pytest.raises(DomainError):
        sf.CurvatureSpec(1, 0.0, 0.0, 0.0)


def test_space_form_ball():
    b = sf.SpaceFormBall(2, -1.0, 1.0)
    assert b.volume == pytest.approx(2 * math.pi * (math.cosh(1) - 1))
    with pytest.raises(DomainError):
        sf.SpaceFormBall(2, 1.0, 4.0)
    with pytest.raises(DomainError):
        sf.SpaceFormBall(2, 0.0, 0.0)
