import math

import numpy as np
import pytest
import sympy

from oracles import hyperbolic_disk_F, hyperbolic_disk_sigma1
from steklov import radial
from steklov.errors import DomainError, RangeError


def test_tanh_profile_solves_the_equation_symbolically():
    r = sympy.symbols("r", positive=True)
    F = 2 * sympy.tanh(r / 2)
    s = sympy.sinh(r)
    n = 2
    ode = sympy.diff(F, r, 2) + (n - 1) * sympy.cosh(r) / s * sympy.diff(F, r) - (n - 1) / s**2 * F
    assert sympy.simplify(ode.rewrite(sympy.exp)) == 0
    assert sympy.limit(sympy.diff(F, r), r, 0) == 1


def test_series_coefficient():
    assert radial.series_coefficient(3, 0.0) == 0.0
    # 2 tanh(r/2) = r - r^3/12 + ...
    assert radial.series_coefficient(2, -1.0) == pytest.approx(-1.0 / 12.0)


def test_euclidean_profile_is_linear():
    p = radial.solve_profile(2, 0.0, 1.0, 256)
    assert np.max(np.abs(p.F - p.grid)) <= 1e-10


def test_hyperbolic_profile_matches_tanh():
    p = radial.solve_profile(2, -1.0, 1.0)
    ref = hyperbolic_disk_F(p.grid)
    assert np.max(np.abs(p.F / ref - 1.0)) <= 1e-8


def test_h_equals_n_for_euclidean_profile():
    p = radial.solve_profile(3, 0.0, 1.0, 256)
    np.testing.assert_allclose(p.H, 3.0, rtol=1e-10)


@pytest.mark.parametrize("n,R", [(2, 2.0), (5, 1.0), (3, 0.5)])
def test_sigma1_ball_euclidean(n, R):
    assert radial.sigma1_ball(n, 0.0, R) == pytest.approx(1.0 / R, rel=1e-10)


def test_sigma1_ball_hyperbolic():
    assert radial.sigma1_ball(2, -1.0, 1.0) == pytest.approx(hyperbolic_disk_sigma1(1.0), rel=1e-9)
    fine = radial.sigma1_ball(2, -1.0, 1.0, steps=8192)
    assert radial.sigma1_ball(2, -1.0, 1.0) == pytest.approx(fine, rel=1e-10)


def test_sigma1_via_gh_examples():
    assert radial.sigma1_via_GH(2, 0.0, 1.0) == pytest.approx(1.0, rel=1e-9)
    assert radial.sigma1_via_GH(2, -1.0, 1.0) == pytest.approx(0.850918, abs=1e-6)
    assert radial.sigma1_via_GH(3, -0.5, 2.0) == pytest.approx(radial.sigma1_ball(3, -0.5, 2.0), rel=1e-6)


@pytest.mark.parametrize("c", [0.5, 2.0, 4.0])
@pytest.mark.parametrize("n,kappa,R", [(2, -1.0, 1.0), (3, -0.5, 2.0), (4, -1.0, 0.5)])
def test_scaling_law(c, n, kappa, R):
    a = radial.sigma1_ball(n, kappa / c**2, c * R)
    b = radial.sigma1_ball(n, kappa, R) / c
    assert a == pytest.approx(b, rel=1e-8)


def test_rayleigh_quotient_examples():
    p = radial.solve_profile(2, 0.0, 1.0, 4096)
    assert radial.rayleigh_quotient(p, p.grid) == pytest.approx(1.0, rel=1e-8)
    # exact value of the quadratic trial function, by symbolic integration
    r = sympy.symbols("r", positive=True)
    phi = r**2
    exact = sympy.integrate((sympy.diff(phi, r) ** 2 + phi**2 / r**2) * r, (r, 0, 1)) / phi.subs(r, 1) ** 2
    assert exact == sympy.Rational(5, 4)
    assert radial.rayleigh_quotient(p, p.grid**2) == pytest.approx(float(exact), rel=1e-6)
    hp = radial.solve_profile(3, -1.0, 1.5)
    assert radial.rayleigh_quotient(hp, hp.F) == pytest.approx(hp.Fprime[-1] / hp.F[-1], rel=1e-4)


def test_rayleigh_quotient_rejects_zero_boundary_value():
    p = radial.solve_profile(2, 0.0, 1.0, 128)
    with pytest.raises(DomainError):
        radial.rayleigh_quotient(p, p.grid * (1.0 - p.grid))


@pytest.mark.parametrize("n,kappa,R", [(2, 0.0, 1.0), (3, -1.0, 1.5), (2, -1.0, 2.0)])
def test_minimality_of_profile(n, kappa, R):
    rng = np.random.default_rng(7)
    p = radial.solve_profile(n, kappa, R, 2048)
    s1 = p.Fprime[-1] / p.F[-1]
    x = p.grid / R
    for _ in range(50):
        coef = rng.normal(size=5)
        phi = x * (1.0 + coef[0] * x + coef[1] * x**2 + coef[2] * np.sin(3 * x) + coef[3] * x**4)
        if abs(phi[-1]) < 1e-3:
            continue
        assert radial.rayleigh_quotient(p, phi) >= s1 * (1 - 1e-4)


def test_gh_values():
    G, H = radial.gh_values(2, 0.0, 1.0)
    assert (G, H) == (pytest.approx(3.0, rel=1e-9), pytest.approx(2.0, rel=1e-9))
    G, H = radial.gh_values(4, 0.0, 0.5)
    assert (G, H) == (pytest.approx(2.5, rel=1e-9), pytest.approx(4.0, rel=1e-9))
    F = 2 * math.tanh(0.5)
    Fp = 1 / math.cosh(0.5) ** 2
    G_ref = 2 * F * Fp + math.cosh(1) / math.sinh(1) * F**2
    H_ref = Fp**2 + (F / math.sinh(1)) ** 2
    G, H = radial.gh_values(2, -1.0, 1.0)
    assert G == pytest.approx(G_ref, abs=1e-6)
    assert H == pytest.approx(H_ref, abs=1e-6)


def test_profile_evaluate_between_nodes():
    p = radial.solve_profile(2, -1.0, 2.0)
    r = np.array([1e-6, 0.123456, 1.7777, 2.0])
    F, P = p.evaluate(r)
    np.testing.assert_allclose(F, hyperbolic_disk_F(r), rtol=1e-9)
    np.testing.assert_allclose(P, 1 / np.cosh(r / 2) ** 2, rtol=1e-8)
    with pytest.raises(DomainError):
        p.evaluate(2.5)


def test_profile_invariants():
    for n, kappa in [(2, -1.0), (3, -0.5), (4, 0.0)]:
        p = radial.solve_profile(n, kappa, 3.0)
        assert np.all(p.F[1:] > 0) and np.all(p.Fprime[1:] > 0)
        w = np.asarray(radial.radial_weight(n, kappa, p.grid)) * p.Fprime
        assert np.all(np.diff(w) >= -1e-9)


def test_fourth_order_convergence():
    exact = hyperbolic_disk_sigma1(2.0)
    errs = [abs(radial.sigma1_ball(2, -1.0, 2.0, steps=s) - exact) for s in (64, 128, 256)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    for q in ratios:
        assert 12.0 < q < 20.0


def test_overflow_reports_safe_maximum():
    with pytest.raises(RangeError) as info:
        radial.solve_profile(3, -1.0, 1000.0)
    assert info.value.safe_max == pytest.approx(350.0)


def test_bad_arguments():
    with pytest.raises(DomainError):
        radial.solve_profile(2, 0.0, 1.0, steps=10)
    with pytest.raises(DomainError):
        radial.solve_profile(2, 0.0, -1.0)
