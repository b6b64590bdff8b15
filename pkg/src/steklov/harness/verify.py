"""Full verification of the curvature-corrected Brock-Weinstock bound on one domain.

A domain is meshed at ``refinements`` levels (h, h/2, h/4, ...). The first
nonzero Steklov eigenvalue is Richardson-extrapolated from the two finest
levels, and the bound and the diagnostic chain are evaluated on the finest mesh.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .. import spaceform as sf
from ..errors import DomainError
from ..fem2d import center as com_mod
from ..fem2d.assembly import domain_diameter, domain_volume
from ..fem2d.mesh import DomainSpec, build_mesh
from ..fem2d.spectrum import steklov_spectrum
from ..radial import sigma1_ball, sigma1_via_GH, solve_profile
from ..symmetrize import EtaTransfer

SLACK_FLOOR = 1e-3
DIAMETER_METHOD = "max distance over boundary vertices (closure)"
N = 2


def _schema(name):
    return json.loads(resources.files("steklov.harness").joinpath("schemas", name).read_text())


def validate_spec_dict(d):
    try:
        jsonschema.validate(d, _schema("domain.schema.json"))
    except jsonschema.ValidationError as exc:
        raise DomainError(f"invalid domain spec: {exc.message}") from exc


def load_spec(path):
    """Read and validate a DomainSpec JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON ({exc})") from exc
    validate_spec_dict(d)
    stem = str(path).replace("\\", "/").rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return DomainSpec.from_dict(d, name=stem)


def richardson(values, order=2):
    """Extrapolate the last two values of an h-halving sequence.

    Returns ``(estimate, error_estimate)``; the error estimate is
    ``|s_L - s_{L-1}| / (2^order - 1)``, or nan with a single level.
    """
    if len(values) < 2:
        return float(values[-1]), math.nan
    f = 2.0**order - 1.0
    delta = values[-1] - values[-2]
    return float(values[-1] + delta / f), float(abs(delta) / f)


def observed_order(values):
    if len(values) < 3:
        return math.nan
    a = abs(values[-2] - values[-3])
    b = abs(values[-1] - values[-2])
    if a == 0 or b == 0:
        return math.nan
    return math.log2(a / b)


@dataclass
class ChainDiagnostics:
    q41: float
    q42: float
    q43: float
    center: list
    center_residual: float
    center_tolerance: float
    center_iterations: int


def chain_diagnostics(mesh, spec, volume=None, diameter=None):
    """Proposition-chain quotients q41 >= sigma_1, q42 >= q41 and q43 >= q42."""
    d = domain_diameter(mesh) if diameter is None else diameter
    vol = domain_volume(mesh) if volume is None else volume
    eta = EtaTransfer(N, spec.kappa0, spec.kappa)
    profile = solve_profile(N, spec.kappa, float(eta(2.0 * d)))
    com = com_mod.center_of_mass(mesh, eta, profile)
    C = sf.bound_constant(N, spec.kappa, spec.bigK, d)
    q41 = com_mod.test_function_quotient(mesh, com, eta, profile)
    q42 = C * com_mod.gh_volume_quotient(mesh, com, eta, profile)
    r_star = sf.radius_from_volume(N, spec.kappa, vol)
    q43 = C * sigma1_via_GH(N, spec.kappa, r_star)
    return ChainDiagnostics(
        q41, q42, q43, [float(x) for x in com.point], com.residual, com.tolerance, com.iterations
    )


@dataclass
class VerificationReport:
    spec: dict
    sigma1_fem: float
    sigma1_finest: float
    sigma1_error_estimate: float
    observed_order: float
    volume: float
    diameter: float
    diameter_method: str
    ball_radius_star: float
    sigma1_star: float
    constant_C: float
    bound: float
    ratio: float
    slack: float
    chain: ChainDiagnostics
    chain_ok: dict
    mesh: dict
    refinement: list = field(default_factory=list)
    passed: bool = False

    @property
    def name(self):
        return self.spec.get("name", "")

    @property
    def all_ok(self):
        return self.passed and all(self.chain_ok.values())


def slack_from(sigma, err):
    if not math.isfinite(err) or sigma <= 0:
        return SLACK_FLOOR
    return max(SLACK_FLOOR, 3.0 * err / sigma)


def verify(spec, refinements=3, parallel=False, k=3):
    """Run the refinement study, the bound and the chain on one DomainSpec."""
    if refinements < 1:
        raise DomainError("need at least one refinement level")
    history = []
    mesh = None
    for level in range(refinements):
        mesh = build_mesh(spec.with_h(spec.h / 2**level))
        spec_l = steklov_spectrum(mesh, k=k, parallel=parallel)
        history.append(
            {"h": mesh.h, "n_vertices": int(mesh.n_vertices), "sigma1": spec_l.sigma1}
        )
    sig = [row["sigma1"] for row in history]
    sigma1, err = richardson(sig)
    vol = domain_volume(mesh)
    d = domain_diameter(mesh)
    r_star = float(sf.radius_from_volume(N, spec.kappa, vol))
    s_star = sigma1_ball(N, spec.kappa, r_star)
    C = sf.bound_constant(N, spec.kappa, spec.bigK, d)
    bound = C * s_star
    slack = slack_from(sigma1, err)
    chain = chain_diagnostics(mesh, spec, volume=vol, diameter=d)
    tol = 1.0 + slack
    chain_ok = {
        "sigma1_le_q41": bool(sigma1 <= chain.q41 * tol),
        "q41_le_q42": bool(chain.q41 <= chain.q42 * tol),
        "q42_le_q43": bool(chain.q42 <= chain.q43 * tol),
        "q43_eq_bound": bool(abs(chain.q43 - bound) <= slack * chain.q43),
    }
    return VerificationReport(
        spec=spec.to_dict(),
        sigma1_fem=sigma1,
        sigma1_finest=sig[-1],
        sigma1_error_estimate=err,
        observed_order=observed_order(sig),
        volume=vol,
        diameter=d,
        diameter_method=DIAMETER_METHOD,
        ball_radius_star=r_star,
        sigma1_star=s_star,
        constant_C=C,
        bound=bound,
        ratio=sigma1 / bound,
        slack=slack,
        chain=chain,
        chain_ok=chain_ok,
        mesh={
            "h": mesh.h,
            "n_vertices": int(mesh.n_vertices),
            "n_triangles": int(len(mesh.triangles)),
            "n_boundary_vertices": int(len(mesh.boundary_vertices)),
        },
        refinement=history,
        passed=bool(sigma1 <= bound * tol),
    )

