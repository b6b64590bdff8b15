"""Command-line interface: ``steklov {ball,bound,verify,corpus,mesh}``.

Exit codes: 0 success, 1 an inequality was violated (the report is still
written), 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .. import spaceform as sf
from ..errors import (
    ConvergenceError,
    DomainError,
    GeometryError,
    MeshError,
    QuadratureError,
    RangeError,
    ResolutionError,
)
from ..fem2d.mesh import build_mesh
from ..fem2d.spectrum import steklov_spectrum
from ..fem2d.svg import write_svg
from ..radial import sigma1_ball, sigma1_via_GH
from . import report as rep
from .verify import load_spec, verify

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2, 3
INVALID = (DomainError, GeometryError, ResolutionError, OSError)
SOLVER = (MeshError, ConvergenceError, QuadratureError, RangeError, ArithmeticError)


def _fail(msg, code):
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_ball(args):
    if args.kappa > 0 or args.radius <= 0:
        return _fail("need kappa <= 0 and radius > 0", EXIT_INVALID)
    s1 = sigma1_ball(args.n, args.kappa, args.radius)
    s2 = sigma1_via_GH(args.n, args.kappa, args.radius)
    print(f"sigma1_ball    = {s1:.12g}")
    print(f"sigma1_via_GH  = {s2:.12g}")
    print(f"difference     = {s1 - s2:.3e}")
    out = {"n": args.n, "kappa": args.kappa, "radius": args.radius,
           "sigma1_ball": s1, "sigma1_via_GH": s2, "difference": s1 - s2}
    print(json.dumps(rep._clean(out)))
    return EXIT_OK


def cmd_bound(args):
    C = sf.bound_constant(args.n, args.kappa, args.K, args.d)
    print(f"C = {C:.12g}")
    print(json.dumps(rep._clean({"n": args.n, "kappa": args.kappa, "K": args.K, "d": args.d, "C": C})))
    return EXIT_OK


def cmd_verify(args):
    spec = load_spec(args.spec)
    report = verify(spec, refinements=args.refinements, parallel=args.parallel_assembly)
    rep.emit_report(report, args.out, "json")
    print(
        f"{report.name}: sigma1_fem={report.sigma1_fem:.8g} bound={report.bound:.8g} "
        f"ratio={report.ratio:.6f} pass={report.passed} chain_ok={all(report.chain_ok.values())}"
    )
    return EXIT_OK if report.all_ok else EXIT_VIOLATION


def _corpus_row(path, refinements):
    name = Path(path).stem
    try:
        report = verify(load_spec(path), refinements=refinements)
    except Exception as exc:  # one bad spec must not stop the corpus
        return rep.csv_row(name=name, error=f"{type(exc).__name__}: {exc}"), False
    return rep.csv_row(report), report.all_ok


def cmd_corpus(args):
    d = Path(args.dir)
    if not d.is_dir():
        return _fail(f"{d} is not a directory", EXIT_INVALID)
    paths = sorted(str(p) for p in d.glob("*.json"))
    if not paths:
        return _fail(f"no *.json specs in {d}", EXIT_INVALID)
    if args.parallel:
        with ProcessPoolExecutor(max_workers=args.workers or os.cpu_count()) as ex:
            results = list(ex.map(_corpus_row, paths, [args.refinements] * len(paths)))
    else:
        results = [_corpus_row(p, args.refinements) for p in paths]
    text = rep.dumps_csv([row for row, _ in results])
    with open(args.csv, "w", encoding="utf-8") as fh:
        fh.write(text)
    n_ok = sum(ok for _, ok in results)
    print(f"{n_ok}/{len(results)} specs passed; table written to {args.csv}")
    return EXIT_OK if n_ok == len(results) else EXIT_VIOLATION


def cmd_mesh(args):
    spec = load_spec(args.spec)
    mesh = build_mesh(spec)
    values = None
    if args.eigenfunction:
        sp = steklov_spectrum(mesh, k=max(args.eigenfunction, 1))
        idx = sp.sigma1_index if args.eigenfunction == 1 else args.eigenfunction
        values = sp.interior_extensions[:, idx]
    write_svg(args.svg, mesh, values)
    print(f"{mesh.n_vertices} vertices, {len(mesh.triangles)} triangles -> {args.svg}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="steklov", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("ball", help="sigma_1 of a geodesic ball in a space form")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--kappa", type=float, required=True)
    b.add_argument("--radius", type=float, required=True)
    b.set_defaults(func=cmd_ball)

    c = sub.add_parser("bound", help="curvature constant of the upper bound")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--kappa", type=float, required=True)
    c.add_argument("--K", type=float, required=True)
    c.add_argument("--d", type=float, required=True)
    c.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="verify the bound on one domain spec")
    v.add_argument("--spec", required=True)
    v.add_argument("--out", required=True)
    v.add_argument("--refinements", type=int, default=3)
    v.add_argument("--deterministic", action="store_true",
                   help="serial assembly with fixed summation order (the default)")
    v.add_argument("--parallel-assembly", action="store_true",
                   help="thread-parallel element assembly (agrees to ~1e-12)")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("corpus", help="verify every spec in a directory")
    k.add_argument("--dir", required=True)
    k.add_argument("--csv", required=True)
    k.add_argument("--refinements", type=int, default=3)
    k.add_argument("--parallel", action="store_true")
    k.add_argument("--workers", type=int, default=None)
    k.set_defaults(func=cmd_corpus)

    m = sub.add_parser("mesh", help="write an SVG of the mesh")
    m.add_argument("--spec", required=True)
    m.add_argument("--svg", required=True)
    m.add_argument("--eigenfunction", type=int, default=0,
                   help="colour by the k-th Steklov eigenfunction (0: plain mesh)")
    m.set_defaults(func=cmd_mesh)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "deterministic", False):
        args.parallel_assembly = False
    try:
        return args.func(args)
    except INVALID as exc:
        return _fail(str(exc), EXIT_INVALID)
    except SOLVER as exc:
        return _fail(str(exc), EXIT_SOLVER)


if __name__ == "__main__":
    sys.exit(main())
