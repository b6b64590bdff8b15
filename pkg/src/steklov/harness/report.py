"""JSON and CSV serialization of verification reports.

Reals are rounded to 12 significant digits, non-finite values become null,
and keys keep a fixed order so repeated runs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA_VERSION = "1"
CSV_HEADER = ("name", "sigma1_fem", "sigma1_star", "C", "ratio", "q41", "q42", "q43", "pass", "error")


def _real(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def _clean(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_to_dict(report):
    c = report.chain
    return _clean(
        {
            "schema_version": SCHEMA_VERSION,
            "name": report.name,
            "spec": report.spec,
            "sigma1_fem": report.sigma1_fem,
            "sigma1_finest": report.sigma1_finest,
            "sigma1_error_estimate": report.sigma1_error_estimate,
            "observed_order": report.observed_order,
            "volume": report.volume,
            "diameter": report.diameter,
            "diameter_method": report.diameter_method,
            "ball_radius_star": report.ball_radius_star,
            "sigma1_star": report.sigma1_star,
            "constant_C": report.constant_C,
            "bound": report.bound,
            "ratio": report.ratio,
            "slack": report.slack,
            "pass": report.passed,
            "chain": {
                "q41": c.q41,
                "q42": c.q42,
                "q43": c.q43,
                "center": c.center,
                "center_residual": c.center_residual,
                "center_tolerance": c.center_tolerance,
                "center_iterations": c.center_iterations,
            },
            "chain_ok": report.chain_ok,
            "mesh": report.mesh,
            "refinement": report.refinement,
        }
    )


def dumps_json(report):
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def csv_row(report=None, name="", error=""):
    if report is None:
        return [name, "", "", "", "", "", "", "", "false", error]
    d = report_to_dict(report)

    def fmt(x):
        return "" if x is None else repr(x)

    ch = d["chain"]
    return [
        d["name"],
        fmt(d["sigma1_fem"]),
        fmt(d["sigma1_star"]),
        fmt(d["constant_C"]),
        fmt(d["ratio"]),
        fmt(ch["q41"]),
        fmt(ch["q42"]),
        fmt(ch["q43"]),
        "true" if report.all_ok else "false",
        error,
    ]


def dumps_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue()


def emit_report(report, path, fmt="json"):
    """Write one report as JSON or as a single-row CSV."""
    if fmt == "json":
        text = dumps_json(report)
    elif fmt == "csv":
        text = dumps_csv([csv_row(report)])
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
