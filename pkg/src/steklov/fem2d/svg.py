"""Minimal SVG export of a mesh, optionally coloured by a nodal function."""

from __future__ import annotations

import numpy as np


def _ramp(t):
    # blue -> white -> red
    t = float(np.clip(t, 0.0, 1.0))
    if t < 0.5:
        s = 2 * t
        return int(255 * s), int(255 * s), 255
    s = 2 * (1 - t)
    return 255, int(255 * s), int(255 * s)


def mesh_svg(mesh, values=None, size=600, stroke="#333333"):
    """Return an SVG document drawing every triangle of ``mesh``.

    With ``values`` (one per vertex) each triangle is filled with the colour
    of its mean value on a linear blue-white-red ramp.
    """
    v = mesh.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = 10.0
    scale = (size - 2 * pad) / span

    def xy(p):
        return pad + (p[0] - lo[0]) * scale, size - pad - (p[1] - lo[1]) * scale

    if values is not None:
        values = np.asarray(values, dtype=float)
        vmin, vmax = float(values.min()), float(values.max())
        vr = vmax - vmin or 1.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">'
    ]
    for tri in mesh.triangles:
        pts = " ".join("{:.2f},{:.2f}".format(*xy(v[i])) for i in tri)
        if values is None:
            fill = "none"
        else:
            r, g, b = _ramp((values[tri].mean() - vmin) / vr)
            fill = f"rgb({r},{g},{b})"
        out.append(f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}" stroke-width="0.3"/>')
    for loop in mesh.boundary_loops:
        pts = " ".join("{:.2f},{:.2f}".format(*xy(v[i])) for i in loop)
        out.append(f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1.2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, mesh, values=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(mesh_svg(mesh, values))
    return path
