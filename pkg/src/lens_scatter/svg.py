"""Minimal SVG emission for ray fans and annulus projections of bundle curves.

Presentation only: geometry coordinates are rounded to 1e-6 and nothing
else about the files is covered by the determinism guarantees.
"""

from __future__ import annotations

import numpy as np

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#17becf"]


def _fmt(v: float) -> str:
    return f"{v:.6f}".rstrip("0").rstrip(".")


def _polyline(points, color: str, width: float = 0.006) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in points)
    return (f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
            f'points="{coords}"/>')


def _document(elements, extent: float) -> str:
    e = _fmt(extent)
    header = (f'<svg xmlns="http://www.w3.org/2000/svg" '
              f'viewBox="-{e} -{e} {_fmt(2 * extent)} {_fmt(2 * extent)}">')
    return "\n".join([header, *elements, "</svg>"]) + "\n"


def render_rays(paths, out_path, *, radius: float = 1.0) -> None:
    """Write traced geodesics inside the boundary circle."""
    elements = [f'<circle cx="0" cy="0" r="{_fmt(radius)}" fill="none" '
                f'stroke="#444444" stroke-width="0.008"/>']
    for i, path in enumerate(paths):
        pts = np.asarray(path.points, dtype=float)
        elements.append(_polyline(pts, _PALETTE[i % len(_PALETTE)]))
    with open(out_path, "w") as fh:
        fh.write(_document(elements, 1.12 * radius))


def render_annulus(proj_curve, out_path, *, inner: float = 0.55, outer: float = 1.0) -> None:
    """Project a bundle curve into an annulus for illustration.

    The fiber coordinate runs around the annulus (a line angle of pi maps
    to a full turn) while the base radius interpolates between the inner
    and outer rims; fiber winding is therefore read off as winding of the
    drawn curve around the hole.
    """
    elements = [f'<circle cx="0" cy="0" r="{_fmt(r)}" fill="none" '
                f'stroke="#444444" stroke-width="0.008"/>' for r in (inner, outer)]
    pts = np.asarray(proj_curve.points, dtype=float)
    lifts = np.asarray(proj_curve.line_lift, dtype=float)
    base_r = np.hypot(pts[:, 0], pts[:, 1])
    rmax = max(float(np.max(base_r)), 1e-9)
    rho = inner + (outer - inner) * (0.15 + 0.7 * base_r / rmax)
    ang = 2.0 * lifts
    xy = np.column_stack([rho * np.cos(ang), rho * np.sin(ang)])
    if proj_curve.closed:
        xy = np.vstack([xy, xy[:1]])
    elements.append(_polyline(xy, _PALETTE[0]))
    with open(out_path, "w") as fh:
        fh.write(_document(elements, 1.12 * outer))
