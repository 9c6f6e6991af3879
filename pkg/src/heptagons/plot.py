"""SVG figure of a heptagon: lines, vertices, residual points, adjoint curve.

Everything is drawn in the affine chart z = 1 from a floating-point
embedding.  The adjoint is traced by marching squares on the sign grid of
the sampled quartic, which needs no root solving.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exactfield import FieldElement, as_rational
from .heptagon import Heptagon, OUTER_PAIRS, adjoint_formula, residual
from .projgeom import MONOMIALS, QuarticForm, meet

__all__ = ["PlotError", "PlotSpec", "heptagon_svg", "marching_squares", "to_real"]

IMAG_TOL = 1e-9


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    bounds: tuple | None = None  # (xmin, xmax, ymin, ymax); None fits the points
    resolution: int = 200
    size: int = 600
    line_style: dict = field(default_factory=lambda: {"stroke": "#444444", "stroke-width": "1"})
    curve_style: dict = field(default_factory=lambda: {"stroke": "#7b3294", "stroke-width": "1.5"})
    vertex_style: dict = field(default_factory=lambda: {"fill": "#1f4fd8", "r": "4"})
    inner_style: dict = field(default_factory=lambda: {"fill": "#d7301f", "r": "3"})
    outer_style: dict = field(default_factory=lambda: {"fill": "#fdae61", "r": "3"})

    def __post_init__(self):
        if self.resolution < 64:
            raise ValueError("resolution must be at least 64")
        if self.bounds is not None:
            if len(self.bounds) != 4 or not all(math.isfinite(b) for b in self.bounds):
                raise ValueError("bounds must be four finite numbers")
            x0, x1, y0, y1 = self.bounds
            if not (x0 < x1 and y0 < y1):
                raise ValueError("bounds must satisfy xmin < xmax and ymin < ymax")


def to_real(value) -> float:
    """Float value of an exact scalar; raises if its embedding is not real."""
    if isinstance(value, FieldElement):
        z = complex(value.embed_complex(64))
        if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real)):
            raise PlotError(f"value {z} is not real under the chosen embedding")
        return z.real
    return float(as_rational(value))


def _affine(point):
    x, y, z = (to_real(c) for c in point.coords)
    if abs(z) < 1e-12:
        return None  # at infinity
    return x / z, y / z


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def _attrs(style: dict) -> str:
    return " ".join(f'{k}="{v}"' for k, v in sorted(style.items()))


def marching_squares(values, xs, ys):
    """Segments of the zero set of a sampled function.

    ``values[j][i]`` is the sample at ``(xs[i], ys[j])``.  Returns a list of
    ((x0, y0), (x1, y1)) segments, interpolated linearly along cell edges.
    """
    segments = []

    def cross(p, q, vp, vq):
        t = vp / (vp - vq)
        return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

    for j in range(len(ys) - 1):
        for i in range(len(xs) - 1):
            corners = [
                ((xs[i], ys[j]), values[j][i]),
                ((xs[i + 1], ys[j]), values[j][i + 1]),
                ((xs[i + 1], ys[j + 1]), values[j + 1][i + 1]),
                ((xs[i], ys[j + 1]), values[j + 1][i]),
            ]
            hits = []
            for k in range(4):
                (p, vp), (q, vq) = corners[k], corners[(k + 1) % 4]
                if (vp > 0) != (vq > 0):
                    hits.append(cross(p, q, vp, vq))
            if len(hits) == 2:
                segments.append((hits[0], hits[1]))
            elif len(hits) == 4:
                # saddle: decide by the centre value
                centre = sum(v for _, v in corners) / 4
                if (centre > 0) == (corners[0][1] > 0):
                    segments += [(hits[0], hits[3]), (hits[1], hits[2])]
                else:
                    segments += [(hits[0], hits[1]), (hits[2], hits[3])]
    return segments


def _clip_line(a, b, c, bounds):
    """Endpoints of a x + b y + c = 0 inside the box, or None."""
    x0, x1, y0, y1 = bounds
    pts = []
    if abs(b) > 1e-15:
        for x in (x0, x1):
            y = -(a * x + c) / b
            if y0 - 1e-12 <= y <= y1 + 1e-12:
                pts.append((x, y))
    if abs(a) > 1e-15:
        for y in (y0, y1):
            x = -(b * y + c) / a
            if x0 - 1e-12 <= x <= x1 + 1e-12:
                pts.append((x, y))
    if len(pts) < 2:
        return None
    pts.sort()
    return pts[0], pts[-1]


def _fit_bounds(points):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    if not xs:
        return (-1.0, 1.0, -1.0, 1.0)
    cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
    half = max(max(xs) - min(xs), max(ys) - min(ys), 1e-6) * 0.6
    return (cx - half, cx + half, cy - half, cy + half)


def heptagon_svg(h: Heptagon, adjoint: QuarticForm | None = None, spec: PlotSpec | None = None) -> str:
    """SVG 1.1 document for the heptagon and its adjoint curve."""
    spec = spec or PlotSpec()
    adjoint = adjoint_formula(h) if adjoint is None else adjoint
    res = residual(h)
    vertices = [_affine(meet(h.line(i), h.line(i % 7 + 1))) for i in range(1, 8)]
    marks = {pair: _affine(p) for pair, p in res.points.items()}
    finite = [p for p in vertices + list(marks.values()) if p is not None]
    bounds = spec.bounds or _fit_bounds(finite)
    x0, x1, y0, y1 = bounds
    size = spec.size

    def px(x, y):
        return ((x - x0) / (x1 - x0) * size, (y1 - y) / (y1 - y0) * size)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        '<g id="lines" fill="none">',
    ]
    for k, line in enumerate(h.lines, start=1):
        a, b, c = (to_real(v) for v in line.coords)
        seg = _clip_line(a, b, c, bounds)
        if seg is None:
            continue
        (ax, ay), (bx, by) = px(*seg[0]), px(*seg[1])
        out.append(f'<line id="L{k}" x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" '
                   f'y2="{_fmt(by)}" {_attrs(spec.line_style)}/>')
    out.append("</g>")

    coeffs = [to_real(c) for c in adjoint.coeffs]
    n = spec.resolution
    xs = [x0 + (x1 - x0) * i / n for i in range(n + 1)]
    ys = [y0 + (y1 - y0) * j / n for j in range(n + 1)]
    values = [
        [sum(c * x**e[0] * y**e[1] for c, e in zip(coeffs, MONOMIALS)) for x in xs] for y in ys
    ]
    out.append('<g id="adjoint" fill="none">')
    for (ax, ay), (bx, by) in marching_squares(values, xs, ys):
        (sx, sy), (tx, ty) = px(ax, ay), px(bx, by)
        out.append(f'<line x1="{_fmt(sx)}" y1="{_fmt(sy)}" x2="{_fmt(tx)}" y2="{_fmt(ty)}" '
                   f'{_attrs(spec.curve_style)}/>')
    out.append("</g>")

    out.append('<g id="residual">')
    for pair, p in sorted(marks.items()):
        if p is None:
            continue
        kind = "outer" if pair in OUTER_PAIRS else "inner"
        style = spec.outer_style if kind == "outer" else spec.inner_style
        cx, cy = px(*p)
        out.append(f'<circle class="{kind}" id="p{pair[0]}{pair[1]}" cx="{_fmt(cx)}" '
                   f'cy="{_fmt(cy)}" {_attrs(style)}/>')
    out.append("</g>")
    out.append('<g id="vertices">')
    for k, p in enumerate(vertices, start=1):
        if p is None:
            continue
        cx, cy = px(*p)
        out.append(f'<circle class="vertex" id="v{k}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                   f'{_attrs(spec.vertex_style)}/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
