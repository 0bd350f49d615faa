"""Deterministic SVG output for projection reports and Alberti grids.

Canvas cm are mapped affinely onto the viewport with y pointing up, the
canvas rectangle centered and fitted inside the margin. Segments are
clipped to the viewport and written in report order, followed by the
overlays. Coordinates always carry three decimals, so identical input gives
byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union
from xml.sax.saxutils import quoteattr, escape

from .alberti import AlbertiGrid
from .errors import PerspectivaError
from .projective import CanvasPoint
from .projector import ProjectionReport

STYLE_MAP: Mapping[str, str] = {
    "beam": 'stroke="#8b4513" stroke-width="1.5"',
    "tile_edge": 'stroke="#444444" stroke-width="1"',
    "diagonal": 'stroke="#1f77b4" stroke-width="0.75"',
    "figure": 'stroke="#b22222" stroke-width="2"',
    "overlay": 'stroke="#888888" stroke-width="1" stroke-dasharray="6 4"',
}


class RenderError(PerspectivaError):
    pass


@dataclass(frozen=True)
class RenderOptions:
    viewport_w: int = 800
    viewport_h: int = 800
    margin: float = 24.0
    show_horizon: bool = True
    show_vps: bool = True
    show_improper_labels: bool = False
    show_canvas: bool = False
    style_map: Mapping[str, str] = field(default_factory=lambda: dict(STYLE_MAP))


@dataclass
class _Drawing:
    width: float
    height: float
    segments: list[tuple[str, str, tuple[float, float], tuple[float, float]]]
    horizon: Optional[float]
    markers: list[tuple[str, float, float]]
    improper: list[tuple[str, tuple[float, float, float]]]


def _from_report(report: ProjectionReport) -> _Drawing:
    cm = report.to_cm
    markers, improper = [], []
    for fam in report.families.values():
        if isinstance(fam.point, CanvasPoint):
            markers.append((fam.label, *cm(fam.point)))
        else:
            improper.append((fam.label, fam.point.pixel.as_tuple()))
    return _Drawing(
        width=report.frame.canvas_width,
        height=report.frame.canvas_height,
        segments=[(s.style, s.source_id, cm(s.start), cm(s.end)) for s in report.segments],
        horizon=report.frame.horizon_height,
        markers=markers,
        improper=improper,
    )


def _from_grid(grid: AlbertiGrid) -> _Drawing:
    inp = grid.input
    vp, a = grid.vanishing_point, grid.distance_point_A
    return _Drawing(
        width=inp.canvas_side,
        height=inp.canvas_side,
        segments=[(s.style, s.source_id, (s.start.u, s.start.w), (s.end.u, s.end.w))
                  for s in grid.segments()],
        horizon=inp.vp,
        markers=[("V", vp.u, vp.w), ("A", a.u, a.w)],
        improper=[],
    )


def _clip(p: tuple[float, float], q: tuple[float, float], w: float, h: float):
    """Liang-Barsky clip of segment pq to [0, w] x [0, h]; None if outside."""
    (x0, y0), (x1, y1) = p, q
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for den, num in ((-dx, x0), (dx, w - x0), (-dy, y0), (dy, h - y0)):
        if den == 0:
            if num < 0:
                return None
            continue
        t = num / den
        if den < 0:
            if t > t1:
                return None
            t0 = max(t0, t)
        else:
            if t < t0:
                return None
            t1 = min(t1, t)
    if t0 > t1:
        return None

    def at(t):
        return (min(max(x0 + t * dx, 0.0), w), min(max(y0 + t * dy, 0.0), h))

    return at(t0), at(t1)


def _f(v: float) -> str:
    if not math.isfinite(v):
        raise RenderError(f"non-finite coordinate {v}")
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def emit_svg(source: Union[ProjectionReport, AlbertiGrid], options: RenderOptions = RenderOptions()) -> str:
    vw, vh, m = options.viewport_w, options.viewport_h, options.margin
    if vw <= 0 or vh <= 0:
        raise RenderError(f"viewport must have positive size, got {vw}x{vh}")
    if 2 * m >= min(vw, vh) or m < 0:
        raise RenderError(f"margin {m} leaves no room in a {vw}x{vh} viewport")
    drawing = _from_grid(source) if isinstance(source, AlbertiGrid) else _from_report(source)

    scale = min((vw - 2 * m) / drawing.width, (vh - 2 * m) / drawing.height)

    def to_view(x: float, y: float) -> tuple[float, float]:
        return (vw / 2 + x * scale, vh / 2 - (y - drawing.height / 2) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{vw}" height="{vh}" '
        f'viewBox="0 0 {vw} {vh}">',
    ]
    if options.show_canvas:
        x0, y0 = to_view(-drawing.width / 2, drawing.height)
        out.append(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(drawing.width * scale)}" '
                   f'height="{_f(drawing.height * scale)}" fill="none" stroke="#cccccc"/>')

    for style, source_id, a, b in drawing.segments:
        clipped = _clip(to_view(*a), to_view(*b), vw, vh)
        if clipped is None:
            continue
        (x0, y0), (x1, y1) = clipped
        out.append(f'<path class="{style}" data-source={quoteattr(source_id)} '
                   f'd="M {_f(x0)} {_f(y0)} L {_f(x1)} {_f(y1)}" fill="none" '
                   f'{options.style_map[style]}/>')

    if options.show_horizon and drawing.horizon is not None:
        _, hy = to_view(0.0, drawing.horizon)
        if 0 <= hy <= vh:
            out.append(f'<path class="horizon" d="M 0.000 {_f(hy)} L {_f(vw)} {_f(hy)}" '
                       f'fill="none" {options.style_map["overlay"]}/>')

    if options.show_vps:
        for label, x, y in drawing.markers:
            px, py = to_view(x, y)
            if not (0 <= px <= vw and 0 <= py <= vh):
                continue
            out.append(f'<circle class="vanishing-point" cx="{_f(px)}" cy="{_f(py)}" r="4" '
                       f'fill="#000000"/>')
            out.append(f'<text x="{_f(px + 6)}" y="{_f(py - 6)}" font-size="12" '
                       f'font-family="serif">{escape(label)}</text>')

    if options.show_improper_labels:
        for k, (label, pix) in enumerate(drawing.improper):
            coords = ", ".join(f"{c:g}" for c in pix)
            out.append(f'<text class="improper" x="{_f(m)}" y="{_f(m + 14 * (k + 1))}" '
                       f'font-size="11" font-family="serif">{escape(label)} at infinity [{coords}]</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
