"""Consistency audit for strokes painted directly on the canvas.

Each stroke claims to depict a scene direction. Strokes sharing a direction
must meet at that direction's vanishing point for the viewer in the scene;
when they meet elsewhere, or at several places, the drawing is not a
central projection of parallel lines.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import PerspectivaError
from .projective import CanvasPoint, Direction, vanishing_point
from .scene import PaintedStroke, Scene

DEFAULT_TOLERANCE_CM = 0.5


class InconsistentVanishingError(PerspectivaError):
    pass


@dataclass
class StrokeFamily:
    direction: Direction
    expected: tuple[float, float] | None  # canvas cm from bottom-left; None if at infinity
    members: list[str] = field(default_factory=list)
    meets: list[tuple[float, float] | None] = field(default_factory=list)
    residual: float = 0.0  # cm
    tolerance: float = DEFAULT_TOLERANCE_CM

    @property
    def consistent(self) -> bool:
        return self.residual <= self.tolerance


def _line_through(s: PaintedStroke) -> tuple[float, float, float]:
    (x1, y1), (x2, y2) = s.start, s.end
    return (y1 - y2, x2 - x1, x1 * y2 - x2 * y1)


def _meet_cm(l1, l2) -> tuple[float, float] | None:
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    det = a1 * b2 - a2 * b1
    scale = math.hypot(a1, b1) * math.hypot(a2, b2)
    if abs(det) <= 1e-12 * scale:
        return None
    return ((b1 * c2 - b2 * c1) / det, (a2 * c1 - a1 * c2) / det)


def _distance_to_line(p: tuple[float, float], line) -> float:
    a, b, c = line
    return abs(a * p[0] + b * p[1] + c) / math.hypot(a, b)


def audit_strokes(scene: Scene, tolerance: float = DEFAULT_TOLERANCE_CM) -> list[StrokeFamily]:
    """Group strokes by claimed direction and measure how far their meets
    fall from the direction's vanishing point, in canvas cm."""
    f = scene.frame
    span = max(f.canvas_width, f.canvas_height)
    groups: dict[tuple, list[PaintedStroke]] = {}
    for s in scene.strokes:
        groups.setdefault(s.direction.key(), []).append(s)

    families = []
    for strokes in groups.values():
        d = strokes[0].direction
        vp = vanishing_point(d)
        expected = None
        if isinstance(vp, CanvasPoint):
            expected = (vp.u * f.canvas_distance + f.canvas_width / 2,
                        vp.w * f.canvas_distance + f.horizon_height)
        lines = [_line_through(s) for s in strokes]
        fam = StrokeFamily(d, expected, [s.label for s in strokes], tolerance=tolerance)

        if expected is None:
            # the images must be parallel to the trace of the direction
            dx, dz = d.dx, d.dz
            norm = math.hypot(dx, dz)
            for a, b, _ in lines:
                sin = abs(a * dx + b * dz) / (math.hypot(a, b) * norm)
                fam.residual = max(fam.residual, sin * span)
        elif len(lines) == 1:
            fam.residual = _distance_to_line(expected, lines[0])
        else:
            for l1, l2 in itertools.combinations(lines, 2):
                m = _meet_cm(l1, l2)
                fam.meets.append(m)
                gap = math.inf if m is None else math.dist(m, expected)
                fam.residual = max(fam.residual, gap)
        families.append(fam)
    return families
