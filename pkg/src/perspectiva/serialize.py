"""JSON documents shared by ``render`` and ``alberti``.

Both documents use canvas cm with the origin at the middle of the canvas
base and carry the same top-level keys, so a projected floor and an Alberti
grid built from the same numbers can be diffed directly. Floats are written
with 12 significant digits and keys in a fixed order.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .alberti import AlbertiGrid, distance_from_diagonal
from .projective import CanvasPoint, ImproperCanvasPoint
from .projector import ProjectionReport
from .scene import ViewerFrame

SCHEMA_VERSION = 1
SIG_DIGITS = 12
ORIGIN = "canvas base, midline"


def rounded(obj: Any) -> Any:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"refusing to serialize non-finite value {obj}")
        return float(f"{obj:.{SIG_DIGITS}g}") + 0.0
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(rounded(obj), indent=2, ensure_ascii=False) + "\n"


def _frame(f: ViewerFrame) -> dict[str, float]:
    return {
        "eye_height": f.eye_height,
        "canvas_distance": f.canvas_distance,
        "canvas_width": f.canvas_width,
        "canvas_height": f.canvas_height,
        "base_height": f.base_height,
    }


def _segment(source: str, style: str, a: tuple[float, float], b: tuple[float, float]) -> dict[str, Any]:
    return {"source": source, "style": style, "start": list(a), "end": list(b)}


def projection_to_dict(report: ProjectionReport) -> dict[str, Any]:
    cm = report.to_cm
    vps = []
    for fam in report.families.values():
        p = fam.point
        vps.append({
            "label": fam.label,
            "direction": list(fam.direction.key()),
            "improper": isinstance(p, ImproperCanvasPoint),
            "pixel": list(p.pixel.as_tuple()),
            "canvas": list(cm(p)) if isinstance(p, CanvasPoint) else None,
            "members": len(fam.members),
            "residual": fam.residual,
            "on_horizon": fam.on_horizon,
            "consistent": fam.consistent,
        })
    dp = report.distance_point
    return {
        "schema": SCHEMA_VERSION,
        "kind": "projection",
        "units": "cm",
        "origin": ORIGIN,
        "frame": _frame(report.frame),
        "horizon": {"height": report.frame.horizon_height},
        "vanishing_points": vps,
        "distance_point": list(cm(dp)) if isinstance(dp, CanvasPoint) else None,
        "segments": [_segment(s.source_id, s.style, cm(s.start), cm(s.end)) for s in report.segments],
        "tile_corners": [[[list(cm(p)) for p in row] for row in grid] for grid in report.floor_corners],
        "clipped_count": report.clipped_count,
        "rejected": [{"source": s, "reason": r} for s, r in report.rejected],
    }


def grid_to_dict(grid: AlbertiGrid) -> dict[str, Any]:
    inp = grid.input
    d, vp = inp.viewer_distance, inp.vp

    def pixel(p: CanvasPoint) -> list[float]:
        return [p.u / d, 1.0, (p.w - vp) / d]

    def xy(p: CanvasPoint) -> list[float]:
        return [p.u, p.w]

    marks = [("V", [0.0, 1.0, 0.0], grid.vanishing_point),
             ("A", [1.0, 1.0, 0.0], grid.distance_point_A)]
    segments = grid.segments()
    check = distance_from_diagonal(segments, vp) if grid.diagonal_segments else None
    return {
        "schema": SCHEMA_VERSION,
        "kind": "alberti",
        "units": "cm",
        "origin": ORIGIN,
        "frame": {
            "eye_height": vp,
            "canvas_distance": d,
            "canvas_width": inp.canvas_side,
            "canvas_height": inp.canvas_side,
            "base_height": 0.0,
        },
        "horizon": {"height": vp},
        "vanishing_points": [
            {"label": label, "direction": direction, "improper": False,
             "pixel": pixel(p), "canvas": xy(p)}
            for label, direction, p in marks],
        "distance_point": xy(grid.distance_point_A),
        "segments": [_segment(s.source_id, s.style, xy(s.start), xy(s.end)) for s in segments],
        "tile_corners": [[[xy(p) for p in row] for row in grid.corners()]],
        "transversal_heights": list(grid.transversal_heights),
        "diagonal_check": check,
    }
