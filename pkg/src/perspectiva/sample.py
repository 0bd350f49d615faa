"""Random valid scenes, for self-tests and demos."""

from __future__ import annotations

import random

from .projective import Direction, Point3
from .scene import Scene, SceneLine, StandingFigure, TiledFloor, ViewerFrame


def _r(rng: random.Random, lo: float, hi: float) -> float:
    # keep values short so they survive printing unchanged
    return round(rng.uniform(lo, hi), 3)


def random_scene(rng: random.Random, max_figures: int = 5) -> Scene:
    D = _r(rng, 80, 600)
    frame = ViewerFrame(
        eye_height=_r(rng, 40, 200),
        canvas_distance=D,
        canvas_width=_r(rng, 100, 500),
        canvas_height=_r(rng, 100, 500),
    )
    lines = []
    for _ in range(rng.randint(0, 3)):
        d = (_r(rng, -1, 1), _r(rng, 0.1, 1), _r(rng, -0.5, 0.5))
        lines.append(SceneLine(Point3(_r(rng, -100, 100), _r(rng, D, 2 * D), _r(rng, 0, 300)),
                               Direction(*d)))
    floors = []
    if rng.random() < 0.7:
        side = _r(rng, 10, 60)
        floors.append(TiledFloor(rng.randint(1, 6), rng.randint(1, 6), side,
                                 side if rng.random() < 0.8 else _r(rng, 10, 60)))
    figures = [
        StandingFigure(f"fig{i}", _r(rng, -150, 150), _r(rng, D, 3 * D), _r(rng, 50, 200))
        for i in range(rng.randint(0, max_figures))
    ]
    return Scene(frame, tuple(lines), tuple(floors), tuple(figures))
