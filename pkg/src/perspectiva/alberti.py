"""Alberti's construction of a square-tiled floor, done in the canvas plane.

Coordinates are canvas cm with the origin at the middle of the canvas base.
Nothing here projects 3D points; the construction only joins base points to
the vanishing point, draws transversals at the heights obtained from the
side view, and intersects the two. Agreement with
:func:`perspectiva.projector.project_scene` is checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import PerspectivaError
from .projective import CanvasPoint
from .projector import CanvasSegment


class AlbertiInputError(PerspectivaError):
    pass


class NoMeetError(PerspectivaError):
    pass


class DrawingError(PerspectivaError):
    pass


@dataclass(frozen=True)
class AlbertiInput:
    canvas_side: float
    viewer_distance: float
    tile_count: int
    tile_side: float
    vp_height: Optional[float] = None  # defaults to the canvas center

    @property
    def vp(self) -> float:
        return self.canvas_side / 2 if self.vp_height is None else self.vp_height

    def check(self) -> None:
        problems = []
        for name in ("canvas_side", "viewer_distance", "tile_side"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be positive")
        if not self.vp > 0:
            problems.append("vp_height must be positive")
        if self.tile_count < 0:
            problems.append("tile_count must not be negative")
        if self.tile_count * self.tile_side > self.canvas_side * (1 + 1e-12):
            problems.append("tiles must not extend past the canvas base")
        if problems:
            raise AlbertiInputError("; ".join(problems))


@dataclass
class AlbertiGrid:
    input: AlbertiInput
    orthogonal_images: list[CanvasSegment]
    transversal_heights: list[float]
    transversal_segments: list[CanvasSegment]
    diagonal_segments: list[CanvasSegment]
    distance_point_A: CanvasPoint

    @property
    def vanishing_point(self) -> CanvasPoint:
        return CanvasPoint(0.0, self.input.vp)

    def corner(self, j: int, i: int) -> CanvasPoint:
        """Tile corner on orthogonal j and transversal i (i = 0 is the base)."""
        return _corner(self.input, j, i)

    def corners(self) -> list[list[CanvasPoint]]:
        n = self.input.tile_count
        return [[self.corner(j, i) for j in range(n + 1)] for i in range(n + 1)]

    def segments(self) -> list[CanvasSegment]:
        return self.orthogonal_images + self.transversal_segments + self.diagonal_segments


def _base_x(inp: AlbertiInput, j: int) -> float:
    return (j - inp.tile_count / 2) * inp.tile_side


def transversal_height(inp: AlbertiInput, i: int) -> float:
    """Height above the base of the image of the i-th transversal.

    Side view: the ray from the eye, D before the canvas at height vp, to the
    floor point i tiles behind the canvas crosses the canvas at this height.
    """
    depth = i * inp.tile_side
    return inp.vp * depth / (inp.viewer_distance + depth)


def _corner(inp: AlbertiInput, j: int, i: int) -> CanvasPoint:
    h = transversal_height(inp, i)
    # point at height h on the segment from (x_j, 0) to the vanishing point
    return CanvasPoint(_base_x(inp, j) * (1.0 - h / inp.vp), h)


def step1_orthogonals(inp: AlbertiInput) -> list[CanvasSegment]:
    inp.check()
    vp = CanvasPoint(0.0, inp.vp)
    return [
        CanvasSegment(CanvasPoint(_base_x(inp, j), 0.0), vp, f"orth[{j}]", "tile_edge")
        for j in range(inp.tile_count + 1)
    ]


def step2_heights(inp: AlbertiInput) -> list[float]:
    inp.check()
    return [transversal_height(inp, i) for i in range(1, inp.tile_count + 1)]


def step3_assemble(inp: AlbertiInput) -> AlbertiGrid:
    orthogonals = step1_orthogonals(inp)
    heights = step2_heights(inp)
    n = inp.tile_count
    transversals = []
    diagonals = []
    if n > 0:
        transversals = [
            CanvasSegment(_corner(inp, 0, i), _corner(inp, n, i), f"trans[{i}]", "tile_edge")
            for i in range(n + 1)
        ]
        diagonals = [
            CanvasSegment(_corner(inp, j, i), _corner(inp, j + 1, i + 1), f"diag[{i},{j}]", "diagonal")
            for i in range(n) for j in range(n)
        ]
    return AlbertiGrid(
        input=inp,
        orthogonal_images=orthogonals,
        transversal_heights=heights,
        transversal_segments=transversals,
        diagonal_segments=diagonals,
        distance_point_A=CanvasPoint(inp.viewer_distance, inp.vp),
    )


def _x_at_height(seg: CanvasSegment, h: float) -> float:
    (x1, y1), (x2, y2) = (seg.start.u, seg.start.w), (seg.end.u, seg.end.w)
    dy = y2 - y1
    if abs(dy) <= 1e-12 * max(abs(x2 - x1), abs(dy)):
        raise NoMeetError(f"segment {seg.source_id!r} is parallel to the horizon")
    return x1 + (h - y1) * (x2 - x1) / dy


def distance_from_diagonal(grid_drawing: Sequence[CanvasSegment], horizon_height: float) -> float:
    """Extend the tile diagonals to the horizon and measure how far their
    meet lies from the vanishing point; for square tiles this is the eye's
    distance from the canvas."""
    diagonals = [s for s in grid_drawing if s.style == "diagonal"]
    if not diagonals:
        raise DrawingError("drawing has no diagonal segment")
    orthogonal = next(
        (s for s in grid_drawing if s.style == "tile_edge" and s.start.w != s.end.w), None)
    if orthogonal is None:
        raise DrawingError("drawing has no orthogonal to locate the vanishing point")
    x_vp = _x_at_height(orthogonal, horizon_height)
    dists = [abs(_x_at_height(s, horizon_height) - x_vp) for s in diagonals]
    return sum(dists) / len(dists)
