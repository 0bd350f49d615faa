"""Scene model in physical units (cm).

Physical frame: the floor is z = 0, the eye stands at (0, 0, H), y is the
horizontal depth measured from the eye, and the canvas is the vertical
plane y = D, centered on x = 0. ``normalize`` maps this frame onto the eye
frame used by :mod:`perspectiva.projective` (eye at the origin, canvas at
y = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import PerspectivaError
from .projective import Direction, Point3

DEFAULT_BRACCIO_CM = 58.0


class SceneValidationError(PerspectivaError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


@dataclass(frozen=True)
class ViewerFrame:
    eye_height: float
    canvas_distance: float
    canvas_width: float
    canvas_height: float
    base_height: float = 0.0  # canvas base above the floor

    @property
    def canvas_base_on_floor(self) -> bool:
        return self.base_height == 0.0

    @property
    def horizon_height(self) -> float:
        """Height of the horizon above the canvas base, in canvas cm."""
        return self.eye_height - self.base_height


@dataclass(frozen=True)
class SceneLine:
    """Anchored line; ``extent`` bounds the parameter t in anchor + t*direction."""

    anchor: Point3
    direction: Direction
    extent: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class TiledFloor:
    """Tiled floor starting at the canvas plane.

    ``tile_width`` runs parallel to the canvas, ``tile_depth`` away from it.
    ``offset`` shifts the grid laterally from the canvas midline.
    """

    columns: int
    rows: int
    tile_width: float
    tile_depth: float
    offset: float = 0.0

    @property
    def is_square(self) -> bool:
        return self.tile_width == self.tile_depth


@dataclass(frozen=True)
class StandingFigure:
    label: str
    x: float
    depth: float
    height: float


@dataclass(frozen=True)
class PaintedStroke:
    """A line drawn directly on the canvas, claimed to depict ``direction``.

    Endpoints are canvas cm measured from the bottom-left corner. Strokes are
    not projected; they exist so painted constructions can be audited.
    """

    label: str
    direction: Direction
    start: tuple[float, float]
    end: tuple[float, float]


@dataclass(frozen=True)
class Scene:
    frame: ViewerFrame
    lines: tuple[SceneLine, ...] = ()
    floors: tuple[TiledFloor, ...] = ()
    figures: tuple[StandingFigure, ...] = ()
    strokes: tuple[PaintedStroke, ...] = ()
    braccio_cm: float = field(default=DEFAULT_BRACCIO_CM)


def braccia_to_cm(v: float, braccio_cm: float = DEFAULT_BRACCIO_CM) -> float:
    return v * braccio_cm


def cm_to_braccia(v: float, braccio_cm: float = DEFAULT_BRACCIO_CM) -> float:
    return v / braccio_cm


def _frame_of(scene: Union[Scene, ViewerFrame]) -> ViewerFrame:
    return scene.frame if isinstance(scene, Scene) else scene


def normalize(scene: Union[Scene, ViewerFrame], p: Point3) -> Point3:
    """Physical cm to the eye frame with the canvas at y = 1."""
    f = _frame_of(scene)
    d = f.canvas_distance
    return Point3(p.x / d, p.y / d, (p.z - f.eye_height) / d)


def denormalize(scene: Union[Scene, ViewerFrame], p: Point3) -> Point3:
    f = _frame_of(scene)
    d = f.canvas_distance
    return Point3(p.x * d, p.y * d, p.z * d + f.eye_height)


def validate(scene: Scene) -> list[Violation]:
    out: list[Violation] = []

    def positive(name: str, value: float):
        if not value > 0:
            out.append(Violation(name, "must be positive"))

    f = scene.frame
    positive("frame.eye_height", f.eye_height)
    positive("frame.canvas_distance", f.canvas_distance)
    positive("frame.canvas_width", f.canvas_width)
    positive("frame.canvas_height", f.canvas_height)
    if f.base_height < 0:
        out.append(Violation("frame.base_height", "must not be negative"))
    positive("braccio_cm", scene.braccio_cm)

    for i, line in enumerate(scene.lines):
        if line.extent is not None and not line.extent[0] < line.extent[1]:
            out.append(Violation(f"lines[{i}].extent", "must be an increasing interval"))

    for i, fl in enumerate(scene.floors):
        if fl.columns < 1:
            out.append(Violation(f"floors[{i}].columns", "must be at least 1"))
        if fl.rows < 1:
            out.append(Violation(f"floors[{i}].rows", "must be at least 1"))
        positive(f"floors[{i}].tile_width", fl.tile_width)
        positive(f"floors[{i}].tile_depth", fl.tile_depth)

    for i, fig in enumerate(scene.figures):
        positive(f"figures[{i}].height", fig.height)
        if not fig.depth >= f.canvas_distance > 0:
            out.append(Violation(f"figures[{i}].depth",
                                 "must be on or beyond the canvas plane"))

    for i, s in enumerate(scene.strokes):
        if s.start == s.end:
            out.append(Violation(f"strokes[{i}]", "endpoints must differ"))
    return out
