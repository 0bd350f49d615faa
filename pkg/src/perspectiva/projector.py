"""Forward projection of a scene onto the canvas.

Everything in a :class:`ProjectionReport` is kept in canonical canvas
coordinates (eye frame, canvas at y = 1, so the principal vanishing point is
(0, 0)). :meth:`ProjectionReport.to_cm` converts to canvas centimeters with
the origin at the canvas base on the midline, the frame shared with
:mod:`perspectiva.alberti`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import PerspectivaError
from .projective import (
    EPS,
    AnyCanvasPoint,
    CanvasLine,
    CanvasPoint,
    Direction,
    ImproperCanvasPoint,
    Point3,
    _cross,
    _norm,
    canonicalize,
    horizon,
    meet,
    project_point,
    vanishing_point,
)
from .scene import (
    Scene,
    SceneValidationError,
    TiledFloor,
    ViewerFrame,
    normalize,
    validate,
)

CLIP_Y = 1e-9  # normalized depth below which geometry is clipped away
FAR_FACTOR = 10.0  # infinite lines are drawn this many canvas diagonals long
VP_TOL = 1e-9

STYLES = ("beam", "tile_edge", "diagonal", "figure", "overlay")

PRINCIPAL = (0.0, 1.0, 0.0)
DIAGONAL = (1.0, 1.0, 0.0)


class ProjectionRejected(PerspectivaError):
    def __init__(self, reason: str, source_id: str = ""):
        self.reason = reason
        self.source_id = source_id
        super().__init__(f"{source_id}: {reason}" if source_id else reason)


class NotApplicableError(PerspectivaError):
    pass


@dataclass(frozen=True)
class CanvasSegment:
    start: CanvasPoint
    end: CanvasPoint
    source_id: str = ""
    style: str = "beam"

    def __post_init__(self):
        if self.start == self.end:
            raise ValueError(f"degenerate segment {self.source_id!r}")
        if self.style not in STYLES:
            raise ValueError(f"unknown style {self.style!r}")


@dataclass
class Family:
    """A direction class with its vanishing point and the meet cross-check."""

    direction: Direction
    point: AnyCanvasPoint
    label: str
    members: list[str] = field(default_factory=list)
    residual: Optional[float] = None  # gap between meet of members and point

    @property
    def consistent(self) -> bool:
        return self.residual is None or self.residual <= gap_tolerance(self.point)

    @property
    def on_horizon(self) -> bool:
        return isinstance(self.point, CanvasPoint) and horizon().contains(self.point)


@dataclass
class ProjectionReport:
    frame: ViewerFrame
    segments: list[CanvasSegment]
    families: dict[tuple, Family]
    horizon: CanvasLine
    distance_point: Optional[AnyCanvasPoint]
    clipped_count: int
    image_lines: dict[str, CanvasLine] = field(default_factory=dict)
    floors: tuple[TiledFloor, ...] = ()
    floor_corners: list[list[list[CanvasPoint]]] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)

    @property
    def vanishing_points(self) -> dict[tuple, AnyCanvasPoint]:
        return {k: f.point for k, f in self.families.items()}

    def to_cm(self, p: CanvasPoint) -> tuple[float, float]:
        d = self.frame.canvas_distance
        return (p.u * d, p.w * d + self.frame.horizon_height)


def gap_tolerance(point: AnyCanvasPoint) -> float:
    # meets of nearly parallel images lose precision with the square of distance
    if isinstance(point, CanvasPoint):
        return VP_TOL * max(1.0, point.u ** 2 + point.w ** 2)
    return VP_TOL


def point_gap(p: AnyCanvasPoint, q: AnyCanvasPoint) -> float:
    """Distance between canvas points; angular gap between improper ones."""
    if isinstance(p, CanvasPoint) and isinstance(q, CanvasPoint):
        return p.distance(q)
    if isinstance(p, ImproperCanvasPoint) and isinstance(q, ImproperCanvasPoint):
        a, b = p.pixel.as_tuple(), q.pixel.as_tuple()
        return _norm(_cross(a, b)) / (_norm(a) * _norm(b))
    return math.inf


def _canvas(p: Point3) -> CanvasPoint:
    c = canonicalize(project_point(p))
    assert isinstance(c, CanvasPoint)
    return c


def _project_normalized(a: Point3, b: Point3, source_id: str, style: str) -> tuple[CanvasSegment, bool]:
    """Project a segment given in the eye frame; returns (segment, clipped)."""
    if a == b:
        raise ProjectionRejected("degenerate segment", source_id)
    if a.y < CLIP_Y and b.y < CLIP_Y:
        raise ProjectionRejected("behind viewer", source_id)
    va, vb = a.as_tuple(), b.as_tuple()
    if _norm(_cross(va, vb)) <= EPS * _norm(va) * _norm(vb):
        raise ProjectionRejected("degenerate ray", source_id)
    clipped = False
    if a.y < CLIP_Y or b.y < CLIP_Y:
        t = (CLIP_Y - a.y) / (b.y - a.y)
        cut = a + (b - a).scaled(t)
        cut = Point3(cut.x, CLIP_Y, cut.z)
        if a.y < CLIP_Y:
            a = cut
        else:
            b = cut
        clipped = True
    return CanvasSegment(_canvas(a), _canvas(b), source_id, style), clipped


def project_segment(frame: ViewerFrame, a: Point3, b: Point3,
                    source_id: str = "", style: str = "beam") -> CanvasSegment:
    """Project a physical segment; the part behind the eye is clipped off."""
    return _project_normalized(normalize(frame, a), normalize(frame, b), source_id, style)[0]


def _image_line(anchor_n: Point3, d: Direction) -> Optional[CanvasLine]:
    """Image of an infinite line, or None for a line that is a visual ray."""
    a, v = anchor_n.as_tuple(), d.as_tuple()
    c = _cross(a, v)
    if _norm(c) <= EPS * _norm(a) * _norm(v):
        return None
    return CanvasLine(*c).normalized()


def _project_infinite(frame: ViewerFrame, anchor: Point3, d: Direction,
                      source_id: str) -> CanvasSegment:
    """Finite drawing of an infinite line, from its trace on the canvas plane
    toward its vanishing point."""
    p = normalize(frame, anchor)
    dx, dy, dz = d.as_tuple()
    dn = _norm(d.as_tuple())
    if _image_line(p, d) is None:
        raise ProjectionRejected("degenerate ray", source_id)
    far = FAR_FACTOR * math.hypot(frame.canvas_width, frame.canvas_height) / frame.canvas_distance

    if abs(dy) <= EPS * dn:
        if p.y < CLIP_Y:
            raise ProjectionRejected("behind viewer", source_id)
        t = far * p.y / math.hypot(dx, dz)
        a = Point3(p.x - t * dx, p.y, p.z - t * dz)
        b = Point3(p.x + t * dx, p.y, p.z + t * dz)
        return CanvasSegment(_canvas(a), _canvas(b), source_id, "beam")

    if dy < 0:
        dx, dy, dz = -dx, -dy, -dz
    t0 = (1.0 - p.y) / dy
    start = CanvasPoint(p.x + t0 * dx, p.z + t0 * dz)
    vp = CanvasPoint(dx / dy, dz / dy)
    gap = start.distance(vp)
    if gap <= far:
        end = vp
    else:
        k = far / gap
        end = CanvasPoint(start.u + k * (vp.u - start.u), start.w + k * (vp.w - start.w))
    return CanvasSegment(start, end, source_id, "beam")


def _floor_geometry(frame: ViewerFrame, fl: TiledFloor, k: int):
    """Edges of a tiled floor as (source_id, style, a, b, direction) in cm."""
    d0 = frame.canvas_distance
    x0 = fl.offset - fl.columns * fl.tile_width / 2
    x1 = x0 + fl.columns * fl.tile_width
    y1 = d0 + fl.rows * fl.tile_depth
    edges = []
    for j in range(fl.columns + 1):
        x = x0 + j * fl.tile_width
        edges.append((f"floor[{k}].orth[{j}]", "tile_edge",
                      Point3(x, d0, 0.0), Point3(x, y1, 0.0), Direction(0.0, 1.0, 0.0)))
    for i in range(fl.rows + 1):
        y = d0 + i * fl.tile_depth
        edges.append((f"floor[{k}].trans[{i}]", "tile_edge",
                      Point3(x0, y, 0.0), Point3(x1, y, 0.0), Direction(1.0, 0.0, 0.0)))
    diag = Direction(fl.tile_width, fl.tile_depth, 0.0)
    for i in range(fl.rows):
        for j in range(fl.columns):
            a = Point3(x0 + j * fl.tile_width, d0 + i * fl.tile_depth, 0.0)
            b = Point3(a.x + fl.tile_width, a.y + fl.tile_depth, 0.0)
            edges.append((f"floor[{k}].diag[{i},{j}]", "diagonal", a, b, diag))
    return edges


def floor_corners(frame: ViewerFrame, fl: TiledFloor) -> list[list[CanvasPoint]]:
    """Canonical images of the tile corners, indexed [row][column]."""
    d0 = frame.canvas_distance
    x0 = fl.offset - fl.columns * fl.tile_width / 2
    return [
        [_canvas(normalize(frame, Point3(x0 + j * fl.tile_width, d0 + i * fl.tile_depth, 0.0)))
         for j in range(fl.columns + 1)]
        for i in range(fl.rows + 1)
    ]


def _label_for(key: tuple, others: int) -> str:
    if key == PRINCIPAL:
        return "V"
    if key == DIAGONAL:
        return "W"
    return f"U_{others + 1}"


def _meet_residual(lines: list[CanvasLine], point: AnyCanvasPoint) -> Optional[float]:
    """Gap between ``point`` and the meet of the two most transversal images."""
    if len(lines) < 2:
        return None
    first = lines[0].as_tuple()
    best, best_sin = None, 0.0
    for other in lines[1:]:
        o = other.as_tuple()
        s = _norm(_cross(first, o)) / (_norm(first) * _norm(o))
        if s > best_sin:
            best, best_sin = other, s
    if best is None or best_sin <= EPS:
        return None
    return point_gap(meet(lines[0], best), point)


def project_scene(scene: Scene, workers: int = 1) -> ProjectionReport:
    """Project every primitive of a valid scene and assemble the report.

    Primitives may be projected on ``workers`` threads; the report order is
    the input order regardless.
    """
    violations = validate(scene)
    if violations:
        raise SceneValidationError(violations)
    frame = scene.frame

    # (source_id, job, direction or None, image line or None)
    jobs: list[tuple[str, Callable[[], tuple[CanvasSegment, bool]], Optional[Direction], Optional[CanvasLine]]] = []

    for i, ln in enumerate(scene.lines):
        sid = f"line[{i}]"
        image = _image_line(normalize(frame, ln.anchor), ln.direction)
        if ln.extent is None:
            job = (lambda ln=ln, sid=sid: (_project_infinite(frame, ln.anchor, ln.direction, sid), False))
        else:
            a = ln.anchor + Point3(*ln.direction.as_tuple()).scaled(ln.extent[0])
            b = ln.anchor + Point3(*ln.direction.as_tuple()).scaled(ln.extent[1])
            job = (lambda a=a, b=b, sid=sid:
                   _project_normalized(normalize(frame, a), normalize(frame, b), sid, "beam"))
        jobs.append((sid, job, ln.direction, image))

    for k, fl in enumerate(scene.floors):
        for sid, style, a, b, d in _floor_geometry(frame, fl, k):
            na, nb = normalize(frame, a), normalize(frame, b)
            image = _image_line(na, d)
            jobs.append((sid, lambda na=na, nb=nb, sid=sid, style=style:
                         _project_normalized(na, nb, sid, style), d, image))

    for i, fig in enumerate(scene.figures):
        sid = f"figure[{i}]"
        na = normalize(frame, Point3(fig.x, fig.depth, 0.0))
        nb = normalize(frame, Point3(fig.x, fig.depth, fig.height))
        jobs.append((sid, lambda na=na, nb=nb, sid=sid:
                     _project_normalized(na, nb, sid, "figure"), None, None))

    def run(job):
        try:
            return job()
        except ProjectionRejected as e:
            return e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, [j[1] for j in jobs]))
    else:
        results = [run(j[1]) for j in jobs]

    segments: list[CanvasSegment] = []
    rejected: list[tuple[str, str]] = []
    clipped = 0
    for (sid, _, _, _), res in zip(jobs, results):
        if isinstance(res, ProjectionRejected):
            rejected.append((sid, res.reason))
            clipped += 1
        else:
            seg, was_clipped = res
            segments.append(seg)
            clipped += was_clipped

    families: dict[tuple, Family] = {}
    member_lines: dict[tuple, list[CanvasLine]] = {}
    image_lines: dict[str, CanvasLine] = {}
    for sid, _, d, image in jobs:
        if d is None:
            continue
        key = d.key()
        if key not in families:
            n_u = sum(1 for f in families.values() if f.label.startswith("U_"))
            families[key] = Family(d, vanishing_point(d), _label_for(key, n_u))
            member_lines[key] = []
        if image is not None:
            families[key].members.append(sid)
            member_lines[key].append(image)
            image_lines[sid] = image
    for key, fam in families.items():
        fam.residual = _meet_residual(member_lines[key], fam.point)

    return ProjectionReport(
        frame=frame,
        segments=segments,
        families=families,
        horizon=horizon(),
        distance_point=vanishing_point(Direction(*DIAGONAL)) if scene.floors else None,
        clipped_count=clipped,
        image_lines=image_lines,
        floors=scene.floors,
        floor_corners=[floor_corners(frame, fl) for fl in scene.floors],
        rejected=rejected,
    )


def distance_point(report: ProjectionReport) -> CanvasPoint:
    """Meet of a square tile's diagonal image with the horizon."""
    if not report.floors:
        raise NotApplicableError("no tiled floor in the scene")
    k = next((k for k, fl in enumerate(report.floors) if fl.is_square), None)
    if k is None:
        raise NotApplicableError("tiles are not square: diagonal not 45°")
    a = meet(report.image_lines[f"floor[{k}].diag[0,0]"], report.horizon)
    if not isinstance(a, CanvasPoint):
        raise NotApplicableError("diagonal image is parallel to the horizon")
    return a
