"""Recover the viewer and floor-standing figures from painting annotations.

Annotation coordinates are canvas cm measured from the bottom-left corner.
The eye height H is read from a horizon mark or from the knee rule (figures
whose knees touch the horizon have knee height equal to H). The viewer
distance D is where a square tile's diagonal meets the horizon, measured
from the principal vanishing point.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Any, Optional

import jsonschema

from .errors import PerspectivaError
from .projective import CanvasPoint, Point3, canonicalize, project_point
from .projector import project_scene
from .scene import Scene, normalize

DEFAULT_KNEE_RATIO = 60.0 / 174.0
KNEE_TOLERANCE = 0.02  # fraction of canvas height
SCHEMA_VERSION = 1


class InsufficientAnnotationError(PerspectivaError):
    pass


class InconsistentAnnotationError(PerspectivaError):
    def __init__(self, offenders: list[str], message: str):
        self.offenders = offenders
        super().__init__(f"{message}: {', '.join(offenders)}")


class NotDeterminableError(PerspectivaError):
    pass


class BaseAboveHorizonError(PerspectivaError):
    pass


class AnnotationSchemaError(PerspectivaError):
    pass


_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

ANNOTATION_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "perspectiva painting annotation",
    "type": "object",
    "required": ["schema", "canvas_width", "canvas_height"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "label": {"type": "string"},
        "note": {"type": "string"},
        "canvas_width": {"type": "number", "exclusiveMinimum": 0},
        "canvas_height": {"type": "number", "exclusiveMinimum": 0},
        "base_height": {"type": "number", "minimum": 0},
        "horizon_height": {"type": ["number", "null"]},
        "vp": {"oneOf": [_POINT, {"type": "null"}]},
        "figure_marks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "base", "top"],
                "additionalProperties": False,
                "properties": {
                    "label": {"type": "string"},
                    "base": _POINT,
                    "top": _POINT,
                    "knee": {"oneOf": [_POINT, {"type": "null"}]},
                    "assumed_real_height": {"type": ["number", "null"], "exclusiveMinimum": 0},
                },
            },
        },
        "diagonal_marks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["p1", "p2"],
                "additionalProperties": False,
                "properties": {
                    "p1": _POINT,
                    "p2": _POINT,
                    "assume_square_tile": {"type": "boolean"},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class FigureMark:
    label: str
    base: CanvasPoint
    top: CanvasPoint
    knee: Optional[CanvasPoint] = None
    assumed_real_height: Optional[float] = None


@dataclass(frozen=True)
class DiagonalMark:
    p1: CanvasPoint
    p2: CanvasPoint
    assume_square_tile: bool = False


@dataclass(frozen=True)
class Annotation:
    canvas_width: float
    canvas_height: float
    horizon_height: Optional[float] = None  # above the canvas base
    vp: Optional[CanvasPoint] = None
    base_height: float = 0.0  # canvas base above the floor
    figure_marks: tuple[FigureMark, ...] = ()
    diagonal_marks: tuple[DiagonalMark, ...] = ()
    label: str = ""
    note: str = ""

    def check(self, slack: float = 1e-9) -> None:
        """Raise AnnotationSchemaError unless every mark is on the canvas and
        every figure's top is above its base."""
        pad = slack * max(self.canvas_width, self.canvas_height)
        bad = []

        def inside(name: str, p: Optional[CanvasPoint]):
            if p is None:
                return
            if not (-pad <= p.u <= self.canvas_width + pad and -pad <= p.w <= self.canvas_height + pad):
                bad.append(f"{name} {(p.u, p.w)} lies outside the canvas")

        inside("vp", self.vp)
        for fm in self.figure_marks:
            for part in ("base", "top", "knee"):
                inside(f"figure {fm.label!r} {part}", getattr(fm, part))
            if not fm.top.w > fm.base.w:
                bad.append(f"figure {fm.label!r} top is not above its base")
        for i, dm in enumerate(self.diagonal_marks):
            inside(f"diagonal[{i}] p1", dm.p1)
            inside(f"diagonal[{i}] p2", dm.p2)
            if dm.p1 == dm.p2:
                bad.append(f"diagonal[{i}] endpoints coincide")
        if bad:
            raise AnnotationSchemaError("; ".join(bad))

    @classmethod
    def from_dict(cls, data: Any) -> Annotation:
        try:
            jsonschema.validate(data, ANNOTATION_SCHEMA)
        except jsonschema.ValidationError as e:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            raise AnnotationSchemaError(f"{where}: {e.message}") from None

        def pt(v):
            return None if v is None else CanvasPoint(float(v[0]), float(v[1]))

        ann = cls(
            canvas_width=float(data["canvas_width"]),
            canvas_height=float(data["canvas_height"]),
            horizon_height=None if data.get("horizon_height") is None else float(data["horizon_height"]),
            vp=pt(data.get("vp")),
            base_height=float(data.get("base_height", 0.0)),
            figure_marks=tuple(
                FigureMark(f["label"], pt(f["base"]), pt(f["top"]), pt(f.get("knee")),
                           f.get("assumed_real_height"))
                for f in data.get("figure_marks", [])),
            diagonal_marks=tuple(
                DiagonalMark(pt(d["p1"]), pt(d["p2"]), d.get("assume_square_tile", False))
                for d in data.get("diagonal_marks", [])),
            label=data.get("label", ""),
            note=data.get("note", ""),
        )
        ann.check()
        return ann

    def to_dict(self) -> dict[str, Any]:
        def pt(p):
            return None if p is None else [p.u, p.w]

        out: dict[str, Any] = {"schema": SCHEMA_VERSION}
        if self.label:
            out["label"] = self.label
        if self.note:
            out["note"] = self.note
        out.update({
            "canvas_width": self.canvas_width,
            "canvas_height": self.canvas_height,
            "base_height": self.base_height,
            "horizon_height": self.horizon_height,
            "vp": pt(self.vp),
            "figure_marks": [
                {"label": f.label, "base": pt(f.base), "top": pt(f.top), "knee": pt(f.knee),
                 "assumed_real_height": f.assumed_real_height}
                for f in self.figure_marks],
            "diagonal_marks": [
                {"p1": pt(d.p1), "p2": pt(d.p2), "assume_square_tile": d.assume_square_tile}
                for d in self.diagonal_marks],
        })
        return out


@dataclass
class ViewerEstimate:
    H: float
    D: float
    method_H: str  # horizon_mark | knee_rule
    method_D: str  # distance_point
    residuals: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class FigurePlacement:
    label: str
    x: float  # lateral offset from the line of sight
    depth: float  # horizontal distance from the eye
    real_height: float


@dataclass
class Reconstruction:
    estimate: ViewerEstimate
    figures: list[FigurePlacement]

    def to_dict(self) -> dict[str, Any]:
        e = self.estimate
        return {
            "schema": SCHEMA_VERSION,
            "H": e.H,
            "D": e.D,
            "method_H": e.method_H,
            "method_D": e.method_D,
            "residuals": dict(e.residuals),
            "figures": [
                {"label": f.label, "x": f.x, "depth": f.depth, "real_height": f.real_height}
                for f in self.figures],
        }


def _horizon_observations(ann: Annotation) -> list[tuple[str, float]]:
    obs = []
    if ann.horizon_height is not None:
        obs.append(("horizon_height", ann.horizon_height))
    if ann.vp is not None:
        obs.append(("vp", ann.vp.w))
    for fm in ann.figure_marks:
        if fm.knee is not None:
            obs.append((f"knee:{fm.label}", fm.knee.w))
    return obs


def _check_horizon(ann: Annotation, tolerance: float) -> dict[str, float]:
    """Every mark claiming to sit on the horizon must agree; returns the
    per-mark deviations from the reference height."""
    obs = _horizon_observations(ann)
    if not obs:
        return {}
    ref = ann.horizon_height if ann.horizon_height is not None else statistics.median(h for _, h in obs)
    tol = tolerance * ann.canvas_height
    offenders = [name for name, h in obs if abs(h - ref) > tol]
    if offenders:
        raise InconsistentAnnotationError(offenders, "horizon marks disagree")
    return {name: h - ref for name, h in obs}


def estimate_H(ann: Annotation, knee_ratio: float = DEFAULT_KNEE_RATIO,
               tolerance: float = KNEE_TOLERANCE) -> tuple[float, str]:
    H, method, _ = _estimate_H(ann, knee_ratio, tolerance)
    return H, method


def _estimate_H(ann: Annotation, knee_ratio: float, tolerance: float):
    residuals = _check_horizon(ann, tolerance)
    if ann.horizon_height is not None:
        return ann.horizon_height + ann.base_height, "horizon_mark", residuals
    knees = [fm for fm in ann.figure_marks
             if fm.knee is not None and fm.assumed_real_height is not None]
    if knees:
        per_figure = [knee_ratio * fm.assumed_real_height for fm in knees]
        H = sum(per_figure) / len(per_figure)
        residuals.update({f"H:{fm.label}": h - H for fm, h in zip(knees, per_figure)})
        # the knees are marked on the painted horizon, so the eye height the
        # rule predicts must put the horizon there too
        painted = statistics.mean(fm.knee.w for fm in knees) + ann.base_height
        residuals["knee_rule"] = H - painted
        if abs(H - painted) > tolerance * ann.canvas_height:
            raise InconsistentAnnotationError(
                ["knee_rule"],
                f"knee rule gives eye height {H:g} but the knees are painted at {painted:g}; "
                "check the knee ratio or the assumed figure heights")
        return H, "knee_rule", residuals
    if ann.vp is not None:
        return ann.vp.w + ann.base_height, "horizon_mark", residuals
    raise InsufficientAnnotationError(
        "need a horizon height, a vanishing point, or a knee mark with an assumed real height")


def _principal_u(ann: Annotation) -> float:
    return ann.vp.u if ann.vp is not None else ann.canvas_width / 2


def estimate_D(ann: Annotation, H: Optional[float] = None,
               knee_ratio: float = DEFAULT_KNEE_RATIO) -> tuple[float, str]:
    D, method, _ = _estimate_D(ann, H, knee_ratio)
    return D, method


def _estimate_D(ann: Annotation, H: Optional[float], knee_ratio: float):
    if H is None:
        H = estimate_H(ann, knee_ratio)[0]
    usable = [d for d in ann.diagonal_marks if d.assume_square_tile]
    if not usable:
        raise NotDeterminableError(
            "no diagonal is marked as belonging to a square tile; "
            "the tile could be rectangular, so its diagonal need not run at 45 degrees")
    h = H - ann.base_height
    pv = _principal_u(ann)
    dists = []
    for i, d in enumerate(usable):
        dw = d.p2.w - d.p1.w
        if abs(dw) <= 1e-12 * max(abs(d.p2.u - d.p1.u), abs(dw)):
            raise NotDeterminableError(f"diagonal[{i}] is parallel to the horizon")
        pd = d.p1.u + (h - d.p1.w) * (d.p2.u - d.p1.u) / dw
        dists.append(abs(pd - pv))
    D = sum(dists) / len(dists)
    return D, "distance_point", {f"diagonal[{i}]": v - D for i, v in enumerate(dists)}


def locate_figure(ann: Annotation, H: float, D: float, mark: FigureMark) -> FigurePlacement:
    """Place a floor-standing figure by casting its base mark onto the floor."""
    h = H - ann.base_height
    t = mark.base.w
    if t >= h:
        raise BaseAboveHorizonError(
            f"figure {mark.label!r}: base mark at {t} is not below the horizon at {h}")
    depth = D * H / (h - t)
    scale = depth / D
    return FigurePlacement(
        label=mark.label,
        x=(mark.base.u - _principal_u(ann)) * scale,
        depth=depth,
        real_height=H + (mark.top.w - h) * scale,
    )


def reconstruct(ann: Annotation, knee_ratio: float = DEFAULT_KNEE_RATIO,
                tolerance: float = KNEE_TOLERANCE) -> Reconstruction:
    H, method_H, res_H = _estimate_H(ann, knee_ratio, tolerance)
    D, method_D, res_D = _estimate_D(ann, H, knee_ratio)
    figures = [locate_figure(ann, H, D, fm) for fm in ann.figure_marks]
    return Reconstruction(ViewerEstimate(H, D, method_H, method_D, {**res_H, **res_D}), figures)


def annotate_scene(scene: Scene, knee_ratio: Optional[float] = None,
                   include_horizon: bool = True, label: str = "", note: str = "") -> Annotation:
    """Exact marks for a rendered scene, as a careful annotator would take them.

    With ``knee_ratio`` set, each figure also gets a knee mark at that
    fraction of its height and its real height as the assumed height.
    """
    report = project_scene(scene)
    f = scene.frame
    half = f.canvas_width / 2

    def cm(p: CanvasPoint) -> CanvasPoint:
        x, y = report.to_cm(p)
        return CanvasPoint(x + half, y)

    fig_segments = {s.source_id: s for s in report.segments if s.style == "figure"}
    marks = []
    for i, fig in enumerate(scene.figures):
        seg = fig_segments[f"figure[{i}]"]
        knee = None
        if knee_ratio is not None:
            pk = canonicalize(project_point(normalize(f, Point3(fig.x, fig.depth, knee_ratio * fig.height))))
            knee = cm(pk)
        marks.append(FigureMark(fig.label, cm(seg.start), cm(seg.end), knee,
                                fig.height if knee_ratio is not None else None))

    diagonals = []
    for k, fl in enumerate(scene.floors):
        seg = next(s for s in report.segments if s.source_id == f"floor[{k}].diag[0,0]")
        diagonals.append(DiagonalMark(cm(seg.start), cm(seg.end), fl.is_square))

    ann = Annotation(
        canvas_width=f.canvas_width,
        canvas_height=f.canvas_height,
        horizon_height=f.horizon_height if include_horizon else None,
        vp=CanvasPoint(half, f.horizon_height),
        base_height=f.base_height,
        figure_marks=tuple(marks),
        diagonal_marks=tuple(diagonals),
        label=label,
        note=note,
    )
    ann.check()
    return ann
