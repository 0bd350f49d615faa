"""Central projection of simple scenes onto a canvas, Alberti's tiled-floor
construction, and recovery of the viewer from a single picture."""

from .alberti import AlbertiGrid, AlbertiInput, distance_from_diagonal, step3_assemble
from .audit import audit_strokes
from .dsl import ParseError, parse_scene, print_scene
from .errors import PerspectivaError
from .projective import (
    CanvasLine,
    CanvasPoint,
    Direction,
    ImproperCanvasPoint,
    Pixel,
    Point3,
    canonicalize,
    horizon,
    join,
    meet,
    project_point,
    vanishing_point,
)
from .projector import CanvasSegment, ProjectionReport, distance_point, project_scene
from .reconstruct import Annotation, annotate_scene, reconstruct
from .scene import Scene, SceneLine, StandingFigure, TiledFloor, ViewerFrame, validate
from .svg import RenderOptions, emit_svg

__all__ = [
    "AlbertiGrid", "AlbertiInput", "Annotation", "CanvasLine", "CanvasPoint", "CanvasSegment",
    "Direction", "ImproperCanvasPoint", "ParseError", "PerspectivaError", "Pixel", "Point3",
    "ProjectionReport", "RenderOptions", "Scene", "SceneLine", "StandingFigure", "TiledFloor",
    "ViewerFrame", "annotate_scene", "audit_strokes", "canonicalize", "distance_from_diagonal",
    "distance_point", "emit_svg", "horizon", "join", "meet", "parse_scene", "print_scene",
    "project_point", "project_scene", "reconstruct", "step3_assemble", "validate",
    "vanishing_point",
]
