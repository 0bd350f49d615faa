"""Command-line entry point: ``perspectiva SUBCOMMAND ...``.

Exit status is 0 on success, 1 on a domain error (reported on stderr as
``ErrorName: message``) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Optional, Sequence

from .alberti import AlbertiInput, step3_assemble
from .audit import DEFAULT_TOLERANCE_CM, InconsistentVanishingError, audit_strokes
from .dsl import parse_scene, print_scene
from .errors import PerspectivaError
from .projective import CanvasPoint
from .projector import project_scene
from .reconstruct import DEFAULT_KNEE_RATIO, Annotation, reconstruct
from .sample import random_scene
from .scene import DEFAULT_BRACCIO_CM, Scene, validate
from .serialize import dumps, grid_to_dict, projection_to_dict, rounded
from .svg import RenderOptions, emit_svg

BRACCIO_ENV = "PERSPECTIVA_BRACCIO_CM"


class UsageError(PerspectivaError):
    pass


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _braccio(args) -> float:
    if args.braccio_cm is not None:
        return args.braccio_cm
    env = os.environ.get(BRACCIO_ENV)
    if env:
        try:
            value = float(env)
        except ValueError:
            raise UsageError(f"{BRACCIO_ENV}={env!r} is not a number") from None
        if not value > 0:
            raise UsageError(f"{BRACCIO_ENV} must be positive")
        return value
    return DEFAULT_BRACCIO_CM


def _load_scene(args) -> Scene:
    return parse_scene(_read(args.input), braccio_cm=_braccio(args))


def _render_options(args) -> RenderOptions:
    return RenderOptions(
        viewport_w=args.viewport_width,
        viewport_h=args.viewport_height,
        margin=args.margin,
        show_horizon=not args.no_horizon,
        show_vps=not args.no_vps,
        show_improper_labels=args.improper_labels,
        show_canvas=args.show_canvas,
    )


def cmd_render(args) -> int:
    scene = _load_scene(args)
    report = project_scene(scene, workers=args.workers)
    json_path = args.json if (args.json or args.svg) else "-"
    if args.svg:
        _write(args.svg, emit_svg(report, _render_options(args)))
    if json_path:
        _write(json_path, dumps(projection_to_dict(report)))
    return 0


def cmd_alberti(args) -> int:
    inp = AlbertiInput(args.side, args.distance, args.tiles, args.tile, args.vp_height)
    grid = step3_assemble(inp)
    json_path = args.json if (args.json or args.svg) else "-"
    if args.svg:
        _write(args.svg, emit_svg(grid, _render_options(args)))
    if json_path:
        _write(json_path, dumps(grid_to_dict(grid)))
    return 0


def cmd_reconstruct(args) -> int:
    try:
        data = json.loads(_read(args.input))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise UsageError(f"annotation is not valid JSON: {e}") from None
    result = reconstruct(Annotation.from_dict(data), knee_ratio=args.knee_ratio)
    _write(args.json, dumps(result.to_dict()))
    return 0


def _fmt_point(p) -> str:
    return "at infinity" if p is None else f"({p[0]:.6g}, {p[1]:.6g})"


def cmd_vanishing(args) -> int:
    scene = _load_scene(args)
    report = project_scene(scene, workers=args.workers)
    rows = []
    for fam in report.families.values():
        p = report.to_cm(fam.point) if isinstance(fam.point, CanvasPoint) else None
        rows.append({
            "label": fam.label,
            "source": "scene",
            "direction": list(fam.direction.key()),
            "point": list(p) if p else None,
            "members": len(fam.members),
            "residual": fam.residual,
            "consistent": fam.consistent,
        })
    half = scene.frame.canvas_width / 2
    for sf in audit_strokes(scene, args.tolerance):
        p = (sf.expected[0] - half, sf.expected[1]) if sf.expected else None
        rows.append({
            "label": "strokes " + ", ".join(sf.members),
            "source": "strokes",
            "direction": list(sf.direction.key()),
            "point": list(p) if p else None,
            "members": len(sf.members),
            "residual": sf.residual,
            "consistent": sf.consistent,
        })

    if args.format == "json":
        _write("-", dumps({"schema": 1, "units": "cm", "origin": "canvas base, midline",
                           "vanishing_points": rows}))
    else:
        lines = []
        for r in rows:
            res = "-" if r["residual"] is None else f"{r['residual']:.3g}"
            status = "ok" if r["consistent"] else "INCONSISTENT"
            direction = "(" + ", ".join(f"{c:g}" for c in r["direction"]) + ")"
            lines.append(f"{r['label']}\t{direction}\t{_fmt_point(r['point'])}\t"
                         f"members={r['members']}\tresidual={res}\t{status}")
        _write("-", "\n".join(lines) + ("\n" if lines else ""))

    bad = [r["label"] for r in rows if not r["consistent"]]
    if bad:
        raise InconsistentVanishingError(
            "members do not meet at their direction's vanishing point: " + "; ".join(bad))
    return 0


def cmd_check(args) -> int:
    scene = _load_scene(args)
    violations = validate(scene)
    for v in violations:
        print(f"{args.input}: {v}", file=sys.stderr)
    if violations:
        return 1
    print(f"{args.input}: ok ({len(scene.lines)} lines, {len(scene.floors)} floors, "
          f"{len(scene.figures)} figures, {len(scene.strokes)} strokes)")
    if args.selftest:
        rng = random.Random(args.seed)
        samples = [scene] + [random_scene(rng) for _ in range(args.samples)]
        for k, s in enumerate(samples):
            text = print_scene(s)
            if parse_scene(text, braccio_cm=s.braccio_cm) != s:
                raise PerspectivaError(f"sample {k}: printed scene does not parse back")
            a = rounded(projection_to_dict(project_scene(s)))
            b = rounded(projection_to_dict(project_scene(s, workers=4)))
            if a != b:
                raise PerspectivaError(f"sample {k}: projection depends on thread count")
        print(f"selftest: {len(samples)} scenes round-trip and project deterministically "
              f"(seed {args.seed})")
    return 0


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be at least 1")
    return v


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("drawing")
    g.add_argument("--svg", metavar="PATH", help="write SVG here ('-' for stdout)")
    g.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout); "
                   "the default when no output is named")
    g.add_argument("--viewport-width", type=_positive_int, default=800, metavar="PX")
    g.add_argument("--viewport-height", type=_positive_int, default=800, metavar="PX")
    g.add_argument("--margin", type=float, default=24.0, metavar="PX")
    g.add_argument("--no-horizon", action="store_true", help="omit the horizon line")
    g.add_argument("--no-vps", action="store_true", help="omit vanishing point markers")
    g.add_argument("--improper-labels", action="store_true",
                   help="list vanishing points at infinity as text")
    g.add_argument("--show-canvas", action="store_true", help="outline the canvas")


def _add_scene_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", metavar="SCENE", help="scene file, or '-' for stdin")
    p.add_argument("--braccio-cm", type=_positive_float, metavar="CM",
                   help=f"length of one braccio when the file does not say "
                        f"(default: ${BRACCIO_ENV} or {DEFAULT_BRACCIO_CM:g})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perspectiva",
        description="Project scenes onto a canvas, draw tiled floors, and recover the viewer.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("render", help="project a scene to a JSON report and SVG")
    _add_scene_flags(p)
    p.add_argument("--workers", type=_positive_int, default=1, metavar="N",
                   help="threads used for projection (output is identical)")
    _add_render_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("alberti", help="draw a square-tiled floor by construction")
    p.add_argument("--side", type=_positive_float, required=True, metavar="CM", help="canvas side")
    p.add_argument("--distance", type=_positive_float, required=True, metavar="CM",
                   help="viewer distance from the canvas")
    p.add_argument("--tiles", type=int, required=True, metavar="N", help="tiles per side")
    p.add_argument("--tile", type=_positive_float, required=True, metavar="CM", help="tile side")
    p.add_argument("--vp-height", type=_positive_float, metavar="CM",
                   help="height of the vanishing point (default: canvas center)")
    _add_render_flags(p)
    p.set_defaults(func=cmd_alberti)

    p = sub.add_parser("reconstruct", help="estimate viewer height and distance from an annotation")
    p.add_argument("input", metavar="ANNOTATION", help="annotation JSON, or '-' for stdin")
    p.add_argument("--knee-ratio", type=_positive_float, default=DEFAULT_KNEE_RATIO, metavar="R",
                   help="knee height as a fraction of figure height (default 60/174)")
    p.add_argument("--json", default="-", metavar="PATH", help="output path (default stdout)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("vanishing", help="tabulate vanishing points and flag inconsistent families")
    _add_scene_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tolerance", type=_positive_float, default=DEFAULT_TOLERANCE_CM, metavar="CM",
                   help="allowed distance of painted strokes' meets from the vanishing point")
    p.add_argument("--workers", type=_positive_int, default=1, metavar="N")
    p.set_defaults(func=cmd_vanishing)

    p = sub.add_parser("check", help="parse and validate a scene")
    _add_scene_flags(p)
    p.add_argument("--selftest", action="store_true",
                   help="also round-trip and project random scenes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20, metavar="N")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PerspectivaError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"{type(e).__name__}: {e.strerror or e}: {getattr(e, 'filename', '')}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
