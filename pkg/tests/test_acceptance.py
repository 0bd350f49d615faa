"""Acceptance criteria, each at its stated tolerance and time budget.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import json
import math
import random
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_RESULTS
from oracles import camera_cm, det3
from perspectiva.alberti import AlbertiInput, distance_from_diagonal, step3_assemble
from perspectiva.cli import main
from perspectiva.dsl import parse_scene, print_scene
from perspectiva.projective import (
    CanvasLine,
    CanvasPoint,
    Direction,
    Pixel,
    Point3,
    canonicalize,
    horizon,
    pixel_equiv,
    vanishing_point,
)
from perspectiva.projector import CanvasSegment, project_scene
from perspectiva.reconstruct import annotate_scene, reconstruct
from perspectiva.scene import PaintedStroke, Scene, SceneLine, StandingFigure, TiledFloor, ViewerFrame
from perspectiva.svg import emit_svg

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
UNIT = ViewerFrame(eye_height=1, canvas_distance=1, canvas_width=4, canvas_height=4)


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException as e:
        ACCEPTANCE_RESULTS.append((name, False, f"{type(e).__name__}: {str(e)[:120]}"))
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget_s
    ACCEPTANCE_RESULTS.append((name, ok, f"{elapsed:.2f}s of {budget_s:g}s"))
    assert ok, f"{name} took {elapsed:.2f}s, budget {budget_s}s"


def ceiling_beams(anchors, d) -> Scene:
    # ceiling one unit above the eye is z = 2 with eye height 1
    return Scene(UNIT, lines=tuple(SceneLine(Point3(x, y, 2.0), Direction(*d)) for x, y in anchors))


def check_family(scene: Scene, expected: tuple[float, float]):
    r = project_scene(scene)
    (fam,) = r.families.values()
    assert isinstance(fam.point, CanvasPoint)
    assert fam.point.distance(CanvasPoint(*expected)) <= 1e-12
    # second derivation: meet of two member images
    assert fam.residual is not None and fam.residual <= 1e-12
    return fam


def test_1_vanishing_point_table():
    with criterion("1 vanishing-point table", 1.0):
        v = check_family(ceiling_beams([(-1, 0), (0, 0), (1, 0)], (0, 1, 0)), (0.0, 0.0))
        assert v.label == "V"
        # x = y - k, z = 1
        w = check_family(ceiling_beams([(-k, 0) for k in range(3)], (1, 1, 0)), (1.0, 0.0))
        assert w.label == "W"
        for m in (1, 2, 4):
            # x = (y - k)/m, z = 1
            u = check_family(ceiling_beams([(0, k) for k in (1, 2, 3)], (1, m, 0)), (1 / m, 0.0))
            assert u.label == ("W" if m == 1 else "U_1")


def test_2_distance_point_identity():
    with criterion("2 distance-point identity", 1.0):
        assert vanishing_point(Direction(0, 1, 0)).distance(vanishing_point(Direction(1, 1, 0))) \
            == pytest.approx(1.0, abs=1e-12)
        for D in (100.0, 145.0, 200.0):
            for s in (10.0, 25.0, 40.0):
                grid = step3_assemble(AlbertiInput(348, D, 8, s))
                assert abs(distance_from_diagonal(grid.segments(), grid.input.vp) - D) <= 1e-9
                # the same measurement on the projector's drawing of the floor
                r = project_scene(Scene(ViewerFrame(174, D, 348, 348), floors=(TiledFloor(8, 8, s, s),)))
                drawing = [CanvasSegment(CanvasPoint(*r.to_cm(seg.start)), CanvasPoint(*r.to_cm(seg.end)),
                                         seg.source_id, seg.style) for seg in r.segments]
                assert abs(distance_from_diagonal(drawing, 174.0) - D) <= 1e-9


def test_3_construction_matches_projection():
    with criterion("3 construction vs projection", 5.0):
        rng = random.Random(20240501)
        worst = 0.0
        for _ in range(50):
            n, s = rng.randint(1, 12), rng.uniform(10, 100)
            D = rng.uniform(50, 500)
            side = n * s * rng.uniform(1.0, 1.5)
            vp = rng.uniform(0.2, 0.8) * side
            grid = step3_assemble(AlbertiInput(side, D, n, s, vp))
            report = project_scene(Scene(ViewerFrame(vp, D, side, side), floors=(TiledFloor(n, n, s, s),)))
            for i, row in enumerate(report.floor_corners[0]):
                for j, p in enumerate(row):
                    c = grid.corner(j, i)
                    x, y = report.to_cm(p)
                    ox, oy = camera_cm(vp, D, (j - n / 2) * s, D + i * s, 0.0)
                    worst = max(worst, math.hypot(c.u - x, c.w - y), math.hypot(c.u - ox, c.w - oy))
            for i in range(n - 1):
                for j in range(n - 1):
                    pts = [grid.corner(j + k, i + k) for k in range(3)]
                    assert det3(*[(p.u, p.w, 1.0) for p in pts]) <= 1e-9
        assert worst <= 1e-9, worst


def test_4_flagellazione_reconstruction(capsys):
    with criterion("4 flagellazione H and D", 1.0):
        code = main(["reconstruct", str(FIXTURES / "flagellazione.annotation.json")])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert abs(out["H"] - 60) <= 0.5 and abs(out["D"] - 145) <= 1


def test_5_render_reconstruct_round_trip():
    with criterion("5 render-reconstruct round trip", 10.0):
        rng = random.Random(5)
        for _ in range(100):
            H, D = rng.uniform(40, 200), rng.uniform(80, 600)
            side = rng.uniform(5, 60)
            figures = tuple(StandingFigure(f"f{k}", rng.uniform(-100, 100), D + rng.uniform(0, 3 * D),
                                           rng.uniform(50, 200)) for k in range(rng.randint(0, 5)))
            scene = Scene(ViewerFrame(H, D, 2000, 2000), floors=(TiledFloor(3, 3, side, side),),
                          figures=figures)
            r = reconstruct(annotate_scene(scene, include_horizon=rng.random() < 0.5))
            assert r.estimate.H == pytest.approx(H, rel=1e-6)
            assert r.estimate.D == pytest.approx(D, rel=1e-6)
            for truth, got in zip(figures, r.figures):
                assert got.depth == pytest.approx(truth.depth, rel=1e-6)
                assert got.real_height == pytest.approx(truth.height, rel=1e-6)


def test_6_property_suites():
    import test_dsl

    with criterion("6 property suites", 30.0):
        rng = random.Random(6)
        # scale invariance
        for _ in range(2000):
            p = [rng.uniform(-100, 100) for _ in range(3)]
            t = rng.choice([-1, 1]) * 2.0 ** rng.randint(-30, 30)
            a, b = Pixel(*p), Pixel(*(t * c for c in p))
            assert pixel_equiv(a, b) and canonicalize(a) == canonicalize(b)
        # family convergence, 5 lines for each of 200 directions
        for _ in range(200):
            d = (rng.uniform(-5, 5), rng.uniform(0.1, 5), rng.uniform(-5, 5))
            vp = vanishing_point(Direction(*d))
            for k in range(5):
                a = (rng.uniform(-10, 10), rng.uniform(1, 10), 1.0 if k % 2 else -1.0)
                b = tuple(a[i] + d[i] for i in range(3))
                img = CanvasLine(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
                assert img.residual(vp) <= 1e-12
        # horizon membership iff dz = 0
        for _ in range(1000):
            dz = rng.choice([0.0, rng.uniform(-5, 5)])
            d = Direction(rng.uniform(-5, 5), rng.choice([-1, 1]) * rng.uniform(0.1, 5), dz)
            assert horizon().contains(vanishing_point(d)) == (dz == 0)
        # parser round trip on 500 generated scenes
        test_dsl.test_round_trip()
        # SVG byte determinism
        report = project_scene(parse_scene((FIXTURES / "flagellazione.scene").read_text()))
        assert emit_svg(report) == emit_svg(report)


def forced_duccio(rng: random.Random) -> tuple[Scene, Scene]:
    """Beams all claiming the line-of-sight direction, painted either onto
    two distinct convergence points or onto the true vanishing point."""
    H, base = rng.uniform(100, 200), rng.uniform(0, 60)
    frame = ViewerFrame(H, rng.uniform(100, 500), 300, 300, base_height=base)
    true_vp = (150.0, H - base)
    lift = rng.choice([-1, 1]) * rng.uniform(5, 40)
    fake = [(150.0, true_vp[1] + lift), (150.0 + rng.uniform(-20, 20), true_vp[1] - lift)]
    d = Direction(0, 1, 0)

    def strokes(targets):
        out = []
        for k, target in enumerate(targets):
            for side in (-1, 1):
                start = (150 + side * rng.uniform(30, 140), 300.0)
                out.append(PaintedStroke(f"b{k}{side}", d, start, target))
        return tuple(out)

    return Scene(frame, strokes=strokes(fake)), Scene(frame, strokes=strokes([true_vp, true_vp]))


def test_7_duccio_diagnosis(tmp_path, capsys):
    with criterion("7 duccio diagnosis", 30.0):
        code = main(["vanishing", str(FIXTURES / "duccio.scene")])
        err = capsys.readouterr().err
        assert code == 1 and err.startswith("InconsistentVanishingError")
        rng = random.Random(7)
        for k in range(50):
            bad, good = forced_duccio(rng)
            for scene, expected in ((bad, 1), (good, 0)):
                path = tmp_path / f"{k}-{expected}.scene"
                path.write_text(print_scene(scene))
                assert main(["vanishing", str(path)]) == expected
                capsys.readouterr()
