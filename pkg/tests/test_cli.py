from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from perspectiva.cli import build_parser, main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_render_writes_both_files(capsys, tmp_path):
    svg, js = tmp_path / "out.svg", tmp_path / "out.json"
    code, out, err = run(capsys, "render", FIXTURES / "flagellazione.scene", "--svg", svg, "--json", js)
    assert code == 0 and out == "" and err == ""
    assert svg.read_text().startswith("<?xml")
    report = json.loads(js.read_text())
    assert report["kind"] == "projection" and report["horizon"]["height"] == 60


def test_render_defaults_to_json_on_stdout(capsys):
    code, out, _ = run(capsys, "render", FIXTURES / "beams.scene")
    assert code == 0 and json.loads(out)["vanishing_points"][0]["label"] == "V"


def test_render_svg_to_stdout(capsys):
    code, out, _ = run(capsys, "render", FIXTURES / "beams.scene", "--svg", "-", "--viewport-width", 400)
    assert code == 0 and out.startswith("<?xml") and 'width="400"' in out


def test_render_is_deterministic(capsys, tmp_path):
    outs = []
    for workers in (1, 3):
        p = tmp_path / f"{workers}.svg"
        j = tmp_path / f"{workers}.json"
        assert run(capsys, "render", FIXTURES / "flagellazione.scene", "--svg", p, "--json", j,
                   "--workers", workers)[0] == 0
        outs.append((p.read_bytes(), j.read_bytes()))
    assert outs[0] == outs[1]


def test_reconstruct_fixture(capsys):
    code, out, _ = run(capsys, "reconstruct", FIXTURES / "flagellazione.annotation.json")
    r = json.loads(out)
    assert code == 0
    assert r["H"] == pytest.approx(60, abs=0.5) and r["D"] == pytest.approx(145, abs=1)


def test_reconstruct_knee_ratio_flag(capsys):
    code, out, _ = run(capsys, "reconstruct", FIXTURES / "flagellazione.annotation.json",
                       "--knee-ratio", 0.3)
    # knees still sit on the marked vanishing point, so the ratio change is
    # caught as a disagreement with the horizon
    assert code == 1


def test_alberti_diagonal_check(capsys):
    code, out, _ = run(capsys, "alberti", "--side", 348, "--distance", 174, "--tiles", 8, "--tile", 43.5)
    grid = json.loads(out)
    assert code == 0 and grid["kind"] == "alberti"
    assert grid["diagonal_check"] == pytest.approx(174, abs=1e-9)


def test_render_and_alberti_share_a_schema(capsys, tmp_path):
    scene = tmp_path / "floor.scene"
    scene.write_text("viewer height 174 distance 174\ncanvas width 348 height 348 base floor\n"
                     "floor tiles 8 x 8 size 43.5\n")
    _, r_out, _ = run(capsys, "render", scene)
    _, a_out, _ = run(capsys, "alberti", "--side", 348, "--distance", 174, "--tiles", 8, "--tile", 43.5)
    r, a = json.loads(r_out), json.loads(a_out)
    shared = [k for k in r if k in a]
    assert shared[:9] == ["schema", "kind", "units", "origin", "frame", "horizon",
                          "vanishing_points", "distance_point", "segments"]
    assert r["frame"] == a["frame"] and r["horizon"] == a["horizon"]
    assert r["distance_point"] == pytest.approx(a["distance_point"], abs=1e-9)
    for row_r, row_a in zip(r["tile_corners"][0], a["tile_corners"][0]):
        for pr, pa in zip(row_r, row_a):
            assert pr == pytest.approx(pa, abs=1e-9)


def test_vanishing_flags_duccio(capsys):
    code, out, err = run(capsys, "vanishing", FIXTURES / "duccio.scene")
    assert code == 1
    assert "INCONSISTENT" in out
    assert err.startswith("InconsistentVanishingError:")
    assert "Traceback" not in err


def test_vanishing_json(capsys):
    code, out, _ = run(capsys, "vanishing", FIXTURES / "flagellazione.scene", "--format", "json")
    rows = json.loads(out)["vanishing_points"]
    assert code == 0
    assert {r["label"] for r in rows} == {"V", "W", "U_1"} and all(r["consistent"] for r in rows)


def test_vanishing_accepts_consistent_strokes(capsys, tmp_path):
    scene = tmp_path / "ok.scene"
    scene.write_text("viewer height 170 distance 300\ncanvas width 300 height 300 base 40\n"
                     'stroke "a" dir (0, 1, 0) from (20, 300) to (150, 130)\n'
                     'stroke "b" dir (0, 1, 0) from (280, 300) to (150.2, 130)\n')
    code, out, _ = run(capsys, "vanishing", scene)
    assert code == 0 and "ok" in out
    assert run(capsys, "vanishing", scene, "--tolerance", 0.01)[0] == 1


def test_check(capsys):
    code, out, _ = run(capsys, "check", FIXTURES / "flagellazione.scene")
    assert code == 0 and "ok" in out


def test_check_selftest(capsys):
    code, out, _ = run(capsys, "check", FIXTURES / "beams.scene", "--selftest", "--seed", 3, "--samples", 5)
    assert code == 0 and "selftest: 6 scenes" in out


def test_check_reports_violations(capsys, tmp_path):
    bad = tmp_path / "bad.scene"
    bad.write_text('viewer height 60 distance 145\nfigure "x" at (0, 10) height 170\n')
    code, _, err = run(capsys, "check", bad)
    assert code == 1 and "figures[0].depth" in err


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.scene"
    bad.write_text("viewer height abc")
    code, _, err = run(capsys, "render", bad)
    assert code == 1 and err.strip() == "ParseError: 1:15: expected NUM, found 'abc'"


def test_missing_file(capsys):
    code, _, err = run(capsys, "render", "/nonexistent/x.scene")
    assert code == 1 and err.startswith("FileNotFoundError") and "Traceback" not in err


def test_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(b"viewer height 1br distance 2br\n")))
    code, out, _ = run(capsys, "render", "-")
    assert code == 0 and json.loads(out)["frame"]["eye_height"] == 58


def test_braccio_precedence(capsys, monkeypatch, tmp_path):
    scene = tmp_path / "b.scene"
    scene.write_text("viewer height 1br distance 2br\n")

    def eye(*extra):
        return json.loads(run(capsys, "render", scene, *extra)[1])["frame"]["eye_height"]

    assert eye() == 58
    monkeypatch.setenv("PERSPECTIVA_BRACCIO_CM", "59")
    assert eye() == 59
    assert eye("--braccio-cm", 60) == 60
    scene.write_text("braccio 61\nviewer height 1br distance 2br\n")
    assert eye("--braccio-cm", 60) == 61


def test_bad_braccio_env(capsys, monkeypatch):
    monkeypatch.setenv("PERSPECTIVA_BRACCIO_CM", "lots")
    code, _, err = run(capsys, "render", FIXTURES / "beams.scene")
    assert code == 1 and "PERSPECTIVA_BRACCIO_CM" in err


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["render", str(FIXTURES / "beams.scene"), "--frobnicate"])
    assert e.value.code == 2
    assert "--frobnicate" in capsys.readouterr().err


def test_missing_required_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["alberti", "--side", "348"])
    assert e.value.code == 2


def test_domain_error_in_alberti(capsys):
    code, _, err = run(capsys, "alberti", "--side", 100, "--distance", 100, "--tiles", 20, "--tile", 10)
    assert code == 1 and err.startswith("AlbertiInputError:")


def test_help_lists_every_flag():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for flag in action.option_strings:
                assert flag in text, (name, flag)


def test_console_script_and_module_entry(tmp_path):
    for cmd in (["perspectiva"], [sys.executable, "-m", "perspectiva"]):
        r = subprocess.run(cmd + ["alberti", "--side", "348", "--distance", "174", "--tiles", "2",
                                  "--tile", "58", "--json", str(tmp_path / "g.json")],
                           capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        r = subprocess.run(cmd + ["bogus"], capture_output=True, text=True)
        assert r.returncode == 2 and "bogus" in r.stderr
