"""Line-oriented text format for scenes (``.scene`` files).

One statement per line, ``#`` starts a comment, keywords are
case-sensitive::

    braccio 58
    viewer height 60 distance 145
    canvas width 348 height 348 base floor
    floor tiles 8 x 8 size 43.5 by 43.5 offset 0
    line at (0, 145, 200) dir (0, 1, 0)
    figure "tunic" at (30, 250) height 3br
    stroke "beam" dir (0, 1, 0) from (100, 300) to (174, 60)

Lengths are centimeters unless suffixed with ``br`` (braccia). Direction
components are unitless. ``stroke`` endpoints are canvas cm from the
bottom-left corner. A missing ``canvas`` statement means a square canvas of
six braccia with its base on the floor.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Union

from .errors import PerspectivaError
from .projective import Direction, Point3
from .scene import (
    DEFAULT_BRACCIO_CM,
    PaintedStroke,
    Scene,
    SceneLine,
    StandingFigure,
    TiledFloor,
    ViewerFrame,
)

CANVAS_SIDE_BRACCIA = 6


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(PerspectivaError):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(f"{span}: expected {expected}, found {found!r}")


_TOKEN = re.compile(r"""
    (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<num>[+-]?(?:\d+(?:\.\d*)?|\.\d+))(?P<br>br)?(?![A-Za-z0-9_.])
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),])
  | (?P<comment>\#.*)
  | (?P<space>[ \t\r\f\v]+)
  | (?P<bad>[^\s(),#]+|.)
""", re.VERBOSE | re.ASCII)


@dataclass(frozen=True)
class _Tok:
    kind: str  # string | num | word | punct | bad
    text: str
    col: int
    br: bool = False


@dataclass(frozen=True)
class _Length:
    value: float
    braccia: bool

    def cm(self, braccio_cm: float) -> float:
        return self.value * braccio_cm if self.braccia else self.value


def _tokenize(line: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        kind = m.lastgroup if m.lastgroup != "br" else "num"
        if kind not in ("space", "comment"):
            toks.append(_Tok(kind, m.group(kind), pos + 1, bool(m.group("br"))))
        pos = m.end()
    return toks


class _LineParser:
    def __init__(self, lineno: int, text: str):
        self.lineno = lineno
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def _fail(self, expected: str, tok: Optional[_Tok] = None):
        if tok is None:
            tok = self.toks[self.i] if self.i < len(self.toks) else None
        if tok is None:
            raise ParseError(SourceSpan(self.lineno, len(self.text) + 1), expected, "end of line")
        raise ParseError(SourceSpan(self.lineno, tok.col), expected, tok.text)

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def keyword(self, *words: str) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "word" or tok.text not in words:
            self._fail(" or ".join(f"'{w}'" for w in words))
        return self.take().text

    def accept(self, word: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "word" and tok.text == word:
            self.i += 1
            return True
        return False

    def punct(self, ch: str):
        tok = self.peek()
        if tok is None or tok.kind != "punct" or tok.text != ch:
            self._fail(f"'{ch}'")
        self.i += 1

    def number(self, length: bool = False) -> Union[float, _Length]:
        tok = self.peek()
        if tok is None or tok.kind != "num":
            self._fail("NUM")
        if tok.br and not length:
            self._fail("NUM without unit suffix")
        value = float(tok.text)
        if not math.isfinite(value):
            self._fail("finite NUM")
        self.i += 1
        return _Length(value, tok.br) if length else value

    def length(self) -> _Length:
        return self.number(length=True)  # type: ignore[return-value]

    def integer(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "num" or tok.br or not re.fullmatch(r"[+-]?[0-9]+", tok.text):
            self._fail("INT")
        self.i += 1
        return int(tok.text)

    def string(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "string":
            self._fail("STRING")
        try:
            value = json.loads(tok.text, strict=False)
        except ValueError:
            self._fail("STRING with valid escapes")
        self.i += 1
        return value

    def triple(self, length: bool) -> tuple:
        self.punct("(")
        a = self.number(length)
        self.punct(",")
        b = self.number(length)
        self.punct(",")
        c = self.number(length)
        self.punct(")")
        return a, b, c

    def pair(self) -> tuple:
        self.punct("(")
        a = self.length()
        self.punct(",")
        b = self.length()
        self.punct(")")
        return a, b

    def end(self):
        if self.peek() is not None:
            self._fail("end of line")


_STATEMENTS = ("viewer", "canvas", "braccio", "line", "floor", "figure", "stroke")


def _span_of_offset(data: bytes, offset: int) -> SourceSpan:
    before = data[:offset]
    line = before.count(b"\n") + 1
    col = offset - (before.rfind(b"\n") + 1) + 1
    return SourceSpan(line, col)


def parse_scene(text: Union[str, bytes], braccio_cm: float = DEFAULT_BRACCIO_CM) -> Scene:
    """Parse scene text. Raises ParseError at the first failure.

    ``braccio_cm`` is the conversion used when the text has no ``braccio``
    statement.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(_span_of_offset(text, e.start), "UTF-8 text",
                             repr(text[e.start:e.end])) from None

    viewer = canvas = braccio = None
    lines, floors, figures, strokes = [], [], [], []

    for lineno, raw in enumerate(text.split("\n"), start=1):
        p = _LineParser(lineno, raw)
        first = p.peek()
        if first is None:
            continue
        kw = p.keyword(*_STATEMENTS)
        if kw == "viewer":
            if viewer is not None:
                p._fail("at most one 'viewer' statement", first)
            p.keyword("height")
            h = p.length()
            p.keyword("distance")
            viewer = (h, p.length())
        elif kw == "canvas":
            if canvas is not None:
                p._fail("at most one 'canvas' statement", first)
            p.keyword("width")
            w = p.length()
            p.keyword("height")
            h = p.length()
            base = _Length(0.0, False)
            if p.accept("base"):
                if not p.accept("floor"):
                    tok = p.peek()
                    if tok is None or tok.kind != "num":
                        p._fail("'floor' or NUM")
                    base = p.length()
            canvas = (w, h, base)
        elif kw == "braccio":
            if braccio is not None:
                p._fail("at most one 'braccio' statement", first)
            braccio = p.number()
        elif kw == "line":
            p.keyword("at")
            anchor = p.triple(length=True)
            p.keyword("dir")
            dir_tok = p.peek()
            d = p.triple(length=False)
            if d == (0.0, 0.0, 0.0):
                p._fail("nonzero direction", dir_tok)
            lines.append((anchor, d))
        elif kw == "floor":
            p.keyword("tiles")
            cols = p.integer()
            p.keyword("x")
            rows = p.integer()
            p.keyword("size")
            sx = p.length()
            sy = p.length() if p.accept("by") else sx
            offset = p.length() if p.accept("offset") else _Length(0.0, False)
            floors.append((cols, rows, sx, sy, offset))
        elif kw == "figure":
            label = p.string()
            p.keyword("at")
            x, depth = p.pair()
            p.keyword("height")
            figures.append((label, x, depth, p.length()))
        elif kw == "stroke":
            label = p.string()
            p.keyword("dir")
            dir_tok = p.peek()
            d = p.triple(length=False)
            if d == (0.0, 0.0, 0.0):
                p._fail("nonzero direction", dir_tok)
            p.keyword("from")
            start = p.pair()
            p.keyword("to")
            strokes.append((label, d, start, p.pair()))
        p.end()

    if viewer is None:
        first_tok = next((t for ln in text.split("\n") for t in _tokenize(ln)), None)
        raise ParseError(SourceSpan(1, 1), "'viewer'",
                         first_tok.text if first_tok else "end of input")

    bcm = braccio if braccio is not None else braccio_cm

    def cm(v: _Length) -> float:
        return v.cm(bcm)

    if canvas is None:
        side = CANVAS_SIDE_BRACCIA * bcm
        width, height, base = side, side, 0.0
    else:
        width, height, base = cm(canvas[0]), cm(canvas[1]), cm(canvas[2])

    frame = ViewerFrame(
        eye_height=cm(viewer[0]),
        canvas_distance=cm(viewer[1]),
        canvas_width=width,
        canvas_height=height,
        base_height=base,
    )
    return Scene(
        frame=frame,
        lines=tuple(SceneLine(Point3(*map(cm, a)), Direction(*d)) for a, d in lines),
        floors=tuple(TiledFloor(c, r, cm(sx), cm(sy), cm(off)) for c, r, sx, sy, off in floors),
        figures=tuple(StandingFigure(lab, cm(x), cm(y), cm(h)) for lab, x, y, h in figures),
        strokes=tuple(PaintedStroke(lab, Direction(*d), (cm(s[0]), cm(s[1])), (cm(e[0]), cm(e[1])))
                      for lab, d, s, e in strokes),
        braccio_cm=bcm,
    )


def format_number(x: float) -> str:
    """Shortest positional decimal that reads back to exactly ``x``."""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return format(Decimal(repr(x)), "f")


def print_scene(scene: Scene) -> str:
    """Canonical text for a scene; ``parse_scene`` reads it back unchanged.

    Extents of scene lines have no textual form and are dropped.
    """
    n = format_number
    f = scene.frame
    out = [
        f"braccio {n(scene.braccio_cm)}",
        f"viewer height {n(f.eye_height)} distance {n(f.canvas_distance)}",
        f"canvas width {n(f.canvas_width)} height {n(f.canvas_height)} base "
        + ("floor" if f.base_height == 0 else n(f.base_height)),
    ]
    for fl in scene.floors:
        s = f"floor tiles {fl.columns} x {fl.rows} size {n(fl.tile_width)}"
        if fl.tile_depth != fl.tile_width:
            s += f" by {n(fl.tile_depth)}"
        if fl.offset != 0:
            s += f" offset {n(fl.offset)}"
        out.append(s)
    for ln in scene.lines:
        a, d = ln.anchor, ln.direction
        out.append(f"line at ({n(a.x)}, {n(a.y)}, {n(a.z)}) "
                   f"dir ({n(d.dx)}, {n(d.dy)}, {n(d.dz)})")
    for fig in scene.figures:
        out.append(f"figure {json.dumps(fig.label, ensure_ascii=False)} "
                   f"at ({n(fig.x)}, {n(fig.depth)}) height {n(fig.height)}")
    for st in scene.strokes:
        d = st.direction
        out.append(f"stroke {json.dumps(st.label, ensure_ascii=False)} "
                   f"dir ({n(d.dx)}, {n(d.dy)}, {n(d.dz)}) "
                   f"from ({n(st.start[0])}, {n(st.start[1])}) "
                   f"to ({n(st.end[0])}, {n(st.end[1])})")
    return "\n".join(out) + "\n"
