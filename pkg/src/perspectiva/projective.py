"""Homogeneous pixel and line arithmetic on the canvas plane.

The eye sits at the origin, x points right, y points forward and z points
up. The canvas is the plane y = 1, so a pixel ``[h0, h1, h2]`` with
``h1 != 0`` lands on the canvas at ``(u, w) = (h0/h1, h2/h1)``. Pixels with
``h1 == 0`` are the improper points added to the canvas; the horizon is the
canvas line w = 0.

All incidence and proportionality predicates share one relative tolerance,
``EPS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import PerspectivaError

EPS = 1e-12

Vec3 = tuple[float, float, float]


class InvalidPixelError(PerspectivaError):
    pass


class EyePointError(PerspectivaError):
    """The eye itself does not cast a ray."""


class DegenerateJoinError(PerspectivaError):
    pass


class DegenerateMeetError(PerspectivaError):
    pass


class InvalidDirectionError(PerspectivaError):
    pass


def _cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _norm(a: Vec3) -> float:
    return math.sqrt(_dot(a, a))


def _check_finite(values: Vec3, what: str, err: type[PerspectivaError]) -> None:
    if not all(math.isfinite(v) for v in values):
        raise err(f"{what} has non-finite component: {values}")


@dataclass(frozen=True)
class Point3:
    """Cartesian point in the eye frame."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        _check_finite(self.as_tuple(), "Point3", PerspectivaError)

    def as_tuple(self) -> Vec3:
        return (self.x, self.y, self.z)

    def __add__(self, other: Point3) -> Point3:
        return Point3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Point3) -> Point3:
        return Point3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, t: float) -> Point3:
        return Point3(t * self.x, t * self.y, t * self.z)


@dataclass(frozen=True, eq=False)
class Pixel:
    """A ray through the eye, written as a homogeneous triple.

    Two pixels compare equal when their triples are proportional.
    """

    h0: float
    h1: float
    h2: float

    def __post_init__(self):
        _check_finite(self.as_tuple(), "Pixel", InvalidPixelError)
        if self.h0 == 0 and self.h1 == 0 and self.h2 == 0:
            raise InvalidPixelError("[0, 0, 0] is not a pixel")

    def as_tuple(self) -> Vec3:
        return (self.h0, self.h1, self.h2)

    def scaled(self, t: float) -> Pixel:
        return Pixel(t * self.h0, t * self.h1, t * self.h2)

    def __eq__(self, other):
        if not isinstance(other, Pixel):
            return NotImplemented
        return pixel_equiv(self, other)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class CanvasPoint:
    """Proper canvas point, the class ``[u, 1, w]``."""

    u: float
    w: float

    @property
    def pixel(self) -> Pixel:
        return Pixel(self.u, 1.0, self.w)

    def distance(self, other: CanvasPoint) -> float:
        return math.hypot(self.u - other.u, self.w - other.w)


@dataclass(frozen=True)
class ImproperCanvasPoint:
    """Improper canvas point ``[u, 0, 1]``.

    ``u = inf`` stands for ``[1, 0, 0]``, the end of the horizontal canvas
    direction; use ``HORIZONTAL_IMPROPER`` rather than building it by hand.
    """

    u: float

    @property
    def is_horizontal(self) -> bool:
        return math.isinf(self.u)

    @property
    def pixel(self) -> Pixel:
        if self.is_horizontal:
            return Pixel(1.0, 0.0, 0.0)
        return Pixel(self.u, 0.0, 1.0)


HORIZONTAL_IMPROPER = ImproperCanvasPoint(math.inf)

AnyCanvasPoint = Union[CanvasPoint, ImproperCanvasPoint]


@dataclass(frozen=True, eq=False)
class CanvasLine:
    """Canvas line ``a*h0 + b*h1 + c*h2 = 0``; on the canvas ``a*u + b + c*w = 0``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        _check_finite(self.as_tuple(), "CanvasLine", DegenerateJoinError)
        if self.a == 0 and self.b == 0 and self.c == 0:
            raise DegenerateJoinError("(0, 0, 0) is not a line")

    def as_tuple(self) -> Vec3:
        return (self.a, self.b, self.c)

    def normalized(self) -> CanvasLine:
        """Unit-norm coefficients, first nonzero coefficient positive."""
        n = _norm(self.as_tuple())
        coeffs = [v / n for v in self.as_tuple()]
        for v in coeffs:
            if abs(v) > EPS:
                if v < 0:
                    coeffs = [-c for c in coeffs]
                break
        return CanvasLine(*(c + 0.0 for c in coeffs))

    def residual(self, point: AnyCanvasPoint | Pixel) -> float:
        """Scale-free incidence residual, 0 when the point is on the line."""
        p = _as_pixel(point).as_tuple()
        line = self.as_tuple()
        return abs(_dot(line, p)) / (_norm(line) * _norm(p))

    def contains(self, point: AnyCanvasPoint | Pixel, tol: float = EPS) -> bool:
        return self.residual(point) <= tol

    def __eq__(self, other):
        if not isinstance(other, CanvasLine):
            return NotImplemented
        a, b = self.as_tuple(), other.as_tuple()
        return _norm(_cross(a, b)) <= EPS * _norm(a) * _norm(b)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class Direction:
    """Direction of a family of parallel lines, defined up to nonzero scale."""

    dx: float
    dy: float
    dz: float

    def __post_init__(self):
        _check_finite(self.as_tuple(), "Direction", InvalidDirectionError)
        if self.dx == 0 and self.dy == 0 and self.dz == 0:
            raise InvalidDirectionError("direction (0, 0, 0) is not a direction")

    def as_tuple(self) -> Vec3:
        return (self.dx, self.dy, self.dz)

    def key(self) -> Vec3:
        """Hashable class representative: first nonzero component scaled to 1,
        rounded to 12 decimals so float noise does not split a family."""
        v = self.as_tuple()
        n = _norm(v)
        lead = next(c for c in v if abs(c) > EPS * n)
        return tuple(round(c / lead, 12) + 0.0 for c in v)  # type: ignore[return-value]

    def __eq__(self, other):
        if not isinstance(other, Direction):
            return NotImplemented
        a, b = self.as_tuple(), other.as_tuple()
        return _norm(_cross(a, b)) <= EPS * _norm(a) * _norm(b)

    def __hash__(self):
        return hash(self.key())


def _as_pixel(p: AnyCanvasPoint | Pixel) -> Pixel:
    if isinstance(p, Pixel):
        return p
    return p.pixel


def canonicalize(p: Pixel) -> AnyCanvasPoint:
    """Place a pixel on the canvas, or on the canvas's improper line."""
    h0, h1, h2 = p.as_tuple()
    n = _norm(p.as_tuple())
    if abs(h1) > EPS * n:
        return CanvasPoint(h0 / h1, h2 / h1)
    if abs(h2) > EPS * n:
        return ImproperCanvasPoint(h0 / h2)
    return HORIZONTAL_IMPROPER


def pixel_equiv(p: Pixel, q: Pixel) -> bool:
    a, b = p.as_tuple(), q.as_tuple()
    return _norm(_cross(a, b)) <= EPS * _norm(a) * _norm(b)


def project_point(p: Point3) -> Pixel:
    if p.x == 0 and p.y == 0 and p.z == 0:
        raise EyePointError("the eye point casts no ray")
    return Pixel(p.x, p.y, p.z)


def join(p: AnyCanvasPoint | Pixel, q: AnyCanvasPoint | Pixel) -> CanvasLine:
    """Line through two distinct canvas points, unit-normalized."""
    a, b = _as_pixel(p).as_tuple(), _as_pixel(q).as_tuple()
    c = _cross(a, b)
    if _norm(c) <= EPS * _norm(a) * _norm(b):
        raise DegenerateJoinError(f"cannot join coincident points {p} and {q}")
    return CanvasLine(*c).normalized()


def meet(l: CanvasLine, m: CanvasLine) -> AnyCanvasPoint:
    """Intersection of two distinct lines; parallel lines meet improperly."""
    a, b = l.as_tuple(), m.as_tuple()
    c = _cross(a, b)
    if _norm(c) <= EPS * _norm(a) * _norm(b):
        raise DegenerateMeetError(f"lines {a} and {b} coincide")
    return canonicalize(Pixel(*c))


def vanishing_point(d: Direction) -> AnyCanvasPoint:
    return canonicalize(Pixel(d.dx, d.dy, d.dz))


def horizon() -> CanvasLine:
    return CanvasLine(0.0, 0.0, 1.0)


def collinearity(p: AnyCanvasPoint | Pixel, q: AnyCanvasPoint | Pixel,
                 r: AnyCanvasPoint | Pixel) -> float:
    """Determinant of three pixels divided by their norms; 0 iff collinear."""
    a, b, c = (_as_pixel(x).as_tuple() for x in (p, q, r))
    return abs(_dot(a, _cross(b, c))) / (_norm(a) * _norm(b) * _norm(c))
