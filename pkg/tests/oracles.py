"""Independent reference computations for the tests.

None of these import the library's projective core. They use exact
rationals, a numpy camera matrix, or plain 2D similar triangles.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def exact_canvas(x, y, z) -> tuple[Fraction, Fraction]:
    """Central projection of an eye-frame point onto y = 1, in rationals."""
    x, y, z = Fraction(x), Fraction(y), Fraction(z)
    return x / y, z / y


def camera(H: float, D: float) -> np.ndarray:
    """3x4 pinhole matrix taking floor-frame homogeneous points to canvas cm
    measured from the horizon on the midline."""
    return np.array([
        [D, 0.0, 0.0, 0.0],
        [0.0, 0.0, D, -D * H],
        [0.0, 1.0, 0.0, 0.0],
    ])


def camera_cm(H: float, D: float, X: float, Y: float, Z: float, base: float = 0.0) -> tuple[float, float]:
    x, y, s = camera(H, D) @ np.array([X, Y, Z, 1.0])
    return float(x / s), float(y / s + H - base)


def side_view_height(H: float, D: float, depth_past_canvas: float) -> float:
    """Height at which the sight line from an eye at (-D, H) to the floor
    point (depth, 0) crosses the canvas line x = 0, by solving the 2x2
    system of the two lines."""
    eye = np.array([-D, H])
    floor = np.array([depth_past_canvas, 0.0])
    # eye + t (floor - eye) = (0, h)  ->  [floor-eye, -(0,1)] [t, h]^T = -eye
    A = np.column_stack([floor - eye, [0.0, -1.0]])
    t, h = np.linalg.solve(A, -eye)
    return float(h)


def line_meet_2d(p1, p2, q1, q2) -> tuple[float, float]:
    """Intersection of lines p1p2 and q1q2 via a numpy solve."""
    p1, p2, q1, q2 = map(np.asarray, (p1, p2, q1, q2))
    A = np.column_stack([p2 - p1, q1 - q2])
    s, _ = np.linalg.solve(A, q1 - p1)
    return tuple(float(v) for v in p1 + s * (p2 - p1))


def det3(a, b, c) -> float:
    m = np.array([a, b, c], dtype=float)
    scale = np.prod(np.linalg.norm(m, axis=1))
    return float(abs(np.linalg.det(m)) / scale)
