"""Ground-plane and beam-frame geometry for placing the flying base station.

Ground users live in the z = 0 plane; the station position is a 3D point
with positive height.  A "chord" is the segment between the two users of a
cooperative pair, and the station is aligned with a pair when it lies on the
vertical plane that perpendicularly bisects the chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateChordError,
    NotSimpleQuadrilateralError,
    ParallelChordsError,
)

# Relative tolerance for "numerically parallel" / "numerically degenerate".
PARALLEL_TOL = 1e-12


class GroundPoint(NamedTuple):
    x: float
    y: float


class BeamFrameCoords(NamedTuple):
    """Cylindrical coordinates of a receive point in a beam's own frame."""

    radial: float
    azimuth: float
    axial: float
    on_axis: bool


@dataclass(frozen=True, eq=False)
class Placement:
    """Station position plus one aim axis and aim distance per user pair.

    ``axes[i]`` is the unit vector from the position toward pair i's chord
    midpoint; ``distances[i]`` is the corresponding transmission distance.
    """

    position: np.ndarray  # shape (3,)
    axes: np.ndarray  # shape (2, 3)
    distances: np.ndarray  # shape (2,)


def chord_midpoint(p, q) -> GroundPoint:
    """Midpoint of the chord between two distinct ground points."""
    px, py = float(p[0]), float(p[1])
    qx, qy = float(q[0]), float(q[1])
    if px == qx and py == qy:
        raise DegenerateChordError("degenerate chord: endpoints coincide")
    return GroundPoint(0.5 * (px + qx), 0.5 * (py + qy))


def bisector_intersection(u1, u2, u3, u4) -> GroundPoint:
    """Intersection of the perpendicular bisectors of chords (u1,u2) and (u3,u4).

    The returned point is equidistant from u1 and u2, and from u3 and u4.
    Solved as a 2x2 linear system: a point X is on the bisector of (p, q)
    iff (q - p) . X = (|q|^2 - |p|^2) / 2.  Raises ParallelChordsError when
    the chords are parallel and no unique intersection exists.
    """
    p1 = np.asarray(u1, dtype=float)
    q1 = np.asarray(u2, dtype=float)
    p2 = np.asarray(u3, dtype=float)
    q2 = np.asarray(u4, dtype=float)
    d1 = q1 - p1
    d2 = q2 - p2
    len1 = math.hypot(d1[0], d1[1])
    len2 = math.hypot(d2[0], d2[1])
    if len1 == 0.0 or len2 == 0.0:
        raise DegenerateChordError("degenerate chord: endpoints coincide")
    det = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(det) < PARALLEL_TOL * len1 * len2:
        raise ParallelChordsError("no unique intersection: chords are parallel")
    b1 = 0.5 * (float(q1 @ q1) - float(p1 @ p1))
    b2 = 0.5 * (float(q2 @ q2) - float(p2 @ p2))
    x = (b1 * d2[1] - b2 * d1[1]) / det
    y = (d1[0] * b2 - d2[0] * b1) / det
    return GroundPoint(float(x), float(y))


def transmission_distance(position, midpoint) -> float:
    """Slant distance from an elevated position to a ground chord midpoint."""
    px, py, pz = (float(position[0]), float(position[1]), float(position[2]))
    if not pz > 0.0:
        raise ValueError("station height must be positive")
    mx, my = float(midpoint[0]), float(midpoint[1])
    return math.sqrt((px - mx) ** 2 + (py - my) ** 2 + pz * pz)


def aim_at_midpoints(position, m1, m2) -> Placement:
    """Build a Placement whose axes point from position at the two midpoints."""
    pos = np.asarray(position, dtype=float)
    axes = np.empty((2, 3))
    dists = np.empty(2)
    for i, m in enumerate((m1, m2)):
        target = np.array([float(m[0]), float(m[1]), 0.0])
        delta = target - pos
        dist = float(np.linalg.norm(delta))
        if dist == 0.0:
            raise ValueError("aim point coincides with the station position")
        axes[i] = delta / dist
        dists[i] = dist
    return Placement(position=pos, axes=axes, distances=dists)


def beam_frame_coords(position, axis, point) -> BeamFrameCoords:
    """Express a receive point in the cylindrical frame of a beam axis.

    The axial coordinate is the signed projection of (point - position) on
    the unit axis.  Azimuth is measured in the transverse plane against the
    projection of the global +x axis (global +y when the axis is parallel
    to x), counterclockwise about the beam direction.  A point on the axis
    has undefined azimuth and is returned as (0, 0, axial, on_axis=True).
    """
    pos = np.asarray(position, dtype=float)
    a = np.asarray(axis, dtype=float)
    p = np.asarray(point, dtype=float)
    if p.shape == (2,):
        p = np.array([p[0], p[1], 0.0])
    rel = p - pos
    axial = float(rel @ a)
    transverse = rel - axial * a
    rho = float(np.linalg.norm(transverse))
    scale = float(np.linalg.norm(rel))
    if rho <= PARALLEL_TOL * max(scale, 1.0):
        return BeamFrameCoords(0.0, 0.0, axial, True)
    ref = np.array([1.0, 0.0, 0.0])
    e1 = ref - (ref @ a) * a
    if np.linalg.norm(e1) < 1e-9:
        ref = np.array([0.0, 1.0, 0.0])
        e1 = ref - (ref @ a) * a
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    phi = math.atan2(float(transverse @ e2), float(transverse @ e1))
    return BeamFrameCoords(rho, phi, axial, False)


def _orient(a, b, c) -> float:
    """Twice the signed area of triangle (a, b, c)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _proper_cross(p1, p2, p3, p4, eps) -> bool:
    """True when segments (p1,p2) and (p3,p4) cross at an interior point."""
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True
    return False


def quad_inner_angles(vertices) -> np.ndarray:
    """Interior angles of a simple quadrilateral given in cycle order.

    Returns the four interior angles (radians) at each vertex in order.  A
    reflex vertex of a concave cycle reports an angle above pi; the four
    angles always sum to 2*pi.  Repeated vertices, collinear triples, and
    self-intersecting cycles raise NotSimpleQuadrilateralError.
    """
    v = np.asarray(vertices, dtype=float)
    if v.shape != (4, 2):
        raise ValueError("expected four 2D vertices")
    # Scalar math throughout: this sits in the selection hot loop and numpy
    # overhead on 4x2 arrays dominates otherwise.
    pts = v.tolist()
    cx = (pts[0][0] + pts[1][0] + pts[2][0] + pts[3][0]) / 4.0
    cy = (pts[0][1] + pts[1][1] + pts[2][1] + pts[3][1]) / 4.0
    span = max(max(abs(p[0] - cx), abs(p[1] - cy)) for p in pts) or 1.0
    eps = PARALLEL_TOL * span * span
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i][0] == pts[j][0] and pts[i][1] == pts[j][1]:
                raise NotSimpleQuadrilateralError(
                    "not a simple quadrilateral: repeated vertex"
                )
    for i in range(4):
        if abs(_orient(pts[i - 1], pts[i], pts[(i + 1) % 4])) <= eps:
            raise NotSimpleQuadrilateralError(
                "not a simple quadrilateral: collinear triple"
            )
    if _proper_cross(pts[0], pts[1], pts[2], pts[3], eps) or _proper_cross(
        pts[1], pts[2], pts[3], pts[0], eps
    ):
        raise NotSimpleQuadrilateralError(
            "not a simple quadrilateral: opposite sides cross"
        )
    # Shoelace sign fixes the traversal orientation; interior angle at a
    # vertex is pi minus the signed turn taken there.
    area2 = _orient(pts[0], pts[1], pts[2]) + _orient(pts[0], pts[2], pts[3])
    orient = 1.0 if area2 > 0.0 else -1.0
    angles = []
    for i in range(4):
        ax, ay = pts[i - 1]
        bx, by = pts[i]
        qx, qy = pts[(i + 1) % 4]
        dinx, diny = bx - ax, by - ay
        doutx, douty = qx - bx, qy - by
        turn = math.atan2(dinx * douty - diny * doutx, dinx * doutx + diny * douty)
        angles.append(math.pi - orient * turn)
    return np.array(angles)


def angle_square_difference(angles) -> float:
    """Sum of squared deviations of the four angles from a right angle."""
    a = np.asarray(angles, dtype=float)
    if a.shape != (4,):
        raise ValueError("expected four angles")
    t = a.tolist()
    h = 0.5 * math.pi
    return (t[0] - h) ** 2 + (t[1] - h) ** 2 + (t[2] - h) ** 2 + (t[3] - h) ** 2
