"""Cooperative user-pair selection inside a dense hotspot.

Four users form two cooperative pairs (user groups).  A usable selection
keeps both pair chords between the diffraction floor of the intensity ring
and the cooperation range limit, keeps the cross pairs inside the service
diameter, and shapes the four users into a quadrilateral as close to a
rectangle as possible so one station position can align with both chords.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import TYPE_CHECKING

import numpy as np

from .beam import feasible_ring_radius
from .errors import (
    DegenerateChordError,
    InsufficientUsersError,
    NotSimpleQuadrilateralError,
    OracleSizeError,
    ParallelChordsError,
)
from .geometry import (
    angle_square_difference,
    bisector_intersection,
    quad_inner_angles,
    transmission_distance,
)

if TYPE_CHECKING:  # pragma: no cover
    from .sim import UserDrop

# Exhaustive search is an oracle for tests, not a production path.
MAX_ORACLE_USERS = 30


@dataclass(frozen=True)
class SelectionConfig:
    """Constraint bounds used while screening candidate selections.

    ``min_height`` is the lowest allowed station altitude; candidate chords
    are screened against the ring floor at a planning distance computed
    from it before any station position exists.
    """

    max_pair_distance: float = 10.0
    service_radius: float = 250.0
    stop_threshold: float = 1e-6
    min_height: float = 50.0

    def __post_init__(self):
        if not self.max_pair_distance > 0.0:
            raise ValueError("max_pair_distance must be positive")
        if not self.service_radius > 0.0:
            raise ValueError("service_radius must be positive")
        if not self.stop_threshold > 0.0:
            raise ValueError("stop_threshold must be positive")
        if not self.min_height > 0.0:
            raise ValueError("min_height must be positive")


@dataclass(frozen=True)
class ConstraintCheck:
    """Outcome of a constraint screen; on failure names the broken bound."""

    ok: bool
    reason: str = ""
    shortfall: float = 0.0


@dataclass(frozen=True)
class CugSelection:
    """Two cooperative pairs in cycle order u1 -> u2 -> u3 -> u4.

    ``cug1`` and ``cug2`` hold user indices; chords are the in-pair
    distances, diagonals the cross-pair distances (u1,u3) and (u2,u4).
    ``angle_square_diff`` is the squared right-angle deviation of the
    quadrilateral.
    """

    cug1: tuple[int, int]
    cug2: tuple[int, int]
    chord1: float
    chord2: float
    diag1: float
    diag2: float
    angle_square_diff: float

    def indices(self) -> tuple[int, int, int, int]:
        return self.cug1 + self.cug2


def planning_distance(min_height: float, chord: float) -> float:
    """Transmission-distance estimate before a station position exists.

    The station can come no closer to a chord midpoint than its minimum
    height; the chord half-length adds the in-plane reach.
    """
    return math.sqrt(min_height * min_height + 0.25 * chord * chord)


def chord_floor(distance: float, wavelength: float, mode: int) -> float:
    """Smallest usable chord at a transmission distance: the ring diameter floor."""
    return 2.0 * float(feasible_ring_radius(wavelength, mode, distance))


def _check_bounds(chord1, chord2, diag1, diag2, cfg, wavelength, mode) -> ConstraintCheck:
    diameter = 2.0 * cfg.service_radius
    worst_diag = max(diag1, diag2)
    if worst_diag > diameter:
        return ConstraintCheck(
            False, "diagonal exceeds service diameter", worst_diag - diameter
        )
    for label, chord in (("cug1", chord1), ("cug2", chord2)):
        if chord > cfg.max_pair_distance:
            return ConstraintCheck(
                False,
                f"{label} chord exceeds max pair distance",
                chord - cfg.max_pair_distance,
            )
        floor = chord_floor(
            planning_distance(cfg.min_height, chord), wavelength, mode
        )
        if chord < floor:
            return ConstraintCheck(
                False, f"{label} chord below feasible ring diameter", floor - chord
            )
    return ConstraintCheck(True)


def check_constraints(indices, users, cfg: SelectionConfig, wavelength: float, mode: int) -> ConstraintCheck:
    """Screen one candidate cycle (u1, u2, u3, u4) against all bounds.

    Bounds are inclusive; the planning distance stands in for the true
    transmission distance, which is not known until the station is placed.
    """
    i1, i2, i3, i4 = (int(i) for i in indices)
    if len({i1, i2, i3, i4}) != 4:
        raise ValueError("candidate indices must be distinct")
    pos = np.asarray(getattr(users, "positions", users), dtype=float)

    def dist(a, b):
        return math.hypot(pos[a, 0] - pos[b, 0], pos[a, 1] - pos[b, 1])

    return _check_bounds(
        dist(i1, i2),
        dist(i3, i4),
        dist(i1, i3),
        dist(i2, i4),
        cfg,
        wavelength,
        mode,
    )


def _aligned_station_ok(quad, chord1, chord2, cfg, wavelength, mode) -> bool:
    """Re-verify the chord floors at the true distances of the aligned station."""
    try:
        fx, fy = bisector_intersection(quad[0], quad[1], quad[2], quad[3])
    except (ParallelChordsError, DegenerateChordError):
        return False
    station = (fx, fy, cfg.min_height)
    m1 = (0.5 * (quad[0, 0] + quad[1, 0]), 0.5 * (quad[0, 1] + quad[1, 1]))
    m2 = (0.5 * (quad[2, 0] + quad[3, 0]), 0.5 * (quad[2, 1] + quad[3, 1]))
    z1 = transmission_distance(station, m1)
    z2 = transmission_distance(station, m2)
    return chord1 >= chord_floor(z1, wavelength, mode) and chord2 >= chord_floor(
        z2, wavelength, mode
    )


def greedy_select(users, cfg: SelectionConfig, wavelength: float, mode: int, center=None):
    """Boundary-first iterative selection; returns the best CugSelection or None.

    The anchor starts at the user farthest from ``center`` (hotspot center;
    bounding-box center of the drop when omitted).  Each round pairs the
    anchor with its nearest neighbor and the second/third nearest users as
    the other pair, closes the four users into a simple quadrilateral
    (trying both traversal directions of the second pair), screens it with
    the constraint bounds, and re-verifies the chord floors at the true
    distances of the aligned station before the candidate may replace the
    incumbent (strictly lower squared right-angle deviation).  The anchor
    is then retired and its nearest neighbor becomes the next anchor;
    distance ties go to the lowest user index.  Stops when the incumbent
    deviation reaches the stop threshold or fewer than four users remain,
    so at most U - 3 rounds run.
    """
    pos = np.asarray(getattr(users, "positions", users), dtype=float)
    n = len(pos)
    if n < 4:
        raise InsufficientUsersError("insufficient users: need at least 4")
    if center is None:
        lo = pos.min(axis=0)
        hi = pos.max(axis=0)
        center = (0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]))
    cx, cy = float(center[0]), float(center[1])

    work = np.array(pos, dtype=float)  # compact array of active users
    ids = np.arange(n)
    count = n
    from_center = (work[:, 0] - cx) ** 2 + (work[:, 1] - cy) ** 2
    cur = int(np.argmax(from_center))  # first maximum = lowest index on ties

    best = None
    best_psi = math.inf
    while count > 3 and best_psi > cfg.stop_threshold:
        x1 = work[cur, 0]
        y1 = work[cur, 1]
        dx = work[:count, 0] - x1
        dy = work[:count, 1] - y1
        d2 = dx * dx + dy * dy
        d2[cur] = np.inf
        k = min(8, count - 1)
        near = np.argpartition(d2, k - 1)[:k]
        near = sorted(near.tolist(), key=lambda w: (d2[w], ids[w]))
        u2w = near[0]

        # The pair split is fixed by nearest rank; the second pair's traversal
        # direction is not.  Exactly one direction generally closes the four
        # users into a simple quadrilateral (both fail when the chords cross),
        # so take the first one that does.
        for u3w, u4w in ((near[1], near[2]), (near[2], near[1])):
            x2, y2 = work[u2w, 0], work[u2w, 1]
            x3, y3 = work[u3w, 0], work[u3w, 1]
            x4, y4 = work[u4w, 0], work[u4w, 1]
            quad = np.array(((x1, y1), (x2, y2), (x3, y3), (x4, y4)))
            try:
                psi = float(angle_square_difference(quad_inner_angles(quad)))
            except NotSimpleQuadrilateralError:
                continue
            chord1 = math.hypot(x2 - x1, y2 - y1)
            chord2 = math.hypot(x4 - x3, y4 - y3)
            diag1 = math.hypot(x3 - x1, y3 - y1)
            diag2 = math.hypot(x4 - x2, y4 - y2)
            if (
                psi < best_psi
                and _check_bounds(chord1, chord2, diag1, diag2, cfg, wavelength, mode).ok
                and _aligned_station_ok(quad, chord1, chord2, cfg, wavelength, mode)
            ):
                best = CugSelection(
                    (int(ids[cur]), int(ids[u2w])),
                    (int(ids[u3w]), int(ids[u4w])),
                    chord1,
                    chord2,
                    diag1,
                    diag2,
                    psi,
                )
                best_psi = psi
            break
        # Retire the anchor (swap-remove), advance to its nearest neighbor.
        last = count - 1
        nxt = cur if u2w == last else u2w
        work[cur] = work[last]
        ids[cur] = ids[last]
        count = last
        cur = nxt
    return best


def _canonical_cycle(cycle):
    """Lowest-index representative among the traversals preserving the pairing."""
    a, b, c, d = cycle
    return min((a, b, c, d), (b, a, d, c), (c, d, a, b), (d, c, b, a))


def exhaustive_select(users, cfg: SelectionConfig, wavelength: float, mode: int):
    """Globally best selection by brute force; oracle for small instances.

    Enumerates every 4-subset, the three distinct vertex cycles on it, and
    both opposite-side pairings of each cycle; non-simple cycles are
    discarded and the remaining candidates face the same constraint screen
    as the greedy pass.  Returns the feasible candidate with the smallest
    squared right-angle deviation (ties to the lowest index cycle), or
    None.  Instances above MAX_ORACLE_USERS users are refused.
    """
    pos = np.asarray(getattr(users, "positions", users), dtype=float)
    n = len(pos)
    if n < 4:
        raise InsufficientUsersError("insufficient users: need at least 4")
    if n > MAX_ORACLE_USERS:
        raise OracleSizeError(
            f"instance too large for oracle: {n} users > {MAX_ORACLE_USERS}"
        )

    def dist(a, b):
        return math.hypot(pos[a, 0] - pos[b, 0], pos[a, 1] - pos[b, 1])

    best = None
    best_key = None
    for a, b, c, d in combinations(range(n), 4):
        for cycle in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            try:
                psi = angle_square_difference(quad_inner_angles(pos[list(cycle)]))
            except NotSimpleQuadrilateralError:
                continue
            rotated = (cycle[1], cycle[2], cycle[3], cycle[0])
            for pairing in (cycle, rotated):
                i1, i2, i3, i4 = _canonical_cycle(pairing)
                chord1 = dist(i1, i2)
                chord2 = dist(i3, i4)
                diag1 = dist(i1, i3)
                diag2 = dist(i2, i4)
                if not _check_bounds(
                    chord1, chord2, diag1, diag2, cfg, wavelength, mode
                ).ok:
                    continue
                key = (psi, i1, i2, i3, i4)
                if best_key is None or key < best_key:
                    best_key = key
                    best = CugSelection(
                        (i1, i2), (i3, i4), chord1, chord2, diag1, diag2, float(psi)
                    )
    return best
