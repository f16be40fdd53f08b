"""Monte Carlo experiments comparing station placement schemes.

Each trial drops users uniformly over a square hotspot, runs the greedy
pair selection once, and evaluates every requested placement scheme on
that same drop and selection, so per-trial comparisons are paired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InfeasiblePlacementError, InfeasibleScenarioError
from .geometry import (
    Placement,
    aim_at_midpoints,
    bisector_intersection,
    chord_midpoint,
)
from .link import LinkConfig, LinkReport, evaluate_link
from .selection import (
    CugSelection,
    SelectionConfig,
    chord_floor,
    greedy_select,
)

SCHEME_ACOC = "acoc"
SCHEME_SUBOPTIMAL = "suboptimal"
SCHEME_RANDOM = "random"
SCHEME_COW = "cow"
SCHEMES = (SCHEME_ACOC, SCHEME_SUBOPTIMAL, SCHEME_RANDOM, SCHEME_COW)

FLAG_NO_SELECTION = "no-selection"

# Independent substreams of a trial's randomness.
_STREAM_DROP = 0
_STREAM_RANDOM_PLACEMENT = 1


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment setup; all distances in meters."""

    hotspot_side: float = 100.0
    user_count: int = 4000
    fbs_height: float = 50.0
    trials: int = 200
    master_seed: int = 1
    link: LinkConfig = field(default_factory=LinkConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    ground_bs_position: tuple[float, float, float] | None = None

    def __post_init__(self):
        if not self.hotspot_side > 0.0:
            raise ValueError("hotspot_side must be positive")
        if self.user_count < 1:
            raise ValueError("user_count must be at least 1")
        if not self.fbs_height > 0.0:
            raise ValueError("fbs_height must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if self.ground_bs_position is not None:
            x, y, z = self.ground_bs_position
            if not z > 0.0:
                raise ValueError("ground BS height must be positive")
            object.__setattr__(
                self, "ground_bs_position", (float(x), float(y), float(z))
            )

    @property
    def hotspot_center(self) -> tuple[float, float]:
        return (0.5 * self.hotspot_side, 0.5 * self.hotspot_side)

    def resolved_selection(self) -> SelectionConfig:
        """Selection bounds with min_height pinned to the station's flight height."""
        return replace(self.selection, min_height=self.fbs_height)

    def resolved_ground_bs(self) -> tuple[float, float, float]:
        """Fixed-station position: hotspot center at flight height unless overridden."""
        if self.ground_bs_position is not None:
            return self.ground_bs_position
        cx, cy = self.hotspot_center
        return (cx, cy, self.fbs_height)


@dataclass(frozen=True, eq=False)
class UserDrop:
    """One realization of user positions inside the hotspot square."""

    positions: np.ndarray  # shape (U, 2)
    drop_seed: int


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Outcome of one scheme on one trial."""

    trial_index: int
    scheme: str
    selection: CugSelection | None
    placement: Placement | None
    link_report: LinkReport | None
    se_total: float
    flags: tuple[str, ...]


def stream_seed(master_seed: int, trial_index: int, stream: int = 0) -> int:
    """Stable 64-bit seed for one substream of one trial."""
    seq = np.random.SeedSequence([int(master_seed), int(trial_index), int(stream)])
    return int(seq.generate_state(1, np.uint64)[0])


def drop_users(cfg: ScenarioConfig, trial_index: int) -> UserDrop:
    """Sample user_count positions i.i.d. uniformly over the hotspot square."""
    seed = stream_seed(cfg.master_seed, trial_index, _STREAM_DROP)
    rng = np.random.default_rng(seed)
    positions = rng.uniform(0.0, cfg.hotspot_side, size=(cfg.user_count, 2))
    return UserDrop(positions=positions, drop_seed=seed)


def select_users(cfg: ScenarioConfig, drop: UserDrop) -> CugSelection | None:
    """Greedy pair selection for a drop, anchored on the hotspot boundary."""
    return greedy_select(
        drop,
        cfg.resolved_selection(),
        cfg.link.wavelength,
        cfg.link.ring_mode,
        center=cfg.hotspot_center,
    )


def _selection_midpoints(users, selection: CugSelection):
    pos = np.asarray(getattr(users, "positions", users), dtype=float)
    m1 = chord_midpoint(pos[selection.cug1[0]], pos[selection.cug1[1]])
    m2 = chord_midpoint(pos[selection.cug2[0]], pos[selection.cug2[1]])
    return m1, m2


def place_acoc(users, selection: CugSelection, height: float, wavelength: float, mode: int) -> Placement:
    """Aligned placement: above the intersection of both chord bisectors.

    The position is equidistant from the two users of each pair, so both
    beams are aligned.  The chord floors are re-verified at the true
    transmission distances; a violation raises InfeasiblePlacementError.
    """
    pos = np.asarray(getattr(users, "positions", users), dtype=float)
    i1, i2 = selection.cug1
    i3, i4 = selection.cug2
    fx, fy = bisector_intersection(pos[i1], pos[i2], pos[i3], pos[i4])
    m1, m2 = _selection_midpoints(users, selection)
    placement = aim_at_midpoints((fx, fy, height), m1, m2)
    chords = (selection.chord1, selection.chord2)
    for k in range(2):
        floor = chord_floor(float(placement.distances[k]), wavelength, mode)
        if chords[k] < floor:
            raise InfeasiblePlacementError(
                f"cug{k + 1} chord {chords[k]:.6g} m is below the ring floor "
                f"{floor:.6g} m at its true transmission distance"
            )
    return placement


def place_suboptimal(users, selection: CugSelection, height: float) -> Placement:
    """Placement above the first pair's midpoint: aligns that pair only."""
    m1, m2 = _selection_midpoints(users, selection)
    return aim_at_midpoints((m1.x, m1.y, height), m1, m2)


def place_random(users, selection: CugSelection, hotspot_side: float, height: float, seed: int) -> Placement:
    """Placement above a uniform random point of the hotspot square."""
    rng = np.random.default_rng(int(seed))
    x, y = rng.uniform(0.0, hotspot_side, size=2)
    m1, m2 = _selection_midpoints(users, selection)
    return aim_at_midpoints((x, y, height), m1, m2)


def place_cow(users, selection: CugSelection, position) -> Placement:
    """Fixed terrestrial station (cell on wheels) at a given 3D position."""
    m1, m2 = _selection_midpoints(users, selection)
    return aim_at_midpoints(position, m1, m2)


def run_trial(cfg: ScenarioConfig, trial_index: int, schemes=SCHEMES) -> list[TrialResult]:
    """Drop, select once, then evaluate every scheme on the shared selection."""
    drop = drop_users(cfg, trial_index)
    selection = select_users(cfg, drop)
    results = []
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        if selection is None:
            results.append(
                TrialResult(
                    trial_index=trial_index,
                    scheme=scheme,
                    selection=None,
                    placement=None,
                    link_report=None,
                    se_total=0.0,
                    flags=(FLAG_NO_SELECTION,),
                )
            )
            continue
        if scheme == SCHEME_ACOC:
            placement = place_acoc(
                drop, selection, cfg.fbs_height, cfg.link.wavelength, cfg.link.ring_mode
            )
        elif scheme == SCHEME_SUBOPTIMAL:
            placement = place_suboptimal(drop, selection, cfg.fbs_height)
        elif scheme == SCHEME_RANDOM:
            placement = place_random(
                drop,
                selection,
                cfg.hotspot_side,
                cfg.fbs_height,
                stream_seed(cfg.master_seed, trial_index, _STREAM_RANDOM_PLACEMENT),
            )
        else:
            placement = place_cow(drop, selection, cfg.resolved_ground_bs())
        report = evaluate_link(cfg.link, placement, selection, drop)
        results.append(
            TrialResult(
                trial_index=trial_index,
                scheme=scheme,
                selection=selection,
                placement=placement,
                link_report=report,
                se_total=report.se_total,
                flags=report.flags,
            )
        )
    return results


def run_experiment(cfg: ScenarioConfig, schemes=SCHEMES) -> list[TrialResult]:
    """All trials of a scenario, ordered by (trial, scheme)."""
    results = []
    for t in range(cfg.trials):
        results.extend(run_trial(cfg, t, schemes))
    return results


@dataclass(frozen=True)
class SchemeSummary:
    """Aggregate over the trials of one scheme."""

    scheme: str
    trials: int
    mean_se: float
    ci95_half_width: float
    flag_rate: float


def summarize(results) -> dict[str, SchemeSummary]:
    """Per-scheme mean spectrum efficiency with a normal 95% interval."""
    order: list[str] = []
    buckets: dict[str, list[TrialResult]] = {}
    for r in results:
        if r.scheme not in buckets:
            buckets[r.scheme] = []
            order.append(r.scheme)
        buckets[r.scheme].append(r)
    summaries = {}
    for scheme in order:
        rows = buckets[scheme]
        se = np.array([r.se_total for r in rows], dtype=float)
        n = len(se)
        half = 1.96 * float(np.std(se, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
        flagged = sum(1 for r in rows if r.flags)
        summaries[scheme] = SchemeSummary(
            scheme=scheme,
            trials=n,
            mean_se=float(np.mean(se)),
            ci95_half_width=half,
            flag_rate=flagged / n,
        )
    return summaries


@dataclass(frozen=True, eq=False)
class HeatmapResult:
    """Spectrum efficiency over a grid of candidate positions at flight height."""

    xs: np.ndarray  # shape (G,)
    ys: np.ndarray  # shape (G,)
    se: np.ndarray  # shape (G, G), se[j, i] at (xs[i], ys[j])
    optimum: tuple[float, float]
    se_at_optimum: float
    selection: CugSelection
    drop: UserDrop


def se_heatmap(cfg: ScenarioConfig, grid_size: int) -> HeatmapResult:
    """Evaluate one drop's selection from every point of a position grid.

    Uses trial 0's drop and selection; raises InfeasibleScenarioError when
    the drop yields no selection.  The aligned-scheme position is evaluated
    separately and reported as the closed-form optimum marker.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    drop = drop_users(cfg, 0)
    selection = select_users(cfg, drop)
    if selection is None:
        raise InfeasibleScenarioError(
            "scenario yields no usable selection on trial 0"
        )
    m1, m2 = _selection_midpoints(drop, selection)
    opt = place_acoc(
        drop, selection, cfg.fbs_height, cfg.link.wavelength, cfg.link.ring_mode
    )
    se_opt = evaluate_link(cfg.link, opt, selection, drop).se_total
    xs = np.linspace(0.0, cfg.hotspot_side, grid_size)
    ys = np.linspace(0.0, cfg.hotspot_side, grid_size)
    se = np.empty((grid_size, grid_size))
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            placement = aim_at_midpoints((x, y, cfg.fbs_height), m1, m2)
            se[j, i] = evaluate_link(cfg.link, placement, selection, drop).se_total
    return HeatmapResult(
        xs=xs,
        ys=ys,
        se=se,
        optimum=(float(opt.position[0]), float(opt.position[1])),
        se_at_optimum=se_opt,
        selection=selection,
        drop=drop,
    )
