"""Cooperative OAM downlink simulator.

A flying base station serves hotspot users with vortex (orbital angular
momentum) beams.  The library models the beam's intensity ring, solves the
waist that pins the ring on a user pair, places the station so both pairs
of a cooperative selection are aligned, and runs Monte Carlo experiments
comparing placement schemes by spectrum efficiency.
"""

__version__ = "0.1.0"

from .beam import (
    BeamSpec,
    RingTarget,
    beam_radius,
    feasible_ring_radius,
    intensity,
    optimal_ring_radius,
    waist_solve,
)
from .geometry import (
    BeamFrameCoords,
    GroundPoint,
    Placement,
    aim_at_midpoints,
    angle_square_difference,
    beam_frame_coords,
    bisector_intersection,
    chord_midpoint,
    quad_inner_angles,
    transmission_distance,
)
from .link import (
    CugLinkReport,
    LinkConfig,
    LinkReport,
    ZfResult,
    cug_channel,
    evaluate_link,
    mode_field,
    zf_sinr,
)
from .selection import (
    ConstraintCheck,
    CugSelection,
    SelectionConfig,
    check_constraints,
    exhaustive_select,
    greedy_select,
)
from .sim import (
    SCHEMES,
    HeatmapResult,
    ScenarioConfig,
    SchemeSummary,
    TrialResult,
    UserDrop,
    drop_users,
    place_acoc,
    place_cow,
    place_random,
    place_suboptimal,
    run_experiment,
    run_trial,
    se_heatmap,
    select_users,
    summarize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
