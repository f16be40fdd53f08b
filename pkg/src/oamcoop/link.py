"""Two-mode OAM downlink over a cooperative pair.

Each cooperative pair is served by one beam axis carrying two OAM modes;
the two users of the pair act as a distributed two-element receiver and
separate the modes by zero forcing.  The two pairs of a selection occupy
orthogonal resources, so their rates add.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .beam import MAX_MODE_ORDER, BeamSpec, RingTarget, intensity, waist_solve
from .errors import WaistInfeasibleError
from .geometry import Placement, beam_frame_coords

C_LIGHT = 299_792_458.0

# Channel matrices with a 2-norm condition number beyond this are treated
# as mode-inseparable rather than inverted.
ILL_CONDITION_LIMIT = 1e12

FLAG_WAIST_INFEASIBLE = "waist-infeasible"
FLAG_MODE_INSEPARABLE = "mode-inseparable"


@dataclass(frozen=True)
class LinkConfig:
    """Radio parameters of the downlink.

    ``aperture`` is the effective receive area in m^2; when None it
    defaults to wavelength^2 / (4 pi), the isotropic-element value.
    """

    carrier_frequency: float = 1e9
    transmit_power: float = 1.0
    noise_power: float = 1e-12
    mode_set: tuple[int, int] = (1, 2)
    aperture: float | None = None

    def __post_init__(self):
        if not self.carrier_frequency > 0.0:
            raise ValueError("carrier_frequency must be positive")
        if not self.transmit_power > 0.0:
            raise ValueError("transmit_power must be positive")
        if not self.noise_power > 0.0:
            raise ValueError("noise_power must be positive")
        modes = tuple(int(m) for m in self.mode_set)
        if len(modes) != 2 or modes[0] == modes[1]:
            raise ValueError("mode_set must hold exactly two distinct modes")
        if any(abs(m) > MAX_MODE_ORDER for m in modes):
            raise ValueError(
                f"mode orders must satisfy |mode| <= {MAX_MODE_ORDER}"
            )
        object.__setattr__(self, "mode_set", modes)
        if self.aperture is not None and not self.aperture > 0.0:
            raise ValueError("aperture must be positive")

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.carrier_frequency

    @property
    def effective_aperture(self) -> float:
        if self.aperture is not None:
            return self.aperture
        lam = self.wavelength
        return lam * lam / (4.0 * math.pi)

    @property
    def ring_mode(self) -> int:
        """Mode whose intensity ring the waist is tuned for: lowest nonzero order."""
        nonzero = [m for m in self.mode_set if m != 0]
        nonzero.sort(key=lambda m: (abs(m), m < 0))
        return nonzero[0]


@dataclass(frozen=True)
class ZfResult:
    """Zero-forcing outcome: per-mode SINR, condition diagnostic, separability."""

    sinr: tuple[float, float]
    condition: float
    separable: bool


@dataclass(frozen=True)
class CugLinkReport:
    """Link outcome for one cooperative pair."""

    users: tuple[int, int]
    waist: float | None
    sinr: tuple[float, float]
    se_per_mode: tuple[float, float]
    se: float
    condition: float
    flags: tuple[str, ...]


@dataclass(frozen=True)
class LinkReport:
    """Link outcome for a full selection; pair rates add across resources."""

    cugs: tuple[CugLinkReport, CugLinkReport]
    se_total: float

    @property
    def flags(self) -> tuple[str, ...]:
        seen = []
        for cug in self.cugs:
            for flag in cug.flags:
                if flag not in seen:
                    seen.append(flag)
        return tuple(seen)


def mode_field(spec: BeamSpec, radial, azimuth, axial):
    """Complex mode amplitude sqrt(I) * exp(i * mode * azimuth) at a point.

    Axial phase terms common to every receive point of a pair are omitted;
    only the azimuthal term survives zero forcing.
    """
    amp = np.sqrt(intensity(spec, radial, axial))
    return amp * np.exp(1j * spec.mode * np.asarray(azimuth, dtype=float))


def cug_channel(cfg: LinkConfig, beam: BeamSpec, coords, axial_distances) -> np.ndarray:
    """2x2 channel of one pair: rows are users, columns follow cfg.mode_set.

    ``coords`` are the users' beam-frame coordinates, ``axial_distances``
    their per-user axial distances (nonnegative).  Every column shares the
    waist of ``beam``; only the azimuthal order differs.
    """
    gain = math.sqrt(cfg.transmit_power * cfg.effective_aperture)
    h = np.empty((2, 2), dtype=complex)
    for i, (cu, z) in enumerate(zip(coords, axial_distances)):
        for m, mode in enumerate(cfg.mode_set):
            h[i, m] = gain * mode_field(
                replace(beam, mode=mode), cu.radial, cu.azimuth, z
            )
    return h


def zf_sinr(channel, noise_power: float) -> ZfResult:
    """Per-mode zero-forcing SINR, 1 / (noise * [(H^H H)^-1]_mm).

    A channel whose condition number exceeds ILL_CONDITION_LIMIT (or is
    not finite) is reported as inseparable with both SINRs zero instead of
    being inverted.
    """
    h = np.asarray(channel, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError("expected a 2x2 channel")
    if not noise_power > 0.0:
        raise ValueError("noise_power must be positive")
    condition = float(np.linalg.cond(h))
    if not math.isfinite(condition) or condition > ILL_CONDITION_LIMIT:
        return ZfResult((0.0, 0.0), condition, False)
    gram_inv = np.linalg.inv(h.conj().T @ h)
    sinr = tuple(
        1.0 / (noise_power * float(np.real(gram_inv[m, m]))) for m in range(2)
    )
    return ZfResult(sinr, condition, True)


def evaluate_link(cfg: LinkConfig, placement: Placement, selection, users) -> LinkReport:
    """Spectrum efficiency of a placement serving both pairs of a selection.

    Per pair: re-tune the waist so the ring-mode ring radius equals half
    the chord at the pair's aim distance, build the channel from the users'
    beam-frame coordinates, and sum log2(1 + SINR) over both modes.  An
    unreachable ring contributes zero rate with a waist-infeasible flag; an
    inseparable channel contributes zero rate with its own flag.
    """
    pos = np.asarray(getattr(users, "positions", users), dtype=float)
    lam = cfg.wavelength
    reports = []
    pairs = (
        (selection.cug1, selection.chord1),
        (selection.cug2, selection.chord2),
    )
    for k, (pair, chord) in enumerate(pairs):
        aim_distance = float(placement.distances[k])
        try:
            waist = waist_solve(
                RingTarget(0.5 * chord, aim_distance), lam, cfg.ring_mode
            )
        except WaistInfeasibleError:
            reports.append(
                CugLinkReport(
                    users=tuple(int(i) for i in pair),
                    waist=None,
                    sinr=(0.0, 0.0),
                    se_per_mode=(0.0, 0.0),
                    se=0.0,
                    condition=math.inf,
                    flags=(FLAG_WAIST_INFEASIBLE,),
                )
            )
            continue
        beam = BeamSpec(lam, cfg.ring_mode, waist)
        coords = tuple(
            beam_frame_coords(placement.position, placement.axes[k], pos[int(i)])
            for i in pair
        )
        # w(z) is even in z, so a user behind the waist plane sees the
        # mirrored profile.
        axial = tuple(abs(cu.axial) for cu in coords)
        channel = cug_channel(cfg, beam, coords, axial)
        zf = zf_sinr(channel, cfg.noise_power)
        se_per_mode = tuple(math.log2(1.0 + s) for s in zf.sinr)
        reports.append(
            CugLinkReport(
                users=tuple(int(i) for i in pair),
                waist=waist,
                sinr=zf.sinr,
                se_per_mode=se_per_mode,
                se=sum(se_per_mode),
                condition=zf.condition,
                flags=() if zf.separable else (FLAG_MODE_INSEPARABLE,),
            )
        )
    reports = tuple(reports)
    return LinkReport(cugs=reports, se_total=sum(r.se for r in reports))
