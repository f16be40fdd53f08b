"""Downlink model: mode fields, pair channels, zero forcing, link evaluation."""

import math

import numpy as np
import pytest

from oamcoop.beam import BeamSpec, RingTarget, feasible_ring_radius, intensity, waist_solve
from oamcoop.geometry import BeamFrameCoords, aim_at_midpoints, bisector_intersection
from oamcoop.link import (
    C_LIGHT,
    FLAG_MODE_INSEPARABLE,
    FLAG_WAIST_INFEASIBLE,
    LinkConfig,
    cug_channel,
    evaluate_link,
    mode_field,
    zf_sinr,
)
from oamcoop.selection import CugSelection


def test_wavelength_from_carrier():
    cfg = LinkConfig(carrier_frequency=1e9)
    assert cfg.wavelength == pytest.approx(C_LIGHT / 1e9, rel=1e-15)


def test_default_aperture_is_isotropic():
    cfg = LinkConfig()
    lam = cfg.wavelength
    assert cfg.effective_aperture == pytest.approx(lam * lam / (4 * math.pi), rel=1e-15)
    assert LinkConfig(aperture=0.05).effective_aperture == 0.05


@pytest.mark.parametrize(
    "modes,expect",
    [((1, 2), 1), ((-1, 2), -1), ((2, -2), 2), ((3, -2), -2)],
)
def test_ring_mode_prefers_low_positive_order(modes, expect):
    assert LinkConfig(mode_set=modes).ring_mode == expect


def test_mode_set_must_be_two_distinct():
    with pytest.raises(ValueError):
        LinkConfig(mode_set=(1, 1))
    with pytest.raises(ValueError):
        LinkConfig(mode_set=(1,))


def test_mode_field_magnitude_and_phase():
    spec = BeamSpec(0.3, 2, 1.1)
    rho, phi, z = 1.7, 0.9, 42.0
    val = mode_field(spec, rho, phi, z)
    assert abs(val) ** 2 == pytest.approx(float(intensity(spec, rho, z)), rel=1e-12)
    assert np.angle(val) == pytest.approx(
        math.remainder(2 * phi, 2 * math.pi), abs=1e-12
    )


def _coords(rho, phi, axial=50.0):
    return BeamFrameCoords(rho, phi, axial, False)


def test_channel_columns_follow_mode_set():
    cfg = LinkConfig(mode_set=(2, 1))
    lam = cfg.wavelength
    beam = BeamSpec(lam, cfg.ring_mode, 1.2)
    coords = (_coords(2.0, 0.3), _coords(2.0, 0.3 + math.pi))
    h = cug_channel(cfg, beam, coords, (50.0, 50.0))
    assert h.shape == (2, 2)
    gain = math.sqrt(cfg.transmit_power * cfg.effective_aperture)
    from dataclasses import replace

    for col, mode in enumerate(cfg.mode_set):
        expect = gain * mode_field(replace(beam, mode=mode), 2.0, 0.3, 50.0)
        assert h[0, col] == pytest.approx(expect, rel=1e-12)


def test_zf_orthogonal_equal_norm_columns():
    g = 3.7e-4
    h = (g / math.sqrt(2.0)) * np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex)
    res = zf_sinr(h, 1e-12)
    assert res.separable
    assert res.sinr[0] == pytest.approx(g * g / 1e-12, rel=1e-12)
    assert res.sinr[1] == pytest.approx(g * g / 1e-12, rel=1e-12)


def test_zf_matches_svd_combiner():
    # independent route: SINR_m = 1 / (noise * ||row m of pinv(H)||^2)
    rng = np.random.default_rng(13)
    for _ in range(100):
        h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        res = zf_sinr(h, 2.5e-9)
        if not res.separable:
            continue
        pinv = np.linalg.pinv(h)
        for m in range(2):
            expect = 1.0 / (2.5e-9 * float(np.sum(np.abs(pinv[m, :]) ** 2)))
            assert res.sinr[m] == pytest.approx(expect, rel=1e-9)


def test_zf_refuses_singular_channel():
    h = np.array([[1.0, 1.0], [2.0, 2.0]], dtype=complex)
    res = zf_sinr(h, 1e-12)
    assert not res.separable
    assert res.sinr == (0.0, 0.0)


def test_zf_rejects_bad_shapes():
    with pytest.raises(ValueError):
        zf_sinr(np.zeros((3, 2)), 1e-12)
    with pytest.raises(ValueError):
        zf_sinr(np.eye(2), 0.0)


def test_antipodal_columns_orthogonal_for_odd_mode_gap():
    rng = np.random.default_rng(19)
    for _ in range(200):
        m1 = int(rng.integers(-4, 5))
        m2 = int(rng.integers(-4, 5))
        if m1 == m2 or (m1 - m2) % 2 == 0 or m1 == 0 or m2 == 0:
            continue
        cfg = LinkConfig(mode_set=(m1, m2))
        lam = cfg.wavelength
        z = float(rng.uniform(20.0, 150.0))
        rho = float(feasible_ring_radius(lam, abs(cfg.ring_mode), z)) * float(
            rng.uniform(1.05, 3.0)
        )
        waist = waist_solve(RingTarget(rho, z), lam, abs(cfg.ring_mode))
        beam = BeamSpec(lam, cfg.ring_mode, waist)
        phi = float(rng.uniform(-math.pi, math.pi))
        h = cug_channel(
            cfg, beam, (_coords(rho, phi, z), _coords(rho, phi + math.pi, z)), (z, z)
        )
        dot = abs(np.vdot(h[:, 0], h[:, 1]))
        norms = np.linalg.norm(h[:, 0]) * np.linalg.norm(h[:, 1])
        assert dot <= 1e-12 * norms


def test_antipodal_columns_parallel_for_even_mode_gap():
    cfg = LinkConfig(mode_set=(1, 3))
    lam = cfg.wavelength
    z = 60.0
    rho = 3.0
    waist = waist_solve(RingTarget(rho, z), lam, 1)
    beam = BeamSpec(lam, 1, waist)
    h = cug_channel(
        cfg, beam, (_coords(rho, 0.4, z), _coords(rho, 0.4 + math.pi, z)), (z, z)
    )
    res = zf_sinr(h, 1e-12)
    assert not res.separable
    assert res.condition > 1e12 or not math.isfinite(res.condition)


def _aligned_setup():
    """Concyclic quad, station over the circumcenter, both pairs aligned."""
    center = np.array([50.0, 50.0])
    radius = 4.0
    ang = np.radians([-127.5, -52.5, 30.0, 105.0])
    users = center + radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sel = CugSelection(
        cug1=(0, 1),
        cug2=(2, 3),
        chord1=float(math.dist(users[0], users[1])),
        chord2=float(math.dist(users[2], users[3])),
        diag1=float(math.dist(users[0], users[2])),
        diag2=float(math.dist(users[1], users[3])),
        angle_square_diff=0.0,
    )
    f = bisector_intersection(users[0], users[1], users[2], users[3])
    m1 = (users[0] + users[1]) / 2.0
    m2 = (users[2] + users[3]) / 2.0
    placement = aim_at_midpoints(np.array([f.x, f.y, 50.0]), m1, m2)
    return users, sel, placement


def test_aligned_link_matches_closed_form():
    # with both users on the ring at antipodal azimuths the ZF SINR collapses
    # to the two-antenna combined SNR, 2 * P * A * I_m / N per mode
    users, sel, placement = _aligned_setup()
    cfg = LinkConfig()
    report = evaluate_link(cfg, placement, sel, users)
    lam = cfg.wavelength
    for k, chord in ((0, sel.chord1), (1, sel.chord2)):
        z = float(placement.distances[k])
        waist = waist_solve(RingTarget(0.5 * chord, z), lam, 1)
        expect = 0.0
        for mode in cfg.mode_set:
            i_m = float(intensity(BeamSpec(lam, mode, waist), 0.5 * chord, z))
            snr = 2.0 * cfg.transmit_power * cfg.effective_aperture * i_m / cfg.noise_power
            expect += math.log2(1.0 + snr)
        assert report.cugs[k].se == pytest.approx(expect, rel=1e-9)
    assert report.se_total == pytest.approx(
        report.cugs[0].se + report.cugs[1].se, rel=1e-12
    )
    assert report.flags == ()


def test_aligned_modes_have_equal_sinr_per_mode_pairing():
    users, sel, placement = _aligned_setup()
    report = evaluate_link(LinkConfig(), placement, sel, users)
    for cug in report.cugs:
        # mode 1 rides its tuned ring; mode 2's ring is wider so it is weaker
        assert cug.sinr[0] > cug.sinr[1] > 0.0


def test_unreachable_ring_zeroes_one_pair():
    users, sel, placement = _aligned_setup()
    import dataclasses

    tight = dataclasses.replace(sel, chord1=0.5)
    report = evaluate_link(LinkConfig(), placement, tight, users)
    assert report.cugs[0].se == 0.0
    assert report.cugs[0].waist is None
    assert report.cugs[0].flags == (FLAG_WAIST_INFEASIBLE,)
    assert report.cugs[1].se > 0.0
    assert report.flags == (FLAG_WAIST_INFEASIBLE,)
    assert report.se_total == pytest.approx(report.cugs[1].se, rel=1e-12)


def test_even_mode_gap_flags_inseparable_link():
    users, sel, placement = _aligned_setup()
    report = evaluate_link(LinkConfig(mode_set=(1, 3)), placement, sel, users)
    assert FLAG_MODE_INSEPARABLE in report.flags
    assert report.se_total == 0.0


def test_misaligned_station_never_beats_aligned():
    # hold the selection fixed and push the station off the equidistant
    # point; the evaluated rate must not increase
    users, sel, placement = _aligned_setup()
    cfg = LinkConfig()
    base = evaluate_link(cfg, placement, sel, users).se_total
    rng = np.random.default_rng(59)
    m1 = (users[0] + users[1]) / 2.0
    m2 = (users[2] + users[3]) / 2.0
    for delta in (0.5, 1.0, 2.0):
        worst = base
        for _ in range(40):
            step = rng.normal(size=2)
            step *= delta / np.linalg.norm(step)
            moved = aim_at_midpoints(
                placement.position + np.array([step[0], step[1], 0.0]), m1, m2
            )
            worst = min(worst, evaluate_link(cfg, moved, sel, users).se_total)
        assert worst <= base + 1e-9
