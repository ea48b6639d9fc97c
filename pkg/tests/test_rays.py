import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chirpdnls.core import LINEAR_CHIRP, DimensionlessParams, crossing_time
from chirpdnls.rays import (
    EdgeOutOfBand,
    RayState,
    ResonanceLost,
    detect_capture,
    integrate_rays,
    integrate_reduced,
    k_lower_edge,
    k_resonant,
    omega_local,
    ray_rhs,
    run_ensemble,
    separatrix_boundary,
    separatrix_geometry,
    separatrix_radicand,
    stable_phase,
    wrap_k,
    write_ensemble_csv,
)
from chirpdnls.regimes import ar_threshold_p2

P = DimensionlessParams(0.3, 5.0, 0.0, 80)


@given(k=st.floats(-100, 100))
def test_wrap_k_range_and_equivalence(k):
    w = float(wrap_k(k))
    assert -math.pi < w <= math.pi
    assert math.cos(w) == pytest.approx(math.cos(k), abs=1e-9)
    assert RayState(0.0, k).k == w


@given(x=st.floats(0, 80), k=st.floats(-3, 3), tau=st.floats(0, 40))
def test_ray_rhs_is_hamiltonian_gradient(x, k, tau):
    h = 1e-6
    dx, dk, dom, _ = ray_rhs(RayState(x, k), tau, P)
    dH_dk = (omega_local(x, k + h, tau, P) - omega_local(x, k - h, tau, P)) / (2 * h)
    dH_dx = (omega_local(x + h, k, tau, P) - omega_local(x - h, k, tau, P)) / (2 * h)
    dH_dt = (omega_local(x, k, tau + h, P) - omega_local(x, k, tau - h, P)) / (2 * h)
    scale = 1 + P.band_scale
    assert dx == pytest.approx(dH_dk, abs=1e-6 * scale)
    assert dk == pytest.approx(-dH_dx, abs=1e-6 * scale)
    assert dom == pytest.approx(dH_dt, abs=1e-6 * scale * (1 + tau))


def test_omega_tracks_hamiltonian_along_rays():
    tau, x, k, om, _ = integrate_rays([3.0, 20.0], [0.1, 0.4], P, 0.0, 12.0,
                                      samples=np.linspace(0, 12, 7))
    direct = omega_local(x, k, tau[:, None], P)
    assert np.allclose(om, direct, atol=1e-6 * P.band_scale)


def test_rays_reduce_to_pendulum_system():
    # Phi = k0 x - theta_d obeys the reduced pair when the wave is resonant
    params = DimensionlessParams(0.4, 5.0, 0.0, 80)
    x0, k0 = 5.0, 0.05
    phi0 = params.k0 * x0
    samples = np.linspace(0, 20, 41)
    tau, x, k, _, _ = integrate_rays([x0], [k0], params, 0.0, 20.0, samples=samples)
    red = integrate_reduced(phi0, k0, params, 0.0, 20.0, n_samples=41)
    phi_ray = params.k0 * x[:, 0] - LINEAR_CHIRP.theta_d(tau)
    assert np.allclose(k[:, 0], red.k[:, 0], atol=2e-2)
    assert np.allclose(phi_ray, red.phi[:, 0], atol=5e-2)


def test_k_resonant_and_band_edge():
    tau = 0.5 * P.p2 * P.n_sites / math.pi
    assert k_resonant(tau, P) == pytest.approx(math.pi / 6)
    with pytest.raises(ResonanceLost):
        k_resonant(2 * P.p2 * P.n_sites / math.pi, P)


def test_stable_phase_is_equilibrium():
    params = DimensionlessParams(0.2, 5.0, 0.0, 80)
    phi = stable_phase(params, 0.0)
    amp = 4 * params.p1 * params.p2
    assert amp * math.sin(phi) == pytest.approx(-1.0)
    assert stable_phase(DimensionlessParams(0.01, 5.0, 0.0, 80)) == -math.pi / 2


def test_capture_above_and_escape_below_threshold():
    above = run_ensemble(DimensionlessParams(0.1, 5.0, 0.0, 80), 6, 60.0, seed=3)
    below = run_ensemble(DimensionlessParams(0.02, 5.0, 0.0, 80), 6, 60.0, seed=3)
    assert above.fraction == 1.0
    assert below.fraction == 0.0
    k_end = above.trajectory.k[-1]
    assert np.allclose(k_end, k_resonant(60.0, above.trajectory.params), atol=0.2)


def test_ensemble_is_seeded():
    p = DimensionlessParams(0.06, 5.0, 0.0, 80)
    a = run_ensemble(p, 5, 30.0, rule="uniform", seed=11)
    b = run_ensemble(p, 5, 30.0, rule="uniform", seed=11)
    c = run_ensemble(p, 5, 30.0, rule="uniform", seed=12)
    assert np.array_equal(a.trajectory.phi, b.trajectory.phi)
    assert not np.array_equal(a.trajectory.phi[0], c.trajectory.phi[0])


def test_empty_ensemble():
    res = run_ensemble(P, 0, 10.0)
    assert res.fraction is None and res.captured.size == 0


def test_unknown_rule():
    with pytest.raises(ValueError):
        run_ensemble(P, 2, 1.0, rule="nope")


def test_detect_capture_flags_drifting_ray():
    params = DimensionlessParams(0.3, 5.0, 0.0, 80)
    traj = integrate_reduced([stable_phase(params), 0.0], 0.0, params, 0.0, 40.0)
    traj.phi[:, 1] = np.linspace(0, 40, traj.tau.size)  # free rotation
    assert list(detect_capture(traj)) == [True, False]


@given(b=st.floats(0.05, 200))
def test_separatrix_turning_point_and_depth(b):
    params = DimensionlessParams(1.0, 1.0, 0.0, 80)
    a = math.sqrt(1 + b * b)
    params = params.replace(p1=a / 4)  # A = 4 p1 p2 cos k_r at tau = 0
    geo = separatrix_geometry(params, 0.0)
    assert geo.b_param == pytest.approx(b, rel=1e-9)
    phis = np.linspace(1e-9, 2 * math.pi, 20001)
    r = separatrix_radicand(phis, b)
    if geo.phi_turn > 0:
        assert separatrix_radicand(geo.phi_turn, b) == pytest.approx(0, abs=1e-8 * (1 + b))
        assert np.all(r[phis < geo.phi_turn * (1 - 1e-6)] > -1e-12)
    assert geo.min_branch_velocity == pytest.approx(-math.sqrt(2 * max(r.max(), 0)), rel=1e-6,
                                                    abs=1e-9)


def test_phi_turn_approaches_two_pi():
    turns = [separatrix_geometry(DimensionlessParams(math.sqrt(1 + b * b) / 4, 1.0, 0.0, 80),
                                 0.0).phi_turn for b in (10, 100, 1000)]
    gaps = [2 * math.pi - t for t in turns]
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert gaps[2] < 0.3


def test_no_separatrix_below_threshold():
    assert separatrix_geometry(DimensionlessParams(0.01, 5.0, 0.0, 80), 0.0) is None
    with pytest.raises(ValueError):
        k_lower_edge(DimensionlessParams(0.01, 5.0, 0.0, 80), 0.0)


def test_edge_out_of_band_raises():
    params = DimensionlessParams(500.0, 5.0, 0.0, 80)
    with pytest.raises(EdgeOutOfBand):
        k_lower_edge(params, 10.0)


def test_separatrix_boundary_where_it_exists():
    p1 = np.array([4.0, 5.0, 8.0])
    p2 = separatrix_boundary(p1)
    assert np.all(np.isfinite(p2))
    assert np.all(np.diff(p2) < 0)
    assert np.all(p2 > [ar_threshold_p2(x) for x in p1])
    for a, b in zip(p1, p2):
        params = DimensionlessParams(a, b, 0.0, 80)
        assert k_lower_edge(params, crossing_time(15, params)) == pytest.approx(math.pi / 4,
                                                                               abs=1e-6)


def test_ensemble_csv(tmp_path):
    res = run_ensemble(P, 2, 5.0, n_samples=6)
    rows = list(csv.reader(write_ensemble_csv(res, tmp_path / "r.csv").open()))
    assert rows[0] == ["ray_id", "tau", "x", "k", "phi", "captured_flag"]
    assert len(rows) == 1 + 2 * 6
