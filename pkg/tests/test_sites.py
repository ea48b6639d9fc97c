import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from chirpdnls.core import DimensionlessParams
from chirpdnls.sites import (
    Boundary,
    ConfigurationError,
    DriveKind,
    IntegratorConfig,
    LatticeState,
    ground_state,
    integrate,
    mode_basis,
    norm,
    rhs_site,
    write_trajectory_csv,
)

PAIRS = [(Boundary.PERIODIC, DriveKind.TRAVELING), (Boundary.ZERO, DriveKind.STANDING)]


def _random_state(n, seed, bc=Boundary.PERIODIC):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    if bc is Boundary.ZERO:
        psi[0] = psi[-1] = 0
    return psi / np.linalg.norm(psi)


@pytest.mark.parametrize("bc", list(Boundary))
@given(n=st.integers(3, 30))
def test_mode_basis_orthonormal_eigenvectors(bc, n):
    p = DimensionlessParams(0.2, 1.5, 0.0, n)
    basis = mode_basis(p, bc)
    v = basis.vectors[basis.interior]
    assert np.allclose(v.conj().T @ v, np.eye(v.shape[1]), atol=1e-12)
    # linear, undriven rhs acting on a mode is -i omega times the mode
    for j in range(basis.labels.size):
        s = LatticeState(basis.vectors[:, j], 0.0)
        lin = rhs_site(s, p.replace(p1=0.0), bc=bc,
                       dk=DriveKind.TRAVELING if bc is Boundary.PERIODIC else DriveKind.STANDING)
        assert np.allclose(lin, -1j * basis.omegas[j] * basis.vectors[:, j],
                           atol=1e-9 * p.band_scale)


def test_rhs_site_matches_hand_stencil(small_ring):
    p = small_ring
    n = p.n_sites
    psi = _random_state(n, 1)
    tau = 0.7
    hop = n * n * p.p2 / (4 * math.pi**2)
    want = np.empty(n, dtype=complex)
    for j in range(n):
        lap = psi[(j + 1) % n] + psi[j - 1] - 2 * psi[j]
        phase = 2 * math.pi * j / n - tau**2 / 2
        pot = n * p.p3 * abs(psi[j]) ** 2 + 2 * p.p1 * math.cos(phase)
        want[j] = 1j * (hop * lap + pot * psi[j])
    assert np.allclose(rhs_site(LatticeState(psi, tau), p), want)


def test_rhs_site_pinned_ends(small_chain):
    p = small_chain
    n = p.n_sites
    psi = _random_state(n, 2, Boundary.ZERO)
    tau = 1.3
    out = rhs_site(LatticeState(psi, tau), p, bc=Boundary.ZERO, dk=DriveKind.STANDING)
    assert out[0] == 0 and out[-1] == 0
    hop = n * n * p.p2 / (4 * math.pi**2)
    j = 2
    lap = psi[3] + psi[1] - 2 * psi[2]
    drive = 2 * p.p1 * math.cos(tau**2 / 2) * math.cos(math.pi * j / (n - 1))
    want = 1j * (hop * lap + (n * p.p3 * abs(psi[j]) ** 2 + drive) * psi[j])
    assert out[j] == pytest.approx(want)


@pytest.mark.parametrize("bc, dk", [(Boundary.PERIODIC, DriveKind.STANDING),
                                    (Boundary.ZERO, DriveKind.TRAVELING)])
def test_incompatible_drive_rejected(small_ring, bc, dk):
    with pytest.raises(ConfigurationError):
        rhs_site(ground_state(small_ring), small_ring, bc=bc, dk=dk)
    with pytest.raises(ConfigurationError):
        integrate(ground_state(small_ring), small_ring, bc=bc, dk=dk)


def test_wrong_length_rejected(small_ring):
    with pytest.raises(ConfigurationError):
        rhs_site(LatticeState(np.ones(3), 0.0), small_ring)


@pytest.mark.parametrize("bc, dk", PAIRS)
def test_interaction_picture_matches_plain_integration(bc, dk):
    p = DimensionlessParams(0.6, 0.8, 0.5, 6 if bc is Boundary.PERIODIC else 7)
    psi0 = _random_state(p.n_sites, 3, bc)
    s0 = LatticeState(psi0, 0.2)

    def f(t, y):
        return rhs_site(LatticeState(y, t), p, bc=bc, dk=dk)

    ref = solve_ivp(f, (0.2, 4.0), psi0, method="DOP853", rtol=1e-12, atol=1e-13)
    traj = integrate(s0, p, bc=bc, dk=dk, cfg=IntegratorConfig(1e-11, 1e-13, sample_every=0.5),
                     tau_end=4.0)
    assert traj.tau[-1] == 4.0
    assert np.allclose(traj.final.amplitudes, ref.y[:, -1], atol=1e-7)


@pytest.mark.parametrize("bc, dk", PAIRS)
def test_norm_conserved_and_time_reversible(bc, dk):
    p = DimensionlessParams(0.4, 1.2, 1.0, 8)
    s0 = LatticeState(_random_state(8, 5, bc), 0.0)
    cfg = IntegratorConfig(1e-11, 1e-13, sample_every=0.25)
    fwd = integrate(s0, p, bc=bc, dk=dk, cfg=cfg, tau_end=6.0)
    assert np.max(np.abs(fwd.norms() - 1)) < 1e-8
    back = integrate(fwd.final, p, bc=bc, dk=dk, cfg=cfg, tau_end=0.0)
    assert np.allclose(back.final.amplitudes, s0.amplitudes, atol=1e-7)


def test_phase_space_volume_preserved_in_linear_limit():
    # linear flow is unitary: the Jacobian of the map psi0 -> psi(tau) has |det| = 1
    p = DimensionlessParams(0.5, 1.0, 0.0, 5)
    cfg = IntegratorConfig(1e-11, 1e-13, sample_every=3.0)
    cols = []
    for j in range(5):
        e = np.zeros(5, dtype=complex)
        e[j] = 1
        cols.append(integrate(LatticeState(e, 0.0), p, cfg=cfg, tau_end=3.0).final.amplitudes)
    u = np.array(cols).T
    assert abs(abs(np.linalg.det(u)) - 1) < 1e-8
    assert np.allclose(u.conj().T @ u, np.eye(5), atol=1e-8)


def test_ground_state_is_normalised(small_ring, small_chain):
    assert norm(ground_state(small_ring)) == pytest.approx(1.0)
    g = ground_state(small_chain, Boundary.ZERO)
    assert norm(g) == pytest.approx(1.0)
    assert g.amplitudes[0] == 0 and abs(g.amplitudes[-1]) < 1e-15


def test_trajectory_csv(tmp_path, small_ring):
    traj = integrate(ground_state(small_ring), small_ring,
                     cfg=IntegratorConfig(sample_every=0.5), tau_end=1.0)
    path = write_trajectory_csv(traj, tmp_path / "t.csv")
    rows = list(csv.reader(path.open()))
    n = small_ring.n_sites
    assert rows[0][:3] == ["tau", "re_psi_0", "im_psi_0"] and len(rows[0]) == 1 + 2 * n
    assert len(rows) == 1 + traj.tau.size
    assert [float(r[0]) for r in rows[1:]] == [0.0, 0.5, 1.0]


def test_bad_integrator_config():
    with pytest.raises(ConfigurationError):
        IntegratorConfig(rel_tol=0)
    with pytest.raises(ConfigurationError):
        IntegratorConfig(sample_every=-1)
