import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from chirpdnls.integrate import StiffnessError, dopri5


def _random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_linear_complex_system_matches_matrix_exponential():
    rng = np.random.default_rng(4)
    h = _random_hermitian(rng, 5)
    y0 = rng.normal(size=5) + 1j * rng.normal(size=5)
    times = np.linspace(0, 3, 13)
    sol = dopri5(lambda t, y: -1j * h @ y, y0, 0.0, 3.0, sample_times=times, rtol=1e-11, atol=1e-13)
    for t, y in zip(times, sol.y):
        assert np.allclose(y, expm(-1j * h * t) @ y0, atol=1e-8)


def test_time_dependent_system_matches_scipy():
    def rhs(t, y):
        return np.array([y[1], -(1 + 0.3 * np.sin(2 * t)) * y[0] - 0.1 * y[1] ** 3])

    ref = solve_ivp(rhs, (0, 20), [1.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-14,
                    t_eval=[5.0, 12.5, 20.0])
    sol = dopri5(rhs, np.array([1.0, 0.0]), 0.0, 20.0, sample_times=[5.0, 12.5, 20.0],
                 rtol=1e-11, atol=1e-13)
    assert np.allclose(sol.y, ref.y.T, atol=1e-8)


def test_backward_integration_retraces():
    rhs = lambda t, y: 1j * np.array([t * y[0] + 0.5 * y[1], 0.5 * y[0] - t * y[1]])  # noqa: E731
    y0 = np.array([1.0 + 0j, 0.0])
    fwd = dopri5(rhs, y0, 0.0, 4.0, rtol=1e-12, atol=1e-14)
    back = dopri5(rhs, fwd.y[-1], 4.0, 0.0, rtol=1e-12, atol=1e-14)
    assert np.allclose(back.y[-1], y0, atol=1e-8)


@given(omega=st.floats(0.1, 20), t1=st.floats(0.5, 10))
def test_dense_output_on_harmonic_oscillator(omega, t1):
    times = np.linspace(0, t1, 17)
    sol = dopri5(lambda t, y: np.array([y[1], -omega**2 * y[0]]), np.array([1.0, 0.0]),
                 0.0, t1, sample_times=times, rtol=1e-10, atol=1e-12)
    assert np.allclose(sol.y[:, 0], np.cos(omega * times), atol=1e-6)


def test_step_size_collapse_raises():
    with pytest.raises(StiffnessError) as info:
        dopri5(lambda t, y: y * y, np.array([1.0]), 0.0, 2.0)
    assert info.value.tau == pytest.approx(1.0, abs=1e-3)


def test_max_steps_raises():
    with pytest.raises(StiffnessError):
        dopri5(lambda t, y: -1j * 100 * y, np.array([1.0 + 0j]), 0.0, 100.0, max_steps=50)


def test_sample_validation():
    f = lambda t, y: -y  # noqa: E731
    with pytest.raises(ValueError):
        dopri5(f, np.array([1.0]), 0.0, 1.0, sample_times=[0.5, 0.2])
    with pytest.raises(ValueError):
        dopri5(f, np.array([1.0]), 0.0, 1.0, sample_times=[0.5, 2.0])


def test_empty_interval():
    sol = dopri5(lambda t, y: -y, np.array([2.0]), 1.0, 1.0)
    assert sol.y.shape == (1, 1) and sol.n_steps == 0


def test_max_step_is_respected():
    seen = []
    dopri5(lambda t, y: -y, np.array([1.0]), 0.0, 1.0, max_step=0.01,
           callback=lambda t, y: seen.append(t))
    assert np.max(np.diff([0.0] + seen)) <= 0.01 + 1e-15
    assert len(seen) >= 100


def test_callback_sees_every_step():
    count = []
    sol = dopri5(lambda t, y: np.cos(t) * y, np.array([1.0]), 0.0, 5.0,
                 callback=lambda t, y: count.append(t))
    assert len(count) == sol.n_steps
    assert sol.y[-1, 0] == pytest.approx(math.exp(math.sin(5.0)), rel=1e-7)
