"""Adaptive Dormand-Prince 5(4) integrator with PI step control and dense output.

Works on complex state vectors. The continuous extension is the standard
4th-order Dormand-Prince interpolant, so samples can be taken on any grid
independently of the internal steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["StiffnessError", "Solution", "dopri5"]


class StiffnessError(RuntimeError):
    """Step size collapsed below the representable resolution."""

    def __init__(self, tau: float, message: str = "step size underflow"):
        super().__init__(f"{message} at tau={tau:.10g}")
        self.tau = tau


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, :1] = [1 / 5]
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
_B = _A[6].copy()
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                    -92097 / 339200, 187 / 2100, 1 / 40])
# dense output coefficients (Hairer & Wanner, DOPRI5 contd5)
_D = np.array([-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
               -10690763975 / 1880347072, 701980252875 / 199316789632,
               -1453857185 / 822651844, 69997945 / 29380423])

_SAFETY = 0.9
_BETA = 0.04  # PI controller memory
_EXPO = 0.2 - 0.75 * _BETA
_FAC_MIN, _FAC_MAX = 0.2, 10.0


@dataclass
class Solution:
    t: np.ndarray  # (n_samples,)
    y: np.ndarray  # (n_samples, n)
    n_steps: int
    n_rejected: int


def _initial_step(rhs, t0, y0, f0, direction, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = rhs(t0 + direction * h0, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def dopri5(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t0: float,
    t1: float,
    sample_times: Sequence[float] | None = None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    max_step: float = np.inf,
    first_step: float | None = None,
    max_steps: int = 50_000_000,
    callback: Callable[[float, np.ndarray], None] | None = None,
) -> Solution:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1`` (either direction).

    ``sample_times`` must lie within ``[t0, t1]`` and be ordered in the
    direction of integration; by default only the endpoints are returned.
    ``callback(t, y)`` is invoked after every accepted step.
    """
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    if t1 == t0:
        return Solution(np.array([t0]), y[None, :].copy(), 0, 0)
    direction = 1.0 if t1 > t0 else -1.0
    if sample_times is None:
        samples = np.array([t0, t1], dtype=float)
    else:
        samples = np.asarray(sample_times, dtype=float)
    if samples.size and np.any(np.diff(samples) * direction < 0):
        raise ValueError("sample_times must be ordered along the integration direction")
    span_lo, span_hi = min(t0, t1), max(t0, t1)
    if samples.size and (samples.min() < span_lo - 1e-12 * abs(span_hi)
                         or samples.max() > span_hi + 1e-12 * abs(span_hi)):
        raise ValueError("sample_times outside the integration interval")

    out = np.empty((samples.size, y.size), dtype=y.dtype)
    i_out = 0
    while i_out < samples.size and samples[i_out] == t0:
        out[i_out] = y
        i_out += 1

    t = float(t0)
    f = np.asarray(rhs(t, y))
    K = np.empty((7, y.size), dtype=np.result_type(y, f))
    K[0] = f
    h = first_step if first_step is not None else _initial_step(rhs, t, y, f, direction, rtol, atol)
    h = min(abs(h), max_step, abs(t1 - t0))
    err_old = 1e-4
    n_steps = n_rejected = 0
    reject_last = False

    while direction * (t1 - t) > 0:
        if n_steps + n_rejected >= max_steps:
            raise StiffnessError(t, "maximum number of steps exceeded")
        if h < 1e-14 * max(1.0, abs(t)):
            raise StiffnessError(t)
        if h >= abs(t1 - t) * (1 - 1e-12):
            h = abs(t1 - t)
            last = True
        else:
            last = False
        hs = direction * h
        for s in range(1, 6):
            K[s] = rhs(t + _C[s] * hs, y + hs * (_A[s, :s] @ K[:s]))
        y_new = y + hs * (_B[:6] @ K[:6])
        K[6] = rhs(t + hs, y_new)  # FSAL
        err_vec = hs * (_E @ K)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean(np.abs(err_vec / scale) ** 2))

        if err <= 1.0 or h <= 1e-14 * max(1.0, abs(t)):
            t_new = t1 if last else t + hs
            # dense output for samples in (t, t_new]
            if i_out < samples.size and direction * (samples[i_out] - t_new) <= 0:
                ydiff = y_new - y
                bspl = hs * K[0] - ydiff
                r4 = hs * (_D @ K)
                r3 = ydiff - hs * K[6] - bspl
                while i_out < samples.size and direction * (samples[i_out] - t_new) <= 0:
                    theta = (samples[i_out] - t) / hs
                    th1 = 1.0 - theta
                    out[i_out] = y + theta * (ydiff + th1 * (bspl + theta * (r3 + th1 * r4)))
                    i_out += 1
            t, y = t_new, y_new
            K[0] = K[6]
            n_steps += 1
            if callback is not None:
                callback(t, y)
            fac = err ** _EXPO / err_old ** _BETA if err > 0 else 1.0 / _FAC_MAX
            fac = min(1.0 / _FAC_MIN, max(1.0 / _FAC_MAX, fac / _SAFETY))
            h_next = h / fac
            if reject_last:
                h_next = min(h_next, h)
            err_old = max(err, 1e-4)
            reject_last = False
            h = min(h_next, max_step)
        else:
            n_rejected += 1
            reject_last = True
            h = h / min(1.0 / _FAC_MIN, err ** _EXPO / _SAFETY)

    while i_out < samples.size:  # rounding at the endpoint
        out[i_out] = y
        i_out += 1
    return Solution(samples, out, n_steps, n_rejected)
