"""Shared fixtures and the independent integration reference."""

import numpy as np
import pytest

import cavityqe as cq


@pytest.fixture
def baseline() -> cq.SystemParams:
    """The design exercised throughout: 8 / 8 / 0.16 GHz on resonance."""
    return cq.SystemParams.from_ghz(8.0, 8.0, 0.16)


def reference_amplitudes(p: cq.SystemParams, times, rtol=1e-11):
    """High-accuracy adaptive-integrator solution, independent of the engine.

    Solves the same coupled amplitude equations with scipy's DOP853 at
    tight tolerance and returns (E, C) sampled on ``times``.
    """
    from scipy.integrate import solve_ivp

    def rhs(t, y):
        e = y[0] + 1j * y[1]
        c = y[2] + 1j * y[3]
        phase = np.exp(1j * p.delta * t)
        de = -1j * p.g0 * phase * c - p.gamma * e
        dc = -1j * p.g0 * np.conj(phase) * e - p.kappa * c
        return [de.real, de.imag, dc.real, dc.imag]

    sol = solve_ivp(
        rhs,
        (0.0, float(times[-1])),
        [1.0, 0.0, 0.0, 0.0],
        t_eval=np.asarray(times, dtype=float),
        method="DOP853",
        rtol=rtol,
        atol=1e-13,
    )
    assert sol.success, sol.message
    return sol.y[0] + 1j * sol.y[1], sol.y[2] + 1j * sol.y[3]
