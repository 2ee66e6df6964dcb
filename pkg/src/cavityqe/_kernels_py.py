"""Pure-Python reference kernels.

Drop-in twins of the compiled extension: same signatures, same operation
order, so results agree to rounding.  Selected by ``_backend`` when the
extension is unavailable or explicitly disabled.
"""

from __future__ import annotations

from math import cos, sin

import numpy as np


def rk4_trajectory(
    g0: float,
    kappa: float,
    gamma: float,
    delta: float,
    dt: float,
    n_steps: int,
    e0: complex,
    c0: complex,
    p_out0: float,
    p_spont0: float,
    t0: float,
    e_arr: np.ndarray,
    c_arr: np.ndarray,
    po_arr: np.ndarray,
    ps_arr: np.ndarray,
) -> None:
    """Classical RK4 on the coupled amplitude equations, filling node arrays.

    State per node: emitter amplitude E, cavity amplitude C, and the two
    accumulated channel probabilities P_out, P_spont.  The probabilities are
    integrated as extra state variables from the stage rates 2*kappa*|C|**2
    and 2*gamma*|E|**2, which for pure quadrature reduces to Simpson's rule
    on the stage values.  The rotating phase exp(+/- i*delta*t) is evaluated
    at the exact stage times.  Arrays must have length ``n_steps + 1``; node
    0 receives the initial state.
    """
    e = complex(e0)
    c = complex(c0)
    po = float(p_out0)
    ps = float(p_spont0)
    e_arr[0] = e
    c_arr[0] = c
    po_arr[0] = po
    ps_arr[0] = ps

    mig = complex(0.0, -g0)
    two_kappa = 2.0 * kappa
    two_gamma = 2.0 * gamma
    half = 0.5 * dt
    sixth = dt / 6.0
    resonant = delta == 0.0
    one = complex(1.0, 0.0)

    for i in range(n_steps):
        t = t0 + i * dt
        if resonant:
            p1 = p2 = p4 = one
            q1 = q2 = q4 = one
        else:
            a = delta * t
            p1 = complex(cos(a), sin(a))
            q1 = p1.conjugate()
            a = delta * (t + half)
            p2 = complex(cos(a), sin(a))
            q2 = p2.conjugate()
            a = delta * (t + dt)
            p4 = complex(cos(a), sin(a))
            q4 = p4.conjugate()

        de1 = mig * (p1 * c) - gamma * e
        dc1 = mig * (q1 * e) - kappa * c
        po1 = two_kappa * (c.real * c.real + c.imag * c.imag)
        ps1 = two_gamma * (e.real * e.real + e.imag * e.imag)

        e2 = e + half * de1
        c2 = c + half * dc1
        de2 = mig * (p2 * c2) - gamma * e2
        dc2 = mig * (q2 * e2) - kappa * c2
        po2 = two_kappa * (c2.real * c2.real + c2.imag * c2.imag)
        ps2 = two_gamma * (e2.real * e2.real + e2.imag * e2.imag)

        e3 = e + half * de2
        c3 = c + half * dc2
        de3 = mig * (p2 * c3) - gamma * e3
        dc3 = mig * (q2 * e3) - kappa * c3
        po3 = two_kappa * (c3.real * c3.real + c3.imag * c3.imag)
        ps3 = two_gamma * (e3.real * e3.real + e3.imag * e3.imag)

        e4 = e + dt * de3
        c4 = c + dt * dc3
        de4 = mig * (p4 * c4) - gamma * e4
        dc4 = mig * (q4 * e4) - kappa * c4
        po4 = two_kappa * (c4.real * c4.real + c4.imag * c4.imag)
        ps4 = two_gamma * (e4.real * e4.real + e4.imag * e4.imag)

        e = e + sixth * (de1 + 2.0 * (de2 + de3) + de4)
        c = c + sixth * (dc1 + 2.0 * (dc2 + dc3) + dc4)
        po = po + sixth * (po1 + 2.0 * (po2 + po3) + po4)
        ps = ps + sixth * (ps1 + 2.0 * (ps2 + ps3) + ps4)

        e_arr[i + 1] = e
        c_arr[i + 1] = c
        po_arr[i + 1] = po
        ps_arr[i + 1] = ps


def fourier_trapezoid(
    c_vals: np.ndarray,
    dt: float,
    deltas: np.ndarray,
    out: np.ndarray,
) -> None:
    """Trapezoid-weighted Fourier transform of a sampled amplitude.

    Computes ``out[j] = dt * sum_k' c_vals[k] * exp(1j*deltas[j]*k*dt)``
    with half weights on the end samples.  Chunked over the detuning axis
    to bound the temporary phase matrix near 32 MB.
    """
    n = c_vals.shape[0]
    if n == 0:
        out[:] = 0.0
        return
    if n == 1:
        out[:] = 0.0  # single sample has zero trapezoid measure
        return
    times = np.arange(n, dtype=np.float64) * dt
    chunk = max(1, int(2_000_000 // n))
    for start in range(0, deltas.shape[0], chunk):
        d = deltas[start : start + chunk]
        phases = np.exp(1j * np.outer(d, times))
        acc = phases @ c_vals
        acc -= 0.5 * (c_vals[0] + phases[:, -1] * c_vals[-1])
        out[start : start + d.shape[0]] = dt * acc
