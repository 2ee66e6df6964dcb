"""Closed-form resonant dynamics, efficiencies, and the emission spectrum.

Everything here is exact on resonance (zero emitter-cavity detuning) and
refuses detuned parameter sets; the numeric engine handles those.  The
damped oscillation is evaluated through two primitives that are even in the
oscillation rate, so a single code path covers the underdamped, critically
damped, and overdamped branches with no special-casing and no overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import (
    DerivedRates,
    SpectrumGrid,
    SystemParams,
    ValidationError,
    as_detuning_grid,
    derive_rates,
)

# below |rabi * t| = 1e-4 the sin(x)/x factor switches to its series in x**2;
# the x**4/120 term bounds the truncation error near 1e-26 relative
_TAYLOR_CUT = 1e-4


class ResonanceRequiredError(ValueError):
    """Closed-form route called with a detuned parameter set."""

    def __init__(self):
        super().__init__(
            "closed forms hold on resonance only (delta = 0); "
            "use the numeric engine for detuned parameters"
        )


def _require_resonant(p: SystemParams) -> None:
    if not p.is_resonant():
        raise ResonanceRequiredError()


def _require_times(t) -> np.ndarray:
    times = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if not np.all(np.isfinite(times)) or np.any(times < 0.0):
        raise ValidationError("t", "times must be finite and >= 0")
    return times


def _env_cos(a: float, g: complex, t: np.ndarray) -> np.ndarray:
    """exp(-a*t) * cos(g*t) for complex g, without overflow.

    Written as the mean of two decaying exponentials; both exponents have
    non-positive real part whenever |Im g| <= a, which holds on every call
    path (the oscillation rate never beats the envelope it came from).
    """
    zp = (1j * g - a) * t
    zm = (-1j * g - a) * t
    return (0.5 * (np.exp(zp) + np.exp(zm))).real


def _env_sinc(a: float, g: complex, t: np.ndarray) -> np.ndarray:
    """exp(-a*t) * sin(g*t)/g for complex g; series below the Taylor cut.

    The two-exponential difference quotient is exact but loses all digits
    as g*t -> 0, so small arguments use the x**2 series instead.  Both
    expressions are even in g: the two damping branches join smoothly.
    """
    out = np.empty(t.shape, dtype=np.float64)
    small = np.abs(g) * np.abs(t) < _TAYLOR_CUT
    if small.any():
        ts = t[small]
        w = complex(g * g).real * ts * ts
        out[small] = np.exp(-a * ts) * ts * (1.0 - w / 6.0 + w * w / 120.0)
    big = ~small
    if big.any():
        tb = t[big]
        zp = (1j * g - a) * tb
        zm = (-1j * g - a) * tb
        out[big] = ((np.exp(zp) - np.exp(zm)) / (2j * g)).real
    return out


@dataclass(frozen=True)
class AmplitudePair:
    """Joint state amplitudes at one instant: emitter E, cavity field C."""

    E: complex
    C: complex

    def norm(self) -> float:
        """Remaining excitation probability |E|**2 + |C|**2."""
        return abs(self.E) ** 2 + abs(self.C) ** 2


@dataclass(frozen=True)
class EfficiencyBreakdown:
    """Quantum efficiency and its exact two-factor decomposition.

    Attributes
    ----------
    eta_q : float
        Probability that the excitation leaves through the cavity output.
    eta_c : float
        Channeling factor ``g0**2 / (g0**2 + kappa*gamma)``: the branching
        of the raw emission into the cavity mode.
    eta_extr : float
        Extraction factor ``kappa / (kappa + gamma)``: the escape odds of a
        photon already in the cavity.
    law_kimble : float
        The channeling factor recomputed from the cooperativity as
        ``2*C0 / (2*C0 + 1)``; equals ``eta_c`` up to rounding and exists
        as an independent cross-check.
    law_kimble_error : float
        Exact shortfall ``eta_c - eta_q``, evaluated in the cancellation-free
        product form ``eta_c * gamma / (kappa + gamma)``.
    """

    eta_q: float
    eta_c: float
    eta_extr: float
    law_kimble: float
    law_kimble_error: float


@dataclass(frozen=True)
class PurcellBreakdown:
    """Efficiency reassembled from Purcell-enhancement quantities.

    ``beta = purcell_factor / (purcell_factor + loss_ratio)`` and
    ``eta_q = beta * kappa / (kappa + gamma)``; algebraically identical to
    :func:`efficiency`, computed through the free-space decay instead.
    """

    purcell_factor: float
    loss_ratio: float
    beta: float
    eta_q: float


def amplitudes_on_grid(p: SystemParams, times) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form E(t), C(t) arrays for a resonant parameter set.

    Parameters
    ----------
    p : SystemParams
        Must be resonant (``delta = 0``).
    times : array_like
        Times in ns, each finite and >= 0.

    Returns
    -------
    (E, C) : pair of complex ndarrays
        Emitter and cavity amplitudes for the initial state E=1, C=0.
    """
    _require_resonant(p)
    t = _require_times(times)
    d = derive_rates(p)
    half_total = 0.5 * d.total_decay
    cos_part = _env_cos(half_total, d.rabi, t)
    sinc_part = _env_sinc(half_total, d.rabi, t)
    e_vals = (cos_part + 0.5 * d.decay_imbalance * sinc_part).astype(np.complex128)
    c_vals = (-1j * p.g0) * sinc_part
    return e_vals, c_vals


def amplitudes_at(p: SystemParams, t: float) -> AmplitudePair:
    """Closed-form amplitudes at one time (resonant only)."""
    e_vals, c_vals = amplitudes_on_grid(p, [t])
    return AmplitudePair(E=complex(e_vals[0]), C=complex(c_vals[0]))


def emission_rate_at(p: SystemParams, t: float) -> float:
    """Instantaneous output-channel photon rate 2*kappa*|C(t)|**2, 1/ns."""
    _require_resonant(p)
    times = _require_times([t])
    d = derive_rates(p)
    sinc_part = _env_sinc(0.5 * d.total_decay, d.rabi, times)
    return float(2.0 * p.kappa * (p.g0 * sinc_part[0]) ** 2)


def emission_probability_at(p: SystemParams, t: float) -> float:
    """Probability emitted into the output channel by time t (resonant).

    Monotone from 0 at t=0 to eta_q as t -> inf.
    """
    _require_resonant(p)
    times = _require_times([t])
    d = derive_rates(p)
    total = d.total_decay
    sinc_g = _env_sinc(0.5 * total, d.rabi, times)[0]
    sinc_2g = _env_sinc(total, 2.0 * d.rabi, times)[0]
    decayed = math.exp(-total * times[0])
    bracket = decayed + 0.5 * total * total * sinc_g * sinc_g + total * sinc_2g
    return efficiency(p).eta_q * (1.0 - bracket)


def efficiency(p: SystemParams) -> EfficiencyBreakdown:
    """Quantum efficiency of the source with its exact factorization.

    Resonant only.  ``eta_q = eta_c * eta_extr`` holds to rounding; the
    cooperativity route ``law_kimble`` reproduces ``eta_c`` independently.
    """
    _require_resonant(p)
    g0sq = p.g0 * p.g0
    loss = p.kappa * p.gamma  # can underflow to 0.0 or make g0sq/loss overflow
    eta_c = g0sq / (g0sq + loss)
    eta_extr = p.kappa / (p.kappa + p.gamma)
    if loss == 0.0:
        law_kimble = 1.0
    else:
        two_c0 = g0sq / loss
        law_kimble = 1.0 if math.isinf(two_c0) else two_c0 / (two_c0 + 1.0)
    return EfficiencyBreakdown(
        eta_q=eta_c * eta_extr,
        eta_c=eta_c,
        eta_extr=eta_extr,
        law_kimble=law_kimble,
        law_kimble_error=eta_c * p.gamma / (p.kappa + p.gamma),
    )


def efficiency_via_purcell(p: SystemParams) -> PurcellBreakdown:
    """Efficiency through Purcell factor and normalized parasitic loss.

    Requires ``gamma0``.  The spontaneous-emission coupling fraction
    ``beta`` times the extraction factor reproduces ``eta_q`` exactly; the
    free-space rate cancels, so the result is independent of ``gamma0``.
    """
    _require_resonant(p)
    if p.gamma0 is None:
        raise ValidationError(
            "gamma0", "Purcell decomposition requires the free-space decay rate"
        )
    purcell = p.g0 * p.g0 / (p.kappa * p.gamma0)
    loss_ratio = p.gamma / p.gamma0
    beta = purcell / (purcell + loss_ratio)
    return PurcellBreakdown(
        purcell_factor=purcell,
        loss_ratio=loss_ratio,
        beta=beta,
        eta_q=beta * p.kappa / (p.kappa + p.gamma),
    )


def output_spectrum_analytic(p: SystemParams, deltas) -> SpectrumGrid:
    """Closed-form spectral density of the emitted photon (resonant).

    Parameters
    ----------
    p : SystemParams
        Must be resonant.
    deltas : array_like
        Detuning axis in rad/ns, strictly increasing.

    Returns
    -------
    SpectrumGrid
        Density in probability per rad/ns; integrates to ``eta_q`` over
        the full axis.
    """
    _require_resonant(p)
    grid = as_detuning_grid(deltas)
    d = derive_rates(p)
    rabi_sq = complex(d.rabi * d.rabi).real
    z = (0.5 * d.total_decay - 1j * grid) ** 2 + rabi_sq
    density = (p.kappa * p.g0 * p.g0 / math.pi) / (z.real**2 + z.imag**2)
    return SpectrumGrid(deltas=grid, density=density)


def spectrum_peak_offsets(d: DerivedRates) -> tuple[float, float]:
    """Exact detunings of the spectral maxima for derived rates ``d``.

    The two Lorentzian-like factors overlap, so the maxima sit at
    ``+/- sqrt(rabi**2 - total_decay**2/4)`` when that is real, pulled
    inward from the bare oscillation rate; otherwise the spectrum is a
    single line centered at zero.
    """
    shift_sq = complex(d.rabi * d.rabi).real - 0.25 * d.total_decay * d.total_decay
    if shift_sq <= 0.0:
        return (0.0, 0.0)
    shift = math.sqrt(shift_sq)
    return (-shift, shift)
