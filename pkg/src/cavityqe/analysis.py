"""Design-analysis layer: pulse shape metrics, optimization, sweeps.

Everything here consumes the closed forms or the numeric engine through
their public interfaces; root finding is plain bisection and the 1-D
maximizer is golden-section search, so no additional numerical
dependencies enter.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analytic import (
    EfficiencyBreakdown,
    efficiency,
    emission_rate_at,
)
from .engine import (
    AmplitudeTrajectory,
    HorizonError,
    IntegrationConfig,
    integrate_to_convergence,
)
from .params import (
    RegimeLabel,
    SystemParams,
    ValidationError,
    classify_regime,
    derive_rates,
)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_SWEEP_AXES = ("g0", "kappa", "gamma", "delta")


class DegeneratePulseError(ValueError):
    """Emission pulse has no usable peak (rate identically ~0)."""


@dataclass(frozen=True)
class EmissionMetrics:
    """Shape summary of the emitted single-photon pulse.

    Attributes
    ----------
    peak_time : float
        Time of the maximum output rate, ns.
    peak_rate : float
        Output rate at the peak, 1/ns.
    fwhm : float
        Full width at half maximum of the primary emission lobe, ns.
    eta_q : float
        Quantum efficiency (closed form on the analytic route, final
        accumulated output probability on the numeric route).
    multi_lobe : bool
        True when a later oscillation lobe climbs back above half of the
        primary peak, so the FWHM alone understates the pulse extent.
    regime : RegimeLabel
        Qualitative coupling/cavity classification.
    breakdown : EfficiencyBreakdown or None
        Efficiency factorization; None when the parameter set is detuned
        (the closed-form factorization does not apply there).
    """

    peak_time: float
    peak_rate: float
    fwhm: float
    eta_q: float
    multi_lobe: bool
    regime: RegimeLabel
    breakdown: EfficiencyBreakdown | None


@dataclass(frozen=True)
class OptimizationReport:
    """Outcome of the cavity-decay-rate optimization.

    ``boundary`` flags convergence onto a bracket edge (the true optimum
    likely sits outside); ``flat`` flags a degenerate objective (zero
    parasitic loss makes every cavity perfectly efficient).
    """

    kappa_star: float
    eta_q_star: float
    iterations: int
    bracket: tuple[float, float]
    boundary: bool
    flat: bool


@dataclass(frozen=True)
class SweepResult:
    """One metrics record per requested axis value, in input order.

    ``metrics[i]`` is None exactly when ``errors[i]`` carries the failure
    message for that point; failures never abort the rest of the sweep.
    ``route`` records what actually ran ("numeric" is forced for detuning
    sweeps, where the closed forms do not apply).
    """

    axis: str
    values: tuple[float, ...]
    metrics: tuple[EmissionMetrics | None, ...]
    errors: tuple[str | None, ...]
    route: str


def _bisect(f, lo: float, hi: float, xtol: float) -> float:
    """Bisection for a sign change of f on [lo, hi]; endpoints not moved."""
    f_lo = f(lo)
    for _ in range(200):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0.0) == (f_lo < 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _peak_time_closed_form(rabi: complex, total_decay: float) -> float:
    """First zero of the rate derivative: tan(rabi*t) = 2*rabi/total_decay.

    Evaluated through the complex arctangent so one expression serves the
    oscillatory and the overdamped branch; the critical limit is 2/K.
    """
    if rabi == 0.0:
        return 2.0 / total_decay
    return (cmath.atan(2.0 * rabi / total_decay) / rabi).real


def _pulse_metrics_closed_form(p: SystemParams) -> EmissionMetrics:
    d = derive_rates(p)
    total = d.total_decay
    rabi_sq = complex(d.rabi * d.rabi).real

    peak_time = _peak_time_closed_form(d.rabi, total)
    peak_rate = emission_rate_at(p, peak_time)
    if not peak_rate > 0.0:
        raise DegeneratePulseError(
            f"output rate at the nominal peak is {peak_rate!r}; no pulse to measure"
        )
    half = 0.5 * peak_rate

    def above_half(t: float) -> float:
        return emission_rate_at(p, t) - half

    # rate starts at zero, so a half crossing always exists left of the peak
    left = _bisect(above_half, 0.0, peak_time, 1e-13 * peak_time)

    if rabi_sq > 0.0:
        right_limit = math.pi / math.sqrt(rabi_sq)  # rate returns to zero here
    else:
        slow = total - 2.0 * math.sqrt(-rabi_sq)  # slowest decay exponent
        right_limit = peak_time + 2.0 / slow
        for _ in range(200):
            if above_half(right_limit) < 0.0:
                break
            right_limit = peak_time + 2.0 * (right_limit - peak_time)
    right = _bisect(above_half, peak_time, right_limit, 1e-13 * right_limit)

    multi_lobe = rabi_sq > 0.0 and math.exp(
        -total * math.pi / math.sqrt(rabi_sq)
    ) >= 0.5

    breakdown = efficiency(p)
    return EmissionMetrics(
        peak_time=peak_time,
        peak_rate=peak_rate,
        fwhm=right - left,
        eta_q=breakdown.eta_q,
        multi_lobe=multi_lobe,
        regime=classify_regime(p),
        breakdown=breakdown,
    )


def _pulse_metrics_sampled(p: SystemParams, traj: AmplitudeTrajectory) -> EmissionMetrics:
    rate = traj.emission_rate()
    times = traj.times
    i = int(np.argmax(rate))
    if not rate[i] > 0.0:
        raise DegeneratePulseError("sampled output rate never rises above zero")

    peak_time = float(times[i])
    peak_rate = float(rate[i])
    if 0 < i < rate.shape[0] - 1:
        # parabolic refinement through the three samples around the maximum
        curvature = rate[i - 1] - 2.0 * rate[i] + rate[i + 1]
        if curvature < 0.0:
            shift = 0.5 * (rate[i - 1] - rate[i + 1]) / curvature
            shift = float(np.clip(shift, -1.0, 1.0))
            peak_time = float(times[i] + shift * traj.dt)
            peak_rate = float(rate[i] - 0.25 * (rate[i - 1] - rate[i + 1]) * shift)

    half = 0.5 * peak_rate

    def cross_between(j: int, k: int) -> float:
        t0, t1 = times[j], times[k]
        r0, r1 = rate[j], rate[k]
        return float(t0 + (half - r0) * (t1 - t0) / (r1 - r0))

    j = i
    while j > 0 and rate[j - 1] >= half:
        j -= 1
    if j == 0 and rate[0] >= half:
        raise DegeneratePulseError("rate already above half maximum at t = 0")
    left = cross_between(j - 1, j)

    k = i
    last = rate.shape[0] - 1
    while k < last and rate[k + 1] >= half:
        k += 1
    if k == last:
        raise HorizonError(
            "trajectory ends above half maximum; integrate further to "
            "measure the pulse width"
        )
    right = cross_between(k, k + 1)

    multi_lobe = bool(np.any(rate[k + 1 :] >= half))

    return EmissionMetrics(
        peak_time=peak_time,
        peak_rate=peak_rate,
        fwhm=right - left,
        eta_q=float(traj.P_out[-1]),
        multi_lobe=multi_lobe,
        regime=classify_regime(p),
        breakdown=efficiency(p) if p.is_resonant() else None,
    )


def pulse_metrics(
    p: SystemParams, trajectory: AmplitudeTrajectory | None = None
) -> EmissionMetrics:
    """Peak, width, and efficiency of the emitted pulse.

    With no trajectory the resonant closed forms are used (exact peak from
    the rate derivative, bisection for the half crossings).  Passing a
    trajectory switches to sampled estimates (parabolic peak refinement,
    linear interpolation at the half crossings), which works at any
    detuning.

    Raises
    ------
    DegeneratePulseError
        If the output rate carries no measurable pulse.
    HorizonError
        If a sampled trajectory ends before falling below half maximum.
    """
    if trajectory is None:
        return _pulse_metrics_closed_form(p)
    if trajectory.params != p:
        raise ValidationError(
            "trajectory", "was integrated for a different parameter set"
        )
    return _pulse_metrics_sampled(p, trajectory)


def optimize_kappa(
    g0: float,
    gamma: float,
    bracket: tuple[float, float],
    rel_tol: float = 1e-6,
) -> OptimizationReport:
    """Golden-section maximization of eta_q over the cavity decay rate.

    Parameters
    ----------
    g0, gamma : float
        Coupling and parasitic decay rates, rad/ns.
    bracket : (float, float)
        Search interval for kappa, rad/ns, 0 < lo < hi.
    rel_tol : float
        Interval-width stop, relative to the running upper edge.

    Notes
    -----
    The objective is unimodal with its interior maximum at ``kappa = g0``,
    so golden-section converges unconditionally.  With ``gamma == 0`` the
    objective is identically 1 (flat); the report then flags ``flat`` and
    returns the geometric bracket midpoint.
    """
    if not (math.isfinite(g0) and g0 > 0.0):
        raise ValidationError("g0", f"must be a finite positive rate, got {g0!r}")
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise ValidationError("gamma", f"must be a finite rate >= 0, got {gamma!r}")
    try:
        lo, hi = (float(bracket[0]), float(bracket[1]))
    except (TypeError, IndexError, ValueError):
        raise ValidationError("bracket", f"expected (lo, hi), got {bracket!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 < lo < hi):
        raise ValidationError("bracket", f"need finite 0 < lo < hi, got {bracket!r}")
    if not (math.isfinite(rel_tol) and rel_tol > 0.0):
        raise ValidationError("rel_tol", f"must be positive, got {rel_tol!r}")

    if gamma == 0.0:
        return OptimizationReport(
            kappa_star=math.sqrt(lo * hi),
            eta_q_star=1.0,
            iterations=0,
            bracket=(lo, hi),
            boundary=False,
            flat=True,
        )

    def eta(kappa: float) -> float:
        return efficiency(SystemParams(g0=g0, kappa=kappa, gamma=gamma)).eta_q

    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = eta(c), eta(d)
    evals = 2
    while (b - a) > rel_tol * b and evals < 500:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = eta(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = eta(d)
        evals += 1
    kappa_star = 0.5 * (a + b)
    evals += 1
    width = b - a
    boundary = (kappa_star - lo) <= 2.0 * width or (hi - kappa_star) <= 2.0 * width
    return OptimizationReport(
        kappa_star=kappa_star,
        eta_q_star=eta(kappa_star),
        iterations=evals,
        bracket=(lo, hi),
        boundary=boundary,
        flat=False,
    )


def compare_law_kimble(p: SystemParams) -> EfficiencyBreakdown:
    """Cross-check record pairing eta_c with its cooperativity form.

    Exists as a named surface for validation workflows; the returned
    breakdown carries both routes (``eta_c`` and ``law_kimble``) plus the
    exact shortfall ``law_kimble_error``.
    """
    return efficiency(p)


def _sweep_point(
    base: SystemParams,
    axis: str,
    value: float,
    route: str,
    cfg: IntegrationConfig | None,
) -> tuple[EmissionMetrics | None, str | None]:
    try:
        point = replace(base, **{axis: value})
        if route == "analytic":
            return _pulse_metrics_closed_form(point), None
        traj = integrate_to_convergence(point, cfg)
        return _pulse_metrics_sampled(point, traj), None
    except (ValueError, RuntimeError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def sweep(
    base: SystemParams,
    axis: str,
    values,
    route: str = "analytic",
    cfg: IntegrationConfig | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Evaluate pulse metrics along one parameter axis.

    Parameters
    ----------
    base : SystemParams
        Parameters held fixed off the swept axis.
    axis : str
        One of ``g0``, ``kappa``, ``gamma``, ``delta``.
    values : sequence of float
        Axis values in rad/ns, strictly monotone.  May be empty.
    route : str
        ``analytic`` (resonant closed forms) or ``numeric`` (engine).
        Detuning sweeps always run numerically.
    cfg : IntegrationConfig, optional
        Forwarded to the engine on the numeric route.
    workers : int, optional
        Thread count for parallel evaluation; results keep input order.

    Per-point failures (invalid value, ledger violation, ...) are recorded
    in ``errors`` and leave the other points untouched.
    """
    if axis not in _SWEEP_AXES:
        raise ValidationError("axis", f"must be one of {_SWEEP_AXES}, got {axis!r}")
    if route not in ("analytic", "numeric"):
        raise ValidationError("route", f"must be 'analytic' or 'numeric', got {route!r}")
    vals = [float(v) for v in values]
    if len(vals) >= 2:
        diffs = np.diff(vals)
        if not (np.all(diffs > 0.0) or np.all(diffs < 0.0)):
            raise ValidationError("values", "axis values must be strictly monotone")
    effective_route = "numeric" if axis == "delta" else route
    if effective_route == "analytic" and not base.is_resonant():
        raise ValidationError(
            "route",
            "analytic route requires resonance (delta = 0); use route='numeric'",
        )

    if not vals:
        return SweepResult(axis=axis, values=(), metrics=(), errors=(), route=effective_route)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(
                    lambda v: _sweep_point(base, axis, v, effective_route, cfg), vals
                )
            )
    else:
        outcomes = [_sweep_point(base, axis, v, effective_route, cfg) for v in vals]

    return SweepResult(
        axis=axis,
        values=tuple(vals),
        metrics=tuple(m for m, _ in outcomes),
        errors=tuple(e for _, e in outcomes),
        route=effective_route,
    )
