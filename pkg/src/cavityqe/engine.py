"""Fixed-step numeric integration of the amplitude equations of motion.

Fully independent of the closed-form module: everything here comes from
classical RK4 on the coupled emitter/cavity amplitudes, with the two
channel probabilities accumulated as extra state variables from the stage
rates (for pure quadrature that reduces to Simpson's rule, so the running
probability ledger is Simpson-consistent on the step grid).  Works at any
detuning; the rotating phase is evaluated at exact stage times.

Probability ledger
------------------
Every node must satisfy |E|**2 + |C|**2 + P_spont + P_out = 1 up to
integration error.  A residual above ``LEDGER_ABORT`` aborts the run via
:class:`LedgerError`; the worst residual is recorded on the trajectory.

Horizon policy
--------------
The excitation norm |E|**2 + |C|**2 at the final node exactly bounds the
emission probability still outstanding, so it doubles as a tail bound.
Converged quantities (total efficiency, spectra) require the decay-rate
horizon ``(kappa+gamma)*t >= MIN_HORIZON_DECAY`` and a tail below
``TAIL_TOL``; integration is auto-extended in geometrically growing
segments until the bound is met, unless extension is disabled.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._backend import BACKEND, fourier_trapezoid, rk4_trajectory
from .params import (
    SpectrumGrid,
    SystemParams,
    ValidationError,
    as_detuning_grid,
)

# default-step policy: resolve the fastest rate, keep 50 steps per its period
DT_CAP_NS = 1e-3
DT_FRACTION = 0.02
# coarser than this many radians of the fastest rate per step is suspect
DT_WARN_FRACTION = 0.2
# default integration horizon in units of 1/(kappa+gamma)
HORIZON_DECAY_DEFAULT = 45.0
# converged quantities demand at least this decay exponent
MIN_HORIZON_DECAY = 40.0
# remaining-emission bound accepted as converged
TAIL_TOL = 1e-9
LEDGER_ABORT = 1e-6
# runaway-extension guard
MAX_TOTAL_STEPS = 60_000_000


class LedgerError(RuntimeError):
    """Probability ledger violated beyond the abort threshold."""

    def __init__(self, node_index: int, time: float, residual: float):
        super().__init__(
            f"probability ledger violated at node {node_index} "
            f"(t = {time:.6g} ns): residual {residual:.3e} exceeds "
            f"{LEDGER_ABORT:.0e}; reduce dt"
        )
        self.node_index = node_index
        self.time = time
        self.residual = residual


class HorizonError(RuntimeError):
    """Integration horizon too short for a converged quantity."""


@dataclass(frozen=True)
class IntegrationConfig:
    """Knobs for the fixed-step integrator.

    Attributes
    ----------
    t_max : float or None
        Horizon in ns; None picks ``HORIZON_DECAY_DEFAULT / (kappa+gamma)``.
    dt : float or None
        Step in ns; None picks ``min(DT_CAP_NS, DT_FRACTION/fastest_rate)``.
    method : str
        Only ``"rk4-fixed"`` exists.
    tail_extension : float or None
        Initial auto-extension chunk in units of ``1/(kappa+gamma)`` used
        when a converged quantity needs more horizon; None disables
        extension so short horizons raise :class:`HorizonError` instead.
    """

    t_max: float | None = None
    dt: float | None = None
    method: str = "rk4-fixed"
    tail_extension: float | None = 5.0


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    """Integrated history on a uniform time grid (arrays are read-only).

    ``times[0] == 0`` and node spacing is exactly ``dt``.  ``P_out`` and
    ``P_spont`` are cumulative emission probabilities into the output
    channel and the parasitic reservoir.
    """

    params: SystemParams
    times: np.ndarray
    E: np.ndarray
    C: np.ndarray
    P_out: np.ndarray
    P_spont: np.ndarray
    backend: str
    max_ledger_residual: float

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def excitation_norm(self) -> np.ndarray:
        """|E|**2 + |C|**2 per node: probability still inside the system."""
        return np.abs(self.E) ** 2 + np.abs(self.C) ** 2

    def emission_rate(self) -> np.ndarray:
        """Instantaneous output-channel rate 2*kappa*|C|**2 per node."""
        return 2.0 * self.params.kappa * np.abs(self.C) ** 2

    def ledger_residuals(self) -> np.ndarray:
        """Per-node deviation of the probability ledger from 1."""
        return self.excitation_norm() + self.P_out + self.P_spont - 1.0

    def tail_bound(self) -> float:
        """Upper bound on emission probability beyond the final node."""
        return float(self.excitation_norm()[-1])


def default_dt(p: SystemParams) -> float:
    """Step from the fastest rate in the problem, capped at DT_CAP_NS."""
    fastest = max(p.kappa + p.gamma, p.g0, abs(p.delta))
    return min(DT_CAP_NS, DT_FRACTION / fastest)


def default_t_max(p: SystemParams) -> float:
    """Horizon covering HORIZON_DECAY_DEFAULT decay exponents."""
    return HORIZON_DECAY_DEFAULT / (p.kappa + p.gamma)


def _resolve_grid(p: SystemParams, cfg: IntegrationConfig) -> tuple[float, float]:
    if cfg.method != "rk4-fixed":
        raise ValidationError("method", f"unknown integrator {cfg.method!r}")
    dt = default_dt(p) if cfg.dt is None else cfg.dt
    if not (isinstance(dt, (int, float)) and math.isfinite(dt)) or dt <= 0.0:
        raise ValidationError("dt", f"must be a finite positive step, got {dt!r}")
    t_max = default_t_max(p) if cfg.t_max is None else cfg.t_max
    if not (isinstance(t_max, (int, float)) and math.isfinite(t_max)) or t_max <= 0.0:
        raise ValidationError("t_max", f"must be a finite positive horizon, got {t_max!r}")
    if cfg.tail_extension is not None and not cfg.tail_extension > 0.0:
        raise ValidationError(
            "tail_extension", f"must be positive or None, got {cfg.tail_extension!r}"
        )
    fastest = max(p.kappa + p.gamma, p.g0, abs(p.delta))
    if dt * fastest > DT_WARN_FRACTION:
        warnings.warn(
            f"dt = {dt:.3g} ns resolves the fastest rate "
            f"{fastest:.3g} rad/ns with only {1.0 / (dt * fastest):.2f} "
            "steps per radian; results may be inaccurate",
            stacklevel=3,
        )
    return float(dt), float(t_max)


def _steps_for(span: float, dt: float) -> int:
    return max(1, int(math.ceil(span / dt - 1e-9)))


def _validate_initial_amplitude(e0: complex) -> complex:
    e0 = complex(e0)
    if not (math.isfinite(e0.real) and math.isfinite(e0.imag)):
        raise ValidationError("e0", "initial amplitude must be finite")
    if abs(abs(e0) - 1.0) > 1e-9:
        raise ValidationError(
            "e0", f"initial amplitude must lie on the unit circle, got |e0| = {abs(e0)!r}"
        )
    return e0


def _segment(p, dt, n_steps, e0, c0, po0, ps0, t0):
    e_arr = np.empty(n_steps + 1, dtype=np.complex128)
    c_arr = np.empty(n_steps + 1, dtype=np.complex128)
    po_arr = np.empty(n_steps + 1, dtype=np.float64)
    ps_arr = np.empty(n_steps + 1, dtype=np.float64)
    rk4_trajectory(
        p.g0, p.kappa, p.gamma, p.delta, dt, n_steps,
        e0, c0, po0, ps0, t0,
        e_arr, c_arr, po_arr, ps_arr,
    )
    return e_arr, c_arr, po_arr, ps_arr


def _build_trajectory(p, dt, e_arr, c_arr, po_arr, ps_arr) -> AmplitudeTrajectory:
    times = np.arange(e_arr.shape[0], dtype=np.float64) * dt
    residuals = (
        e_arr.real**2 + e_arr.imag**2 + c_arr.real**2 + c_arr.imag**2
        + po_arr + ps_arr - 1.0
    )
    worst = int(np.argmax(np.abs(residuals)))
    if abs(residuals[worst]) > LEDGER_ABORT:
        raise LedgerError(worst, float(times[worst]), float(residuals[worst]))
    for arr in (times, e_arr, c_arr, po_arr, ps_arr):
        arr.setflags(write=False)
    return AmplitudeTrajectory(
        params=p,
        times=times,
        E=e_arr,
        C=c_arr,
        P_out=po_arr,
        P_spont=ps_arr,
        backend=BACKEND,
        max_ledger_residual=float(abs(residuals[worst])),
    )


def integrate(
    p: SystemParams,
    cfg: IntegrationConfig | None = None,
    e0: complex = 1.0 + 0.0j,
) -> AmplitudeTrajectory:
    """Integrate from the excited emitter (E = e0, C = 0) over one horizon.

    Parameters
    ----------
    p : SystemParams
        Any detuning; the engine does not require resonance.
    cfg : IntegrationConfig, optional
        Unset horizon and step fall back to the rate-based defaults.
    e0 : complex
        Initial emitter amplitude; must have unit magnitude (physics fixes
        the norm, only the phase is free).

    Returns
    -------
    AmplitudeTrajectory
        Node history; raises :class:`LedgerError` if the probability ledger
        drifts beyond ``LEDGER_ABORT`` anywhere.
    """
    cfg = cfg or IntegrationConfig()
    dt, t_max = _resolve_grid(p, cfg)
    e0 = _validate_initial_amplitude(e0)
    n_steps = _steps_for(t_max, dt)
    arrays = _segment(p, dt, n_steps, e0, 0.0j, 0.0, 0.0, 0.0)
    return _build_trajectory(p, dt, *arrays)


def integrate_to_convergence(
    p: SystemParams,
    cfg: IntegrationConfig | None = None,
    e0: complex = 1.0 + 0.0j,
) -> AmplitudeTrajectory:
    """Integrate until the remaining-emission bound drops below TAIL_TOL.

    Starts from the configured (or default) horizon, first enforcing the
    minimum decay exponent ``MIN_HORIZON_DECAY``, then appends geometrically
    growing segments while ``|E|**2 + |C|**2`` at the final node exceeds
    ``TAIL_TOL``.  With ``tail_extension=None`` any shortfall raises
    :class:`HorizonError` instead.
    """
    cfg = cfg or IntegrationConfig()
    dt, t_max = _resolve_grid(p, cfg)
    e0 = _validate_initial_amplitude(e0)
    decay = p.kappa + p.gamma
    if decay * t_max < MIN_HORIZON_DECAY:
        if cfg.tail_extension is None:
            raise HorizonError(
                f"horizon t_max = {t_max:.6g} ns covers only "
                f"{decay * t_max:.3g} decay exponents "
                f"(need >= {MIN_HORIZON_DECAY:.0f}) and tail extension "
                "is disabled"
            )
        t_max = MIN_HORIZON_DECAY / decay

    chunks: list[tuple] = []
    state = (e0, 0.0j, 0.0, 0.0)
    node_count = 0  # nodes committed so far, excluding the pending segment
    n_steps = _steps_for(t_max, dt)
    extension_span = (cfg.tail_extension or 0.0) / decay
    while True:
        seg = _segment(p, dt, n_steps, *state, node_count * dt)
        chunks.append(seg if not chunks else tuple(a[1:] for a in seg))
        node_count += n_steps
        state = (seg[0][-1], seg[1][-1], float(seg[2][-1]), float(seg[3][-1]))
        tail = abs(state[0]) ** 2 + abs(state[1]) ** 2
        if tail <= TAIL_TOL:
            break
        if cfg.tail_extension is None:
            raise HorizonError(
                f"remaining-emission bound {tail:.3e} exceeds {TAIL_TOL:.0e} "
                f"at t = {node_count * dt:.6g} ns and tail extension is disabled"
            )
        if node_count > MAX_TOTAL_STEPS:
            raise HorizonError(
                f"no convergence after {node_count} steps; "
                f"remaining-emission bound still {tail:.3e}"
            )
        n_steps = _steps_for(extension_span, dt)
        extension_span *= 2.0
    arrays = tuple(np.concatenate([c[k] for c in chunks]) for k in range(4))
    return _build_trajectory(p, dt, *arrays)


def efficiency_numeric(p: SystemParams, cfg: IntegrationConfig | None = None) -> float:
    """Quantum efficiency from integration alone: P_out at convergence.

    The closed-form module never enters; on resonance this agrees with it
    to integration accuracy, and it is the reference for detuned sets.
    """
    return float(integrate_to_convergence(p, cfg).P_out[-1])


def output_spectrum_numeric(traj: AmplitudeTrajectory, deltas) -> SpectrumGrid:
    """Spectral density from a trajectory via the trapezoid transform.

    Requires a converged trajectory (``(kappa+gamma)*t_end`` of at least
    ``MIN_HORIZON_DECAY``) so the truncated tail cannot distort the line
    shape.  Density is in probability per rad/ns, matching the closed-form
    spectrum on resonance.
    """
    grid = as_detuning_grid(deltas)
    p = traj.params
    horizon = (p.kappa + p.gamma) * float(traj.times[-1])
    if horizon < MIN_HORIZON_DECAY:
        raise HorizonError(
            f"spectrum needs (kappa+gamma)*t_end >= {MIN_HORIZON_DECAY:.0f}, "
            f"got {horizon:.3g}; integrate longer"
        )
    transform = np.empty(grid.shape[0], dtype=np.complex128)
    fourier_trapezoid(traj.C.copy(), traj.dt, grid, transform)
    density = (p.kappa / math.pi) * (transform.real**2 + transform.imag**2)
    return SpectrumGrid(deltas=grid, density=density)
