"""Command-line interface.

Subcommands
-----------
efficiency   quantum efficiency and its factorizations for one design
simulate     integrate the amplitude equations and dump the trajectory
sweep        pulse metrics along one parameter axis
optimize     best cavity decay rate inside a bracket
spectrum     spectral density of the emitted photon

All frequencies on this surface are linear GHz (converted internally to
angular rad/ns), times are ns in data files and ps in human summaries.
Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
failure (probability ledger, horizon), 4 I/O failure.  Outputs are
deterministic: identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis import optimize_kappa, sweep
from .analytic import (
    ResonanceRequiredError,
    amplitudes_on_grid,
    efficiency,
    efficiency_via_purcell,
    output_spectrum_analytic,
)
from .config import (
    RunConfig,
    _parse_values,
    build_run_config,
    meta_dict,
    read_config_file,
)
from .engine import (
    HorizonError,
    IntegrationConfig,
    LedgerError,
    integrate,
    integrate_to_convergence,
    output_spectrum_numeric,
)
from .params import (
    SystemParams,
    ValidationError,
    angular_to_ghz,
    classify_regime,
    derive_rates,
    ghz_to_angular,
)

_OVERRIDE_KEYS = (
    "g0_ghz", "kappa_ghz", "gamma_ghz", "delta_ghz", "gamma0_ghz",
    "t_max_ns", "dt_ns", "tail_extension", "axis", "values", "route",
    "bracket_lo_ghz", "bracket_hi_ghz", "span_ghz", "points", "workers",
    "with_analytic_ref", "out", "format",
)


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _jsonable(x: float):
    x = float(x)
    return x if math.isfinite(x) else format(x)


@contextlib.contextmanager
def _out_stream(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_csv(stream, header: list[str], rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _write_json(stream, payload) -> None:
    stream.write(json.dumps(payload, indent=2, sort_keys=True))
    stream.write("\n")


def _write_meta(cfg: RunConfig, command: str) -> None:
    if cfg.out is None:
        return
    meta = {
        "tool": "cavityqe",
        "version": __version__,
        "command": command,
        "config": meta_dict(cfg),
    }
    with open(cfg.out + ".meta.json", "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(meta, indent=2, sort_keys=True))
        fh.write("\n")


def _params_from(cfg: RunConfig, *, need_kappa: bool = True) -> SystemParams:
    required = ["g0_ghz", "gamma_ghz"] + (["kappa_ghz"] if need_kappa else [])
    for key in required:
        if getattr(cfg, key) is None:
            raise ValidationError(key, "required parameter missing")
    return SystemParams.from_ghz(
        g0_ghz=cfg.g0_ghz,
        kappa_ghz=cfg.kappa_ghz,
        gamma_ghz=cfg.gamma_ghz,
        delta_ghz=cfg.delta_ghz,
        gamma0_ghz=cfg.gamma0_ghz,
    )


def _integration_config(cfg: RunConfig) -> IntegrationConfig:
    return IntegrationConfig(
        t_max=cfg.t_max_ns, dt=cfg.dt_ns, tail_extension=cfg.tail_extension
    )


def _data_format(cfg: RunConfig, command: str) -> str:
    fmt = cfg.format or "csv"
    if fmt == "text":
        raise ValidationError(
            "format", f"text output is only available for 'efficiency', not {command!r}"
        )
    return fmt


def _cmd_efficiency(cfg: RunConfig) -> int:
    p = _params_from(cfg)
    breakdown = efficiency(p)
    rates = derive_rates(p)
    label = classify_regime(p)
    pairs: list[tuple[str, object]] = [
        ("eta_q", breakdown.eta_q),
        ("eta_c", breakdown.eta_c),
        ("eta_extr", breakdown.eta_extr),
        ("law_kimble", breakdown.law_kimble),
        ("law_kimble_error", breakdown.law_kimble_error),
        ("cooperativity", rates.cooperativity),
        ("coupling", label.coupling.value),
        ("cavity", label.cavity.value),
    ]
    if p.gamma0 is not None:
        purcell = efficiency_via_purcell(p)
        pairs += [
            ("purcell_factor", purcell.purcell_factor),
            ("loss_ratio", purcell.loss_ratio),
            ("beta", purcell.beta),
            ("eta_q_purcell", purcell.eta_q),
        ]
    fmt = cfg.format or "text"
    with _out_stream(cfg.out) as out:
        if fmt == "text":
            for key, value in pairs:
                out.write(f"{key}={value if isinstance(value, str) else _fmt(value)}\n")
        elif fmt == "csv":
            header = [key for key, _ in pairs]
            row = [value if isinstance(value, str) else _fmt(value) for _, value in pairs]
            _write_csv(out, header, [row])
        else:
            _write_json(
                out,
                {k: (v if isinstance(v, str) else _jsonable(v)) for k, v in pairs},
            )
    _write_meta(cfg, "efficiency")
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    p = _params_from(cfg)
    fmt = _data_format(cfg, "simulate")
    traj = integrate(p, _integration_config(cfg))
    columns: list[tuple[str, np.ndarray]] = [
        ("t_ns", traj.times),
        ("re_E", traj.E.real),
        ("im_E", traj.E.imag),
        ("re_C", traj.C.real),
        ("im_C", traj.C.imag),
        ("abs2_E", traj.E.real**2 + traj.E.imag**2),
        ("abs2_C", traj.C.real**2 + traj.C.imag**2),
        ("P_out", traj.P_out),
        ("P_spont", traj.P_spont),
        ("n_rate", traj.emission_rate()),
        ("ledger_residual", traj.ledger_residuals()),
    ]
    if cfg.with_analytic_ref:
        if not p.is_resonant():
            raise ValidationError(
                "with_analytic_ref", "analytic reference exists on resonance only"
            )
        e_ref, c_ref = amplitudes_on_grid(p, traj.times)
        columns += [
            ("re_E_ref", e_ref.real),
            ("im_E_ref", e_ref.imag),
            ("re_C_ref", c_ref.real),
            ("im_C_ref", c_ref.imag),
        ]
    with _out_stream(cfg.out) as out:
        if fmt == "csv":
            header = [name for name, _ in columns]
            data = [col for _, col in columns]
            rows = ([_fmt(col[i]) for col in data] for i in range(len(traj.times)))
            _write_csv(out, header, rows)
        else:
            _write_json(out, {name: [_jsonable(v) for v in col] for name, col in columns})
    _write_meta(cfg, "simulate")
    if cfg.out is not None:
        print(
            f"wrote {len(traj.times)} nodes to {cfg.out} "
            f"(max ledger residual {traj.max_ledger_residual:.3e}, "
            f"backend {traj.backend})"
        )
    return 0


def _cmd_sweep(cfg: RunConfig) -> int:
    base = _params_from(cfg)
    fmt = _data_format(cfg, "sweep")
    if cfg.axis is None:
        raise ValidationError("axis", "required for sweep")
    if cfg.values is None:
        raise ValidationError("values", "required for sweep")
    values_rad = [ghz_to_angular(v) for v in cfg.values]
    result = sweep(
        base,
        cfg.axis,
        values_rad,
        route=cfg.route,
        cfg=_integration_config(cfg),
        workers=cfg.workers,
    )
    header = ["axis_value", "eta_q", "fwhm_ns", "peak_time_ns", "regime", "error"]
    rows = []
    records = []
    for v_ghz, metrics, error in zip(cfg.values, result.metrics, result.errors):
        if metrics is not None:
            rows.append(
                [
                    _fmt(v_ghz),
                    _fmt(metrics.eta_q),
                    _fmt(metrics.fwhm),
                    _fmt(metrics.peak_time),
                    str(metrics.regime),
                    "",
                ]
            )
            records.append(
                {
                    "axis_value": _jsonable(v_ghz),
                    "eta_q": _jsonable(metrics.eta_q),
                    "fwhm_ns": _jsonable(metrics.fwhm),
                    "peak_time_ns": _jsonable(metrics.peak_time),
                    "regime": str(metrics.regime),
                    "error": None,
                }
            )
        else:
            rows.append([_fmt(v_ghz), "", "", "", "", error])
            records.append({"axis_value": _jsonable(v_ghz), "error": error})
    with _out_stream(cfg.out) as out:
        if fmt == "csv":
            _write_csv(out, header, rows)
        else:
            _write_json(out, {"axis": result.axis, "route": result.route, "points": records})
    _write_meta(cfg, "sweep")
    if cfg.out is not None:
        good = [m for m in result.metrics if m is not None]
        failures = len(result.metrics) - len(good)
        line = f"sweep over {result.axis}: {len(result.metrics)} points, {failures} failed"
        if good:
            etas = [m.eta_q for m in good]
            widths_ps = [1e3 * m.fwhm for m in good]
            line += (
                f"; eta_q in [{min(etas):.6g}, {max(etas):.6g}]"
                f"; fwhm in [{min(widths_ps):.4g}, {max(widths_ps):.4g}] ps"
            )
        print(line)
    return 0


def _cmd_optimize(cfg: RunConfig) -> int:
    fmt = _data_format(cfg, "optimize")
    for key in ("g0_ghz", "gamma_ghz"):
        if getattr(cfg, key) is None:
            raise ValidationError(key, "required parameter missing")
    report = optimize_kappa(
        ghz_to_angular(cfg.g0_ghz),
        ghz_to_angular(cfg.gamma_ghz),
        (ghz_to_angular(cfg.bracket_lo_ghz), ghz_to_angular(cfg.bracket_hi_ghz)),
    )
    kappa_star_ghz = angular_to_ghz(report.kappa_star)
    with _out_stream(cfg.out) as out:
        if fmt == "csv":
            _write_csv(
                out,
                ["kappa_star_ghz", "eta_q_star", "iterations"],
                [[_fmt(kappa_star_ghz), _fmt(report.eta_q_star), str(report.iterations)]],
            )
        else:
            _write_json(
                out,
                {
                    "kappa_star_ghz": _jsonable(kappa_star_ghz),
                    "eta_q_star": _jsonable(report.eta_q_star),
                    "iterations": report.iterations,
                    "bracket_lo_ghz": _jsonable(cfg.bracket_lo_ghz),
                    "bracket_hi_ghz": _jsonable(cfg.bracket_hi_ghz),
                    "boundary": report.boundary,
                    "flat": report.flat,
                },
            )
    _write_meta(cfg, "optimize")
    if cfg.out is not None:
        flags = "".join(
            f" [{name}]" for name, on in (("boundary", report.boundary), ("flat", report.flat)) if on
        )
        print(
            f"kappa* = {kappa_star_ghz:.6g} GHz, eta_q* = {report.eta_q_star:.9g}, "
            f"{report.iterations} iterations{flags}"
        )
    return 0


def _default_span_ghz(p: SystemParams) -> float:
    rates = derive_rates(p)
    span_angular = 20.0 * rates.total_decay + 2.0 * abs(rates.rabi.real) + 2.0 * abs(p.delta)
    return angular_to_ghz(span_angular)


def _cmd_spectrum(cfg: RunConfig) -> int:
    p = _params_from(cfg)
    fmt = _data_format(cfg, "spectrum")
    if cfg.points < 2:
        raise ValidationError("points", f"need at least 2, got {cfg.points}")
    span_ghz = cfg.span_ghz if cfg.span_ghz is not None else _default_span_ghz(p)
    if span_ghz <= 0.0:
        raise ValidationError("span_ghz", f"must be positive, got {span_ghz!r}")
    deltas_ghz = np.linspace(-span_ghz, span_ghz, cfg.points)
    deltas_rad = ghz_to_angular(1.0) * deltas_ghz
    if cfg.route == "analytic":
        grid = output_spectrum_analytic(p, deltas_rad)
    else:
        traj = integrate_to_convergence(p, _integration_config(cfg))
        grid = output_spectrum_numeric(traj, deltas_rad)
    density_ghz = grid.density * ghz_to_angular(1.0)  # per-GHz on this surface
    with _out_stream(cfg.out) as out:
        if fmt == "csv":
            rows = (
                [_fmt(d), _fmt(s)] for d, s in zip(deltas_ghz, density_ghz)
            )
            _write_csv(out, ["delta_ghz", "S"], rows)
        else:
            _write_json(
                out,
                {
                    "delta_ghz": [_jsonable(v) for v in deltas_ghz],
                    "S": [_jsonable(v) for v in density_ghz],
                },
            )
    _write_meta(cfg, "spectrum")
    if cfg.out is not None:
        integral = float(np.trapezoid(density_ghz, deltas_ghz))
        print(
            f"wrote {cfg.points} samples to {cfg.out} "
            f"(integral over the axis {integral:.9g})"
        )
    return 0


_HANDLERS = {
    "efficiency": _cmd_efficiency,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "optimize": _cmd_optimize,
    "spectrum": _cmd_spectrum,
}


def _add_common_arguments(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key=value configuration file")
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.add_argument(
        "--format", choices=("csv", "json", "text"), default=None,
        help="output format (efficiency defaults to text, data commands to csv)",
    )
    sp.add_argument(
        "--seedless", action="store_true",
        help="accepted for interface compatibility; everything is deterministic",
    )
    sp.add_argument("--g0-ghz", type=float, default=None, help="coupling rate, GHz")
    sp.add_argument("--kappa-ghz", type=float, default=None, help="cavity decay rate, GHz")
    sp.add_argument("--gamma-ghz", type=float, default=None, help="parasitic decay rate, GHz")
    sp.add_argument("--delta-ghz", type=float, default=None, help="emitter-cavity detuning, GHz")
    sp.add_argument("--gamma0-ghz", type=float, default=None, help="free-space decay rate, GHz")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityqe",
        description="Quantum-efficiency toolkit for cavity-based single-photon sources",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("efficiency", help="efficiency factorization for one design")
    _add_common_arguments(sp)

    sp = subs.add_parser("simulate", help="integrate and dump the trajectory")
    _add_common_arguments(sp)
    sp.add_argument("--t-max-ns", type=float, default=None, help="horizon, ns")
    sp.add_argument("--dt-ns", type=float, default=None, help="step, ns")
    sp.add_argument(
        "--with-analytic-ref", action="store_true", default=None,
        help="append closed-form reference columns (resonant runs only)",
    )

    sp = subs.add_parser("sweep", help="pulse metrics along one parameter axis")
    _add_common_arguments(sp)
    sp.add_argument("--axis", choices=("g0", "kappa", "gamma", "delta"), default=None)
    sp.add_argument("--values", default=None, help="comma-separated axis values, GHz")
    sp.add_argument("--route", choices=("analytic", "numeric"), default=None)
    sp.add_argument("--workers", type=int, default=None, help="parallel evaluation threads")
    sp.add_argument("--t-max-ns", type=float, default=None, help="numeric-route horizon, ns")
    sp.add_argument("--dt-ns", type=float, default=None, help="numeric-route step, ns")

    sp = subs.add_parser("optimize", help="best cavity decay rate inside a bracket")
    _add_common_arguments(sp)
    sp.add_argument("--bracket-lo-ghz", type=float, default=None)
    sp.add_argument("--bracket-hi-ghz", type=float, default=None)

    sp = subs.add_parser("spectrum", help="spectral density of the emitted photon")
    _add_common_arguments(sp)
    sp.add_argument("--span-ghz", type=float, default=None, help="half width of the detuning axis")
    sp.add_argument("--points", type=int, default=None, help="number of samples")
    sp.add_argument("--route", choices=("analytic", "numeric"), default=None)
    sp.add_argument("--t-max-ns", type=float, default=None, help="numeric-route horizon, ns")
    sp.add_argument("--dt-ns", type=float, default=None, help="numeric-route step, ns")

    return parser


def _collect_overrides(args: argparse.Namespace) -> dict[str, object]:
    overrides = {}
    for key in _OVERRIDE_KEYS:
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    raw_values = overrides.get("values")
    if isinstance(raw_values, str):
        overrides["values"] = _parse_values("values", raw_values)
    return overrides


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_map = read_config_file(args.config) if args.config else None
        cfg = build_run_config(file_map, _collect_overrides(args))
        return _HANDLERS[args.command](cfg)
    except (LedgerError, HorizonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, ResonanceRequiredError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
