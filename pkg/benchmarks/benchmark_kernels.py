"""Timing comparison of the compiled and pure-Python kernel backends.

Runs the RK4 trajectory kernel and the trapezoid spectral transform
through both implementations on identical inputs, checks they agree
bit for bit, and reports wall-clock medians and the speedup.

Usage: python3 benchmarks/benchmark_kernels.py [--repeats N]
"""

import argparse
import importlib
import statistics
import time

import numpy as np

from cavityqe import SystemParams, engine
from cavityqe import _kernels_py

try:
    _kernels_c = importlib.import_module("cavityqe._kernels")
except ImportError:
    _kernels_c = None


def _time(fn, repeats):
    """Median wall-clock seconds over `repeats` calls (first call warms up)."""
    fn()
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def _rk4_case(module, p, dt, n_steps):
    e_arr = np.empty(n_steps + 1, dtype=np.complex128)
    c_arr = np.empty(n_steps + 1, dtype=np.complex128)
    po_arr = np.empty(n_steps + 1, dtype=np.float64)
    ps_arr = np.empty(n_steps + 1, dtype=np.float64)

    def run():
        module.rk4_trajectory(
            p.g0, p.kappa, p.gamma, p.delta, dt, n_steps,
            1.0 + 0.0j, 0.0j, 0.0, 0.0, 0.0,
            e_arr, c_arr, po_arr, ps_arr,
        )
        return (e_arr, c_arr)

    return run


def _fourier_case(module, traj, deltas):
    amplitudes = traj.C.copy()
    out = np.empty(deltas.size, dtype=np.complex128)

    def run():
        module.fourier_trapezoid(amplitudes, traj.dt, deltas, out)
        return (out,)

    return run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if _kernels_c is None:
        print("compiled backend not built; nothing to compare")
        return 1

    p = SystemParams.from_ghz(g0_ghz=8.0, kappa_ghz=8.0, gamma_ghz=0.16)
    dt = engine.default_dt(p)
    n_steps = 20_000
    traj = engine.integrate_to_convergence(p)
    deltas = np.linspace(-1200.0, 1200.0, 4001)

    print(f"rk4_trajectory: {n_steps} steps, dt={dt:.3e} ns")
    print(f"fourier_trapezoid: {traj.times.size} nodes x {deltas.size} detunings")
    print(f"repeats per timing: {args.repeats} (median reported)\n")

    def identical(py_out, c_out):
        return all(np.array_equal(a, b) for a, b in zip(py_out, c_out))

    def within_rounding(py_out, c_out):
        # numpy reduction order differs from the C loop's running phase
        (a,), (b,) = py_out, c_out
        scale = float(np.abs(a).max())
        return float(np.abs(a - b).max()) <= 1e-12 * scale

    rows = []
    for name, make, agree, agreement in (
        ("rk4_trajectory", lambda m: _rk4_case(m, p, dt, n_steps),
         identical, "bit-identical"),
        ("fourier_trapezoid", lambda m: _fourier_case(m, traj, deltas),
         within_rounding, "equal to 1e-12 relative"),
    ):
        py_run = make(_kernels_py)
        c_run = make(_kernels_c)
        py_out = [a.copy() for a in py_run()]
        c_out = [a.copy() for a in c_run()]
        if not agree(py_out, c_out):
            print(f"{name}: backends disagree, refusing to time")
            return 1
        t_py = _time(py_run, args.repeats)
        t_c = _time(c_run, args.repeats)
        rows.append((name, t_py, t_c, t_py / t_c, agreement))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}  agreement")
    for name, t_py, t_c, speedup, agreement in rows:
        print(
            f"{name:<{width}}  {t_py * 1e3:>8.2f}ms  {t_c * 1e3:>8.2f}ms  "
            f"{speedup:>7.1f}x  {agreement}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
