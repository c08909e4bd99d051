"""Throughput of the compiled RK4 stepping kernel vs the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_rk4.py [--steps N] [--repeats R]

The workload is the dephased oracle-rotation sweep sampled on the half-step
grid, i.e. exactly what the master-equation solver feeds the kernel.
"""

import argparse
import time

import numpy as np

from adlind import DeutschParams, deutsch_model
from adlind._core import _rk4_py
from adlind.lindblad import sample_superoperators

try:
    from adlind._core import _rk4_cy
except ImportError:
    _rk4_cy = None


def make_workload(n_steps):
    tau = 50.0
    model = deutsch_model(DeutschParams(omega=1.0, gamma0=0.1, tau=tau))
    times = np.linspace(0.0, tau, 2 * n_steps + 1)
    samples = np.ascontiguousarray(sample_superoperators(model, times))
    y0 = np.array([1, 1, 0, 0], dtype=np.complex128)
    return samples, tau / n_steps, y0


def time_kernel(kernel, samples, dt, y0, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = kernel(samples, dt, y0)
        best = min(best, time.perf_counter() - start)
    return best, np.asarray(out)[-1]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    samples, dt, y0 = make_workload(args.steps)
    t_py, end_py = time_kernel(_rk4_py.rk4_propagate, samples, dt, y0, args.repeats)
    print(f"pure numpy : {args.steps / t_py:12.0f} steps/s "
          f"({1e9 * t_py / args.steps:7.1f} ns/step)")

    if _rk4_cy is None:
        print("compiled    : extension not built (pip install -e . rebuilds it)")
        return
    t_cy, end_cy = time_kernel(_rk4_cy.rk4_propagate, samples, dt, y0, args.repeats)
    print(f"compiled   : {args.steps / t_cy:12.0f} steps/s "
          f"({1e9 * t_cy / args.steps:7.1f} ns/step)")
    print(f"speedup    : {t_py / t_cy:.1f}x")
    print(f"endpoint agreement: {np.max(np.abs(end_py - end_cy)):.2e}")


if __name__ == "__main__":
    main()
