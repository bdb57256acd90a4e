"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [repeats]

Times the three hot kernels (Monte Carlo trial estimation, RK4 moment
integration, Fisher-integral quadrature) on representative workloads and
prints the per-call time of each backend plus the speedup. The same
workloads run under FORCEBOUND_BACKEND=numpy / numba inside the package;
this script imports both kernel modules directly so one process covers
both paths.
"""

import sys
import time

import numpy as np

from forcebound import _kernels_numba, _kernels_numpy


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    rng = np.random.default_rng(0)

    normals = rng.standard_normal((10_000, 10))
    mc_args = (normals, 0.2, 0.8, 0.1, 0.3)

    rk4_args = (0.1, -0.2, 1.5, 0.1, 0.7, 1.0, 1.0, 0.4, 2.0, 10.0, 10_000)

    grid = np.linspace(-12.0, 12.0, 2**14)
    fisher_args = (grid, -0.01, 0.01, 0.0, 0.8, 0.003)

    workloads = [
        ("mc_trial_estimates (1e4 x 10)", "mc_trial_estimates", mc_args),
        ("rk4_moments (1e4 steps)", "rk4_moments", rk4_args),
        ("fisher_quadrature (2^14 pts)", "fisher_quadrature", fisher_args),
    ]

    # trigger JIT compilation outside the timed region
    for _, name, args in workloads:
        getattr(_kernels_numba, name)(*args)

    header = f"{'kernel':<32} {'numpy':>12} {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, name, args in workloads:
        t_np = time_call(getattr(_kernels_numpy, name), *args, repeats=repeats)
        t_nb = time_call(getattr(_kernels_numba, name), *args, repeats=repeats)
        print(f"{label:<32} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
