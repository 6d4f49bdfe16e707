"""Timing comparison of the jitted kernels against their numpy twins.

Runs each kernel on representative workloads and prints a table of
per-call times and speedups.  Usage:

    python benchmarks/bench_kernels.py [--trials 2000000] [--grid 64]
"""

import argparse
import time

import numpy as np

from bellsim import _kernels

if not _kernels.NUMBA_ENABLED:
    raise SystemExit(
        "numba backend unavailable (is BELLSIM_NO_NUMBA set?); "
        "nothing to compare"
    )


def best_of(fn, args, repeats=5):
    fn(*args)  # warm-up (and jit compile)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=2_000_000)
    parser.add_argument("--grid", type=int, default=64)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    n, k = args.trials, 4
    u = rng.random(n)
    pair_index = rng.integers(0, k, size=n)
    cum = np.cumsum(rng.dirichlet(np.ones(4), size=k), axis=1)[:, :3]
    d, g = _kernels._sample_outcomes_np(u, pair_index, cum)
    corr = rng.uniform(-1.0, 1.0, size=(args.grid, args.grid))

    cases = [
        (
            f"sample_outcomes ({n:,} trials)",
            _kernels._sample_outcomes_nb,
            _kernels._sample_outcomes_np,
            (u, pair_index, cum),
        ),
        (
            f"count_outcomes ({n:,} trials)",
            _kernels._count_outcomes_nb,
            _kernels._count_outcomes_np,
            (pair_index, d, g, k),
        ),
        (
            f"grid_max_abs_chsh ({args.grid}^4 points)",
            _kernels._grid_max_abs_chsh_nb,
            _kernels._grid_max_abs_chsh_np,
            (corr,),
        ),
    ]

    print(f"{'kernel':<40} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, fn_nb, fn_np, case_args in cases:
        t_nb = best_of(fn_nb, case_args)
        t_np = best_of(fn_np, case_args)
        print(f"{name:<40} {t_nb*1e3:>8.2f}ms {t_np*1e3:>8.2f}ms {t_np/t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
