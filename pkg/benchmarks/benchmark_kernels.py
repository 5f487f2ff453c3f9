#!/usr/bin/env python3
"""Timing comparison of the susceptibility-grid backends.

Runs identical workloads through the compiled extension and the numpy
fallback, checks that their outputs agree, and reports best-of-N wall
times per call together with the speedup.  Workload sizes span a single
narrow scan up to a dense multi-group sweep.

Usage::

    python3 benchmarks/benchmark_kernels.py [--repeats 7] [--target-ms 20]
"""

import argparse
import sys
import time

import numpy as np

from fluxcav import _kernels_np
from fluxcav.constants import TWO_PI
from fluxcav.semiclassical import EPS_COEF

try:
    from fluxcav import _kernels_cy
except ImportError:
    _kernels_cy = None

CASES = (
    (201, 1),
    (2001, 1),
    (2001, 8),
    (20001, 8),
    (20001, 32),
)


def workload(n_points, n_groups, seed=0):
    """Representative inputs: qubit groups spread around a 7.8 GHz mode."""
    rng = np.random.default_rng(seed)
    flux = np.linspace(-0.02, 0.02, n_points)
    counts = rng.integers(1, 12, n_groups).astype(np.float64)
    delta = TWO_PI * rng.uniform(3e9, 7e9, n_groups)
    current = rng.uniform(50e-9, 160e-9, n_groups)
    g_bare = TWO_PI * rng.uniform(0.5e6, 5e6, n_groups)
    gamma_phi = TWO_PI * rng.uniform(20e6, 150e6, n_groups)
    omega = TWO_PI * 7.782e9
    return (flux, counts, delta, current, g_bare, gamma_phi, omega, EPS_COEF)


def best_call_time(fn, args, repeats, target_ms):
    """Best per-call time over ``repeats`` batches of roughly target_ms each."""
    t0 = time.perf_counter()
    fn(*args)
    single = time.perf_counter() - t0
    inner = max(1, int(target_ms / 1e3 / max(single, 1e-9)))
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7, help="timing batches per case")
    parser.add_argument(
        "--target-ms", type=float, default=20.0, help="approximate batch duration"
    )
    args = parser.parse_args(argv)

    if _kernels_cy is None:
        print("compiled extension not built; timing the numpy backend only")

    worst_rel = 0.0
    rows = []
    for n_points, n_groups in CASES:
        data = workload(n_points, n_groups)
        t_np = best_call_time(
            _kernels_np.susceptibility_grid, data, args.repeats, args.target_ms
        )
        if _kernels_cy is None:
            rows.append((n_points, n_groups, t_np, None, None))
            continue
        t_cy = best_call_time(
            _kernels_cy.susceptibility_grid, data, args.repeats, args.target_ms
        )
        ref = _kernels_np.susceptibility_grid(*data)
        out = _kernels_cy.susceptibility_grid(*data)
        worst_rel = max(worst_rel, float(np.max(np.abs(out - ref) / np.abs(ref))))
        rows.append((n_points, n_groups, t_np, t_cy, t_np / t_cy))

    header = f"{'points':>8} {'groups':>7} {'numpy':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n_points, n_groups, t_np, t_cy, speedup in rows:
        np_text = f"{1e6 * t_np:9.2f} us"
        if t_cy is None:
            print(f"{n_points:>8} {n_groups:>7} {np_text:>12} {'-':>12} {'-':>8}")
        else:
            cy_text = f"{1e6 * t_cy:9.2f} us"
            print(
                f"{n_points:>8} {n_groups:>7} {np_text:>12} {cy_text:>12} "
                f"{speedup:7.2f}x"
            )
    if _kernels_cy is not None:
        print(f"max relative output difference: {worst_rel:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
