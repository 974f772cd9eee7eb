#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two selection kernels at paper-scale sizes and a full GFHTP1 solve
under each backend. The full-solve column mostly reflects BLAS matvec time,
which both backends share; the kernel columns isolate the compiled speedup.

Usage: python benchmarks/kernel_benchmark.py [--repeats N]
"""

import argparse
import time

import numpy as np

from sparselad._kernels import BACKEND, fallback

try:
    from sparselad._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, *args, repeats=200):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeats):
    rng = np.random.default_rng(0)
    r = rng.normal(size=1000)          # residual length at paper scale
    x = rng.normal(size=5000)          # gradient-update length at paper scale
    rows = []
    for name, fn, args in [
        ("trunc_l1_stats (m=1000, k=500)", "trunc_l1_stats", (r, 500)),
        ("hard_threshold (n=5000, s=10)", "hard_threshold", (x, 10)),
        ("kth_smallest (m=1000, k=500)", "kth_smallest", (r, 500)),
    ]:
        t_py = _time(getattr(fallback, fn), *args, repeats=repeats)
        t_cy = _time(getattr(_fast, fn), *args, repeats=repeats) if _fast else float("nan")
        rows.append((name, t_py, t_cy))
    return rows


def bench_solve():
    from sparselad import _kernels, core
    from sparselad.probgen import ProblemSpec, generate
    from sparselad.solvers import SolverConfig, solve_gfhtp1

    prob = generate(ProblemSpec(m=1000, n=5000, s=10, p=0.2, outlier_scale=10.0, seed=3))
    saved = (_kernels.trunc_l1_stats, _kernels.kth_smallest, core._ht_kernel)
    times = {}
    try:
        for label, module in [("python", fallback), ("cython", _fast)]:
            if module is None:
                continue
            # route the package-level wrappers through one backend
            _kernels.trunc_l1_stats = module.trunc_l1_stats
            _kernels.kth_smallest = module.kth_smallest
            core._ht_kernel = module.hard_threshold
            best = float("inf")
            for _ in range(3):
                t0 = time.perf_counter()
                res = solve_gfhtp1(prob.A, prob.b, SolverConfig(sparsity=10))
                best = min(best, time.perf_counter() - t0)
            times[label] = (best, res.outer_iters)
    finally:
        _kernels.trunc_l1_stats, _kernels.kth_smallest, core._ht_kernel = saved
    return times


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    print(f"active backend at import: {BACKEND}")
    if _fast is None:
        print("compiled module not built; showing fallback timings only")
    print()
    print(f"{'kernel':38s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for name, t_py, t_cy in bench_kernels(args.repeats):
        ratio = t_py / t_cy if t_cy == t_cy and t_cy > 0 else float("nan")
        print(f"{name:38s} {t_py * 1e6:10.1f}us {t_cy * 1e6:10.1f}us {ratio:8.1f}x")
    print()
    solve_times = bench_solve()
    for label, (t, outers) in solve_times.items():
        print(f"gfhtp1 full solve (m=1000, n=5000, s=10, p=0.2) [{label:7s}]: "
              f"{t * 1e3:8.1f}ms ({outers} outer iterations)")
    if len(solve_times) == 2:
        print(f"full-solve ratio python/cython: "
              f"{solve_times['python'][0] / solve_times['cython'][0]:.2f}x "
              f"(dominated by shared BLAS matvecs)")


if __name__ == "__main__":
    main()
