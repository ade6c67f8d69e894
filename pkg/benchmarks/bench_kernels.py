"""Benchmark the numba kernels against the pure-NumPy fallback.

Runs the three hot kernels (scenario peak sweep, simulated annealing,
exhaustive search) on matched inputs through both backends and prints a
timing table.  The numba timings exclude the first (compiling) call.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from peaksched import _kernels_numpy as knp

try:
    from peaksched import _kernels_numba as knb
except ImportError:  # pragma: no cover - numba not installed
    knb = None


def _problem_arrays(rng: np.random.Generator, n: int, k: int):
    lo = rng.integers(0, 200, size=n).astype(np.int64)
    hi = lo + rng.integers(5, 60, size=n).astype(np.int64)
    durs = rng.integers(10, 31, size=(k, n)).astype(np.int64)
    cpus = rng.integers(5, 11, size=(k, n)).astype(np.int64)
    deadlines = hi + durs.max(axis=0) + rng.integers(0, 10, size=n)
    ep = np.arange(0, n // 3, dtype=np.int64)
    ec = ep + n // 2
    return lo, hi, durs, cpus, deadlines.astype(np.int64), ep, ec


def bench_scenario_peaks(mod, rng, repeat):
    lo, hi, durs, cpus, deadlines, ep, ec = _problem_arrays(rng, n=60, k=45)
    starts = lo.copy()
    mod.scenario_peaks(starts, durs, cpus)  # warm up / compile
    t0 = time.perf_counter()
    for _ in range(200 * repeat):
        mod.scenario_peaks(starts, durs, cpus)
    return (time.perf_counter() - t0) / (200 * repeat)


def bench_anneal(mod, rng, repeat):
    lo, hi, durs, cpus, deadlines, ep, ec = _problem_arrays(rng, n=40, k=25)
    iters = 4000
    draws = np.random.default_rng(7)
    args = dict(
        lo=lo, hi=hi, durs=durs, cpus=cpus, deadlines=deadlines, ep=ep, ec=ec,
        penalty=10_000,
        init_starts=lo.copy(),
        init_viol=np.zeros(durs.shape[0], dtype=np.bool_),
        move_u=draws.random(iters),
        job_u=draws.random(iters),
        val_u=draws.random(iters),
        vout_u=draws.random(iters),
        vin_u=draws.random(iters),
        thr=-2.0 * np.log(draws.random(iters) + 1e-300),
        shift_prob=1.0,
    )
    mod.anneal(**args)  # warm up / compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        mod.anneal(**args)
    return (time.perf_counter() - t0) / repeat


def bench_brute(mod, rng, repeat):
    n, k = 4, 3
    lo = np.zeros(n, dtype=np.int64)
    hi = np.full(n, 19, dtype=np.int64)  # 20**4 = 160k assignments
    durs = rng.integers(2, 6, size=(k, n)).astype(np.int64)
    cpus = rng.integers(1, 6, size=(k, n)).astype(np.int64)
    deadlines = np.full(n, 40, dtype=np.int64)
    ep = np.array([0], dtype=np.int64)
    ec = np.array([2], dtype=np.int64)
    masks = np.array([0, 1, 2, 4], dtype=np.int64)
    mod.brute_search(lo, hi, durs, cpus, deadlines, ep, ec, masks)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        mod.brute_search(lo, hi, durs, cpus, deadlines, ep, ec, masks)
    return (time.perf_counter() - t0) / repeat


BENCHES = [
    ("scenario_peaks (K=45, n=60)", bench_scenario_peaks),
    ("anneal (4k iters, K=25, n=40)", bench_anneal),
    ("brute_search (160k x 4)", bench_brute),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = [("numpy", knp)]
    if knb is not None:
        backends.append(("numba", knb))
    else:
        print("numba not available; benchmarking the NumPy backend only")

    results = {}
    for name, fn in BENCHES:
        for bk_name, mod in backends:
            rng = np.random.default_rng(42)
            results[(name, bk_name)] = fn(mod, rng, args.repeat)

    width = max(len(name) for name, _ in BENCHES) + 2
    header = f"{'kernel':<{width}}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, _ in BENCHES:
        t_np = results[(name, "numpy")]
        line = f"{name:<{width}}{t_np * 1e3:>10.3f}ms"
        if knb is not None:
            t_nb = results[(name, "numba")]
            line += f"{t_nb * 1e3:>10.3f}ms{t_np / t_nb:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
