#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Runs each kernel (and two end-to-end operations built on them) under
both backends and prints the per-call timings with the speedup factor.

    python benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from consensus_seminorms import _backend
from consensus_seminorms import metric_pinf, metric_p2
from consensus_seminorms.certify import counterexample_matrix
from consensus_seminorms.products import estimate_equivalence


def timeit(fn, repeat, number):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def cases(rng):
    m6 = counterexample_matrix().data
    m40 = rng.standard_normal((40, 40))
    sym = m40.T @ m40 / 40
    g5 = rng.standard_normal((5, 5))
    g5 -= np.outer((g5.sum(axis=1) - 1) / 5, np.ones(5))
    sym5 = g5 @ g5.T
    yield ("pairwise_rowdiff_max 6x6", 20000,
           lambda: _backend.pairwise_rowdiff_max(m6))
    yield ("pairwise_rowdiff_max 40x40", 2000,
           lambda: _backend.pairwise_rowdiff_max(m40))
    yield ("col_split_value 6x6", 20000,
           lambda: _backend.col_split_value(m6))
    yield ("col_split_value 40x40", 5000,
           lambda: _backend.col_split_value(m40))
    yield ("scrambling_pair 6x6", 20000,
           lambda: _backend.scrambling_pair(m6))
    yield ("sym_eig_max 5x5", 5000,
           lambda: _backend.sym_eig_max(sym5))
    yield ("sym_eig_max 40x40", 200,
           lambda: _backend.sym_eig_max(sym))
    yield ("metric_pinf LP 6x6", 200, lambda: metric_pinf(m6))
    yield ("metric_p2 5x5", 2000, lambda: metric_p2(g5))
    yield ("estimate_equivalence m1/minf n=5 x100", 1,
           lambda: estimate_equivalence("metric", 1, "metric", "inf",
                                        n=5, samples=100, seed=7))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = _backend.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; run pip install -e . first")
    rng = np.random.default_rng(0)
    rows = []
    for name, number, fn in cases(rng):
        timings = {}
        for b in backends:
            _backend.set_backend(b)
            timings[b] = timeit(fn, args.repeat, number)
        rows.append((name, timings))
    _backend.set_backend("cython" if "cython" in backends else "numpy")

    width = max(len(r[0]) for r in rows)
    header = f"{'case':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, timings in rows:
        line = f"{name:<{width}}  "
        for b in backends:
            line += f"{timings[b] * 1e6:>10.1f}us"
        if len(backends) == 2:
            line += f"{timings['numpy'] / timings['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
