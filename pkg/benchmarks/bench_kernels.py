#!/usr/bin/env python3
"""Benchmark the compiled bit kernels against the numpy fallback.

Runs the hot operations of the packing/spanning experiments on a synthetic
bit-matrix workload and reports both backends side by side:

    python benchmarks/bench_kernels.py [--rows 20000] [--words 8] [--repeat 3]
"""

import argparse
import time

import numpy as np

from shallowpack import _pykernels

try:
    from shallowpack import _ckernels
except ImportError:
    _ckernels = None


def make_workload(rows: int, words: int, seed: int = 1):
    rng = np.random.Generator(np.random.PCG64(seed))
    # sparse-ish rows so greedy length buckets resemble shallow systems
    words_mat = rng.integers(0, np.iinfo(np.uint64).max, size=(rows, words), dtype=np.uint64)
    mask = rng.random((rows, words)) < 0.7
    words_mat[mask] &= np.uint64(0x0101010101010101)
    lengths = _pykernels.popcounts(words_mat)
    order = rng.permutation(rows).astype(np.int64)
    return words_mat, lengths, order


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--words", type=int, default=8)
    ap.add_argument("--mst-rows", type=int, default=1500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    words, lengths, order = make_workload(args.rows, args.words)
    small = words[: args.mst_rows]

    tasks = {
        "popcounts": lambda k: (lambda: k.popcounts(words)),
        "distances_to": lambda k: (lambda: k.distances_to(words, words[0])),
        "greedy_select d=8": lambda k: (
            lambda: k.greedy_select(words, lengths, order, 8, True)
        ),
        "greedy_select d=32": lambda k: (
            lambda: k.greedy_select(words, lengths, order, 32, True)
        ),
        f"prim_mst m={args.mst_rows}": lambda k: (lambda: k.prim_mst(small)),
        "min_pairwise m=2000": lambda k: (
            lambda: k.min_pairwise_distance(words[:2000])
        ),
    }

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("compiled", _ckernels))
    else:
        print("compiled kernels unavailable; benchmarking the fallback only")

    print(f"workload: rows={args.rows} words={args.words} ({args.words * 64} bits/row)")
    header = f"{'task':<24}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, make in tasks.items():
        times = [timeit(make(mod), args.repeat) for _, mod in backends]
        row = f"{label:<24}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    if len(backends) == 2:
        a = _pykernels.greedy_select(words, lengths, order, 8, True)
        b = _ckernels.greedy_select(words, lengths, order, 8, True)
        assert np.array_equal(a, b), "backend outputs diverge"
        print("parity: greedy_select outputs identical across backends")


if __name__ == "__main__":
    main()
