#!/usr/bin/env python3
"""Benchmark the compiled elimination kernels against the numpy fallback.

Runs reduced row echelon form on random matrices with both backends,
verifies they produce identical pivots and reduced matrices, and prints a
timing table.  Usage:

    python3 benchmarks/bench_elimination.py [--sizes 256,512,1024] [--repeats 3]
"""

import argparse
import time

import numpy as np

from spflab.linalg import _pykernels

try:
    from spflab.linalg import _fastgf

    HAVE_FAST = True
except ImportError:
    HAVE_FAST = False


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_gf2(size, repeats, rng):
    a = rng.integers(0, 2, size=(size, size), dtype=np.uint8)
    packed = _pykernels.pack_gf2(a)

    py_words = packed.copy()
    t_py = _time(lambda: _pykernels.rref_gf2_packed(py_words.copy(), size), repeats)
    rows = [("gf2", size, "python", t_py)]
    if HAVE_FAST:
        cy_words = packed.copy()
        t_cy = _time(lambda: _fastgf.rref_gf2_packed(cy_words.copy(), size), repeats)
        rows.append(("gf2", size, "cython", t_cy))
        # agreement check (deterministic pivoting makes this bit-for-bit)
        w1, w2 = packed.copy(), packed.copy()
        p1 = _pykernels.rref_gf2_packed(w1, size)
        p2 = _fastgf.rref_gf2_packed(w2, size)
        assert list(p1) == list(p2) and np.array_equal(w1, w2), "backends disagree"
    return rows


def bench_gfp(size, p, repeats, rng):
    a = rng.integers(0, p, size=(size, size), dtype=np.uint8)
    t_py = _time(lambda: _pykernels.rref_gfp(a.copy(), p), repeats)
    rows = [(f"gf{p}", size, "python", t_py)]
    if HAVE_FAST:
        t_cy = _time(lambda: _fastgf.rref_gfp(a.copy(), p), repeats)
        rows.append((f"gf{p}", size, "cython", t_cy))
        m1, m2 = a.copy(), a.copy()
        p1 = _pykernels.rref_gfp(m1, p)
        p2 = _fastgf.rref_gfp(m2, p)
        assert list(p1) == list(p2) and np.array_equal(m1, m2), "backends disagree"
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="256,512,1024")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=20240801)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    if not HAVE_FAST:
        print("compiled backend unavailable; timing the fallback only\n")

    rows = []
    for size in sizes:
        rows += bench_gf2(size, args.repeats, rng)
        rows += bench_gfp(size, 7, args.repeats, rng)

    print(f"{'field':>6} {'size':>6} {'backend':>8} {'seconds':>10} {'speedup':>8}")
    baseline = {}
    for field, size, backend, seconds in rows:
        if backend == "python":
            baseline[(field, size)] = seconds
        speed = baseline[(field, size)] / seconds if seconds else float("inf")
        print(f"{field:>6} {size:>6} {backend:>8} {seconds:>10.4f} {speed:>7.1f}x")


if __name__ == "__main__":
    main()
