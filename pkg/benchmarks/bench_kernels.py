#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-Python fallback.

Runs the three hot sweeps on identical inputs through both backends,
checks that results agree exactly, and prints timings plus speedups.

    python benchmarks/bench_kernels.py [--n 8] [--k 4] [--repeat 1]
"""
from __future__ import annotations

import argparse
import random
import time

import numpy as np

from gf2lab._kernels import _pykern

try:
    from gf2lab._kernels import _ckern
except ImportError:
    _ckern = None

from gf2lab.subspaces import iter_rref_bases


def bench(label, fn_c, fn_py, args, repeat):
    results = {}
    timings = {}
    for name, fn in (("cython", fn_c), ("python", fn_py)):
        if fn is None:
            continue
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            out = fn(*args)
            best = min(best, time.perf_counter() - t0)
        results[name] = tuple(int(v) for v in out) if hasattr(out, "__len__") else out
        timings[name] = best
    if len(results) == 2:
        assert results["cython"] == results["python"], (label, results)
        speedup = timings["python"] / timings["cython"]
        print(f"{label:28s} cython {timings['cython']:8.3f}s   "
              f"python {timings['python']:8.3f}s   x{speedup:,.1f}")
    else:
        (name, t), = timings.items()
        print(f"{label:28s} {name} {t:8.3f}s   (single backend)")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=1)
    args = ap.parse_args()

    n, k = args.n, args.k
    rng = random.Random(1)
    bases = np.array(list(iter_rref_bases(n, k)), dtype=np.uint64)
    print(f"n={n} k={k}: {len(bases)} subspaces; "
          f"compiled backend {'available' if _ckern else 'MISSING'}")

    # bias sweeps stop at the first maximal witness; at desk sizes a
    # maximal coset almost always exists, so those rows mostly measure
    # table setup and identical early-exit points.  condenser_sweep and
    # affine_sweep at higher k run the full enumeration.
    fval = rng.getrandbits(1 << n)
    words = max(1, (1 << n) >> 6)
    fw = np.array([(fval >> (64 * i)) & ((1 << 64) - 1) for i in range(words)],
                  dtype=np.uint64)

    # condenser sweep: 8 random row maps of shape (n/2) x n
    half = n // 2
    map_cols = np.array(
        [[rng.getrandbits(half) for _ in range(n)] for _ in range(8)],
        dtype=np.uint64,
    )

    bench("condenser_sweep",
          _ckern.condenser_sweep if _ckern else None,
          _pykern.condenser_sweep,
          (bases, map_cols, half, half), args.repeat)
    bench("affine_sweep_m1",
          _ckern.affine_sweep_m1 if _ckern else None,
          _pykern.affine_sweep_m1,
          (fw, n, bases, True), args.repeat)
    bench("xor_sweep_m1",
          _ckern.xor_sweep_m1 if _ckern else None,
          _pykern.xor_sweep_m1,
          (fw, n, bases, True), args.repeat)
    bench("joint_sweep_m1",
          _ckern.joint_sweep_m1 if _ckern else None,
          _pykern.joint_sweep_m1,
          (fw, n, bases, True), args.repeat)


if __name__ == "__main__":
    main()
