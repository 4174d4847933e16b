#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs the hot kernels on representative workloads, checks that both
backends return identical values, and prints wall times plus speedups.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from maninlab.kernels import pykernels
from maninlab.polynomial import parse_polynomial

try:
    from maninlab.kernels import _ckernels as ckernels
except ImportError:
    ckernels = None


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()

    f = parse_polynomial("x1^2+x2^2+x3^2")
    c, e = f.exponent_matrix()
    a = np.array([1, 2, 3], dtype=np.int64)
    big_alpha = 3 if args.quick else 4
    big_rad2 = 500 if args.quick else 2155

    workloads = [
        ("cone_count_fp p=101", "cone_count_fp", (c, e, 3, 101)),
        ("prim_zero_count_pk 7^3", "prim_zero_count_pk", (c, e, 3, 7, 3, None)),
        ("f_valuation_profile 3^4", "f_valuation_profile", (c, e, 3, 3, 4)),
        (
            f"character_valuation_counts 5^{big_alpha} (5^{3 * big_alpha} pts)",
            "character_valuation_counts",
            (c, e, a, 3, 5, big_alpha),
        ),
        (f"ball_candidates b=1 rad2={big_rad2}", "ball_candidates", (c, e, 3, 1, big_rad2)),
    ]

    print(f"{'workload':48s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, name, wargs in workloads:
        py_out, py_t = _timed(getattr(pykernels, name), *wargs)
        if ckernels is None:
            print(f"{label:48s} {py_t:9.3f}s {'n/a':>10s} {'n/a':>8s}")
            continue
        c_out, c_t = _timed(getattr(ckernels, name), *wargs)
        if isinstance(py_out, tuple):
            same = all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(py_out, c_out))
        else:
            same = np.array_equal(np.asarray(py_out), np.asarray(c_out))
        if not same:
            raise SystemExit(f"backend mismatch on {label}")
        print(f"{label:48s} {py_t:9.3f}s {c_t:9.3f}s {py_t / max(c_t, 1e-9):7.1f}x")
    if ckernels is None:
        print("\ncompiled backend not built; run pip install -e . --no-build-isolation")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
