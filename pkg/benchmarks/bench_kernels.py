"""Timing comparison of the jitted kernels against their plain-Python source.

Each kernel is timed twice on the same inputs: once through the
compiled entry point and once through ``fn.py_func`` (with
MMSTAB_DISABLE_NUMBA=1 both names resolve to the same plain function,
so the ratio column reads 1.0 and the run doubles as a fallback check).
Compilation happens during the warmup pass and is excluded from the
numbers.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import itertools
import time

import numpy as np

from mmstab._accel import NUMBA_ENABLED
from mmstab import kernels


def best_of(fn, args, repeats, inner=1):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def minor_index(n):
    subsets = [
        s
        for r in range(1, n + 1)
        for s in itertools.combinations(range(n), r)
    ]
    idx = np.fromiter(
        (i for s in subsets for i in s), dtype=np.int64
    )
    offsets = np.zeros(len(subsets) + 1, dtype=np.int64)
    np.cumsum([len(s) for s in subsets], out=offsets[1:])
    return idx, offsets


def cases(rng):
    h16 = rng.uniform(0.0, 1.0, size=(16, 16))
    a16 = rng.normal(size=(16, 16))
    h64 = rng.uniform(0.0, 1.0, size=(64, 64))
    a64 = rng.normal(size=(64, 64))
    z6 = rng.normal(size=6)
    z6 /= np.linalg.norm(z6)
    h6 = rng.uniform(0.0, 1.0, size=(6, 6))
    h6 = 0.5 * (h6 + h6.T)
    c6 = np.eye(6)
    idx, offsets = minor_index(10)
    m10 = rng.normal(size=(10, 10)) + 10.0 * np.eye(10)

    yield "hessenberg_reduce (64)", kernels.hessenberg_reduce, (a64.copy(),), 1
    yield "hqr_eigvals (16)", kernels.hqr_eigvals, (
        kernels.hessenberg_reduce(a16.copy()),
        30 * 16 * 16,
    ), 1
    yield "power_iteration (64)", kernels.power_iteration, (h64, 10_000, 1e-12), 1
    yield "lu_det (16)", kernels.lu_det, (a16,), 20
    yield "batch_minors (10, all 1023)", kernels.batch_minors, (m10, idx, offsets), 1
    yield "flow_rhs (6)", kernels.flow_rhs, (h6, c6, z6, 0.5), 50
    yield "rk4_flow (6, 2000 steps)", kernels.rk4_flow, (
        h6,
        c6,
        z6,
        0.0,
        0.01,
        2000,
        1e-300,
        True,
        1e9,
    ), 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5, help="timing repeats, best kept")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    mode = "numba" if NUMBA_ENABLED else "pure numpy (fallback)"
    print(f"kernel path: {mode}")
    header = f"{'kernel':<28} {'jitted':>12} {'python':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fn, call_args, inner in cases(rng):
        # lu_det mutates its input: hand each timing pass a fresh copy
        fresh = lambda: tuple(
            a.copy() if isinstance(a, np.ndarray) else a for a in call_args
        )
        fn(*fresh())  # warmup / compile
        fn.py_func(*fresh())
        jitted = best_of(lambda *a: fn(*fresh()), (), args.repeats, inner)
        plain = best_of(lambda *a: fn.py_func(*fresh()), (), args.repeats, inner)
        ratio = plain / jitted if jitted > 0 else float("nan")
        print(f"{name:<28} {jitted * 1e6:>10.1f}us {plain * 1e6:>10.1f}us {ratio:>8.1f}x")


if __name__ == "__main__":
    main()
