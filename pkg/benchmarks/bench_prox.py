"""Benchmark the prox kernels: compiled extension vs pure-Python fallback.

Times the pool-adjacent-violators kernel and the full prox pipeline
(stable sort + kernel + unpermute) at several dimensions, checks that the
two backends agree bitwise, and prints a table with the speedup.

Usage: python benchmarks/bench_prox.py [--sizes 100,1000,10000,100000]
"""

import argparse
import time

import numpy as np

from owlreg import _pav_py

try:
    from owlreg import _pav
except ImportError:
    _pav = None


def prox_with(kernel, u, w):
    order = np.argsort(-np.abs(u), kind="stable")
    mags = np.abs(u)[order]
    out = np.empty_like(u)
    out[order] = kernel.prox_on_sorted(mags, w)
    return np.sign(u) * out


def time_call(fn, min_time=0.2):
    fn()  # warm up
    reps = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_time:
            return dt / reps
        reps = max(reps * 2, int(reps * min_time / max(dt, 1e-9)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="100,1000,10000,100000")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _pav is None:
        print("compiled kernel unavailable; only the python fallback is timed")

    rng = np.random.default_rng(0)
    header = f"{'p':>8} {'stage':>8} {'python us':>12} {'c us':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for p in sizes:
        u = rng.normal(size=p) * 3.0
        w = np.sort(rng.uniform(0.0, 2.0, size=p))[::-1].copy()
        w[0] = max(w[0], 0.05)
        mags = np.sort(np.abs(u))[::-1].copy()

        if _pav is not None:
            np.testing.assert_array_equal(
                _pav.prox_on_sorted(mags, w), _pav_py.prox_on_sorted(mags, w)
            )
            np.testing.assert_array_equal(prox_with(_pav, u, w), prox_with(_pav_py, u, w))

        for stage, py_fn, c_fn in (
            ("kernel", lambda: _pav_py.prox_on_sorted(mags, w),
             (lambda: _pav.prox_on_sorted(mags, w)) if _pav else None),
            ("prox", lambda: prox_with(_pav_py, u, w),
             (lambda: prox_with(_pav, u, w)) if _pav else None),
        ):
            t_py = time_call(py_fn) * 1e6
            if c_fn is not None:
                t_c = time_call(c_fn) * 1e6
                print(f"{p:>8} {stage:>8} {t_py:>12.1f} {t_c:>10.1f} {t_py / t_c:>8.1f}")
            else:
                print(f"{p:>8} {stage:>8} {t_py:>12.1f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
