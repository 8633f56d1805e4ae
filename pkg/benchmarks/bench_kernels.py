"""Compare the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py [--n 200000] [--d 100]``.
"""

import argparse
import time

import numpy as np

from excir import _pykernels
from excir.data import GroupFamily

try:
    from excir import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--d", type=int, default=100)
    ap.add_argument("--sketch-n", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    X = rng.standard_normal((args.n, args.d))
    y = X[:, :5].sum(axis=1) + rng.standard_normal(args.n)
    cx = np.median(X, axis=0)
    cy = float(np.median(y))
    gptr, gidx = GroupFamily({f"g{i}": range(i, args.d, 10) for i in range(10)}).csr()
    stream = rng.standard_normal(args.sketch_n)

    backends = [("python", _pykernels)] + ([("cython", _kernels)] if _kernels else [])
    results = {}
    for name, mod in backends:
        acc = best_of(lambda: mod.accumulate(X, cx, y, cy, None, gptr, gidx, True, 0, args.n),
                      args.repeats)

        def sketch():
            s = mod.GKSketch(0.01)
            s.insert_many(stream)
            s.query(0.5)

        results[name] = (acc, best_of(sketch, args.repeats))

    print(f"accumulate: n={args.n} d={args.d} groups=10; GK insert: n={args.sketch_n} eps=0.01")
    print(f"{'backend':<8} {'accumulate s':>13} {'GK insert s':>12}")
    for name, (acc, sk) in results.items():
        print(f"{name:<8} {acc:>13.4f} {sk:>12.4f}")
    if "cython" in results:
        py, cy_ = results["python"], results["cython"]
        print(f"speed-up  {py[0] / cy_[0]:>12.1f}x {py[1] / cy_[1]:>11.1f}x")


if __name__ == "__main__":
    main()
