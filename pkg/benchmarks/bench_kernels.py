"""Micro-benchmark of the jit kernels against their pure-numpy twins.

Run from a checkout:

    python3 benchmarks/bench_kernels.py --sizes 256,512,1024

Both flavors are always imported directly (bypassing the RMKIT_NUMBA
dispatch), so one process measures both.  The first jit call compiles; a
warm-up round keeps that out of the numbers.
"""

import argparse
import math
import time

import numpy as np

from rmkit import backend, kernels


def timeit(fn, *args, repeats=5):
    fn(*args)  # warm-up / compile
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_laplacian(n, rng):
    padded = np.pad(rng.normal(size=(n, n)), 1, mode="edge")
    t_np = timeit(kernels.laplacian_padded_numpy, padded, 1.0, 1.0)
    t_nb = timeit(kernels.laplacian_padded_numba, padded, 1.0, 1.0)
    return t_np, t_nb


def bench_convolve(n, rng):
    taps = np.exp(-0.5 * (np.arange(-3, 4) / 1.0) ** 2)
    taps /= taps.sum()
    padded = np.pad(rng.normal(size=(n, n)), ((0, 0), (3, 3)), mode="edge")
    t_np = timeit(kernels.convolve_rows_numpy, padded, taps)
    t_nb = timeit(kernels.convolve_rows_numba, padded, taps)
    return t_np, t_nb


def bench_segment_walk(n, rng):
    static = rng.random((n, n)) < 0.02
    dyn = (rng.random((n, n)) < 0.05) & ~static
    segs = rng.uniform(0.5, n - 0.5, size=(200, 4))

    def run(walk):
        acc = 0
        for sx, sy, ex, ey in segs:
            acc += walk(static, dyn, sx, sy, ex, ey, 1.0, 1.0)[1]
        return acc

    t_py = timeit(run, kernels.segment_walk_py)
    t_nb = timeit(run, kernels.segment_walk_nb)
    return t_py, t_nb


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="256,512,1024",
                    help="comma-separated grid sizes")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rng = np.random.default_rng(0)

    if not backend.USE_NUMBA:
        print("note: numba backend inactive; 'jit' columns run the plain "
              "python loops and will be slow")
    print("%-18s %6s %12s %12s %8s" % ("kernel", "n", "numpy_s", "jit_s", "ratio"))
    for n in sizes:
        for name, fn in (("laplacian", bench_laplacian),
                         ("row_convolve", bench_convolve),
                         ("segment_walk", bench_segment_walk)):
            t_np, t_nb = fn(n, rng)
            print("%-18s %6d %12.6f %12.6f %8.2f"
                  % (name, n, t_np, t_nb, t_np / t_nb))


if __name__ == "__main__":
    main()
