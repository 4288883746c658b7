"""Benchmark the compiled Jacobi eigensolver against the Python fallback.

Builds the free flux kernel matrix at a few sizes and times both
backends on identical inputs, checking that the spectra agree.

    python benchmarks/bench_jacobi.py [--sizes 100 200 400]
"""

import argparse
import time

import numpy as np

from backflow import KernelSpec, QuadratureSpec, kernel_matrix, quadrature_nodes
from backflow import _jacobi_py

try:
    from backflow import _jacobi as _jacobi_c
except ImportError:
    _jacobi_c = None


def bench(solve, matrix, repeats=1):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = solve(matrix)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    args = parser.parse_args()

    if _jacobi_c is None:
        print("compiled extension not available; run `python setup.py build_ext --inplace`")
        return

    spec = KernelSpec("free")
    print(f"{'n':>6} {'compiled [s]':>14} {'python [s]':>12} {'speedup':>9} {'max |dlambda|':>14}")
    for n in args.sizes:
        u, w = quadrature_nodes(QuadratureSpec(n=n, mapping="truncation", u_max=16.0))
        m = kernel_matrix(spec, u, w)
        t_c, ev_c = bench(_jacobi_c.jacobi_eigenvalues, m)
        t_p, ev_p = bench(_jacobi_py.jacobi_eigenvalues, m)
        dev = float(np.max(np.abs(ev_c - ev_p)))
        print(f"{n:>6} {t_c:>14.3f} {t_p:>12.3f} {t_p / t_c:>9.1f} {dev:>14.2e}")


if __name__ == "__main__":
    main()
