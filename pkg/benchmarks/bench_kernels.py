"""Compare the compiled and numpy Schur-complement kernels on real SDP data.

Usage: python benchmarks/bench_kernels.py [--repeat N]

The problems are the gamma_2 programs of random complex matrices of a few
ranks; X and S^{-1} are random positive definite matrices of the right size.
"""

import argparse
import time

import numpy as np

from factornorm import _core, _kernels_py
from factornorm.gamma2 import gamma2_problem


def _spd(rng, n):
    G = rng.standard_normal((n, n))
    return G @ G.T / n + np.eye(n)


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--ranks", type=int, nargs="*", default=[4, 8, 16, 24])
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"compiled backend available: {_core.BACKEND == 'cython'}")
    print(f"{'rank':>5} {'K':>6} {'numpy s':>10} {'compiled s':>11} {'speedup':>8} {'max diff':>9}")
    for r in args.ranks:
        M = rng.standard_normal((2 * r, r)) @ rng.standard_normal((r, 2 * r))
        M = M + 1j * (rng.standard_normal((2 * r, r)) @ rng.standard_normal((r, 2 * r)))
        data = gamma2_problem(M / np.max(np.abs(M)), 1e-6)[0]
        X, Sinv = _spd(rng, data.ns), _spd(rng, data.ns)
        argv = (X, Sinv, data.ptr, data.rows, data.cols, data.vals)
        t_py, H_py = _time(lambda: _kernels_py.schur_sdp(*argv), args.repeat)
        t_c, H_c = _time(lambda: _core.schur_sdp(*argv), args.repeat)
        diff = float(np.max(np.abs(H_py - H_c)))
        print(f"{r:>5} {data.K:>6} {t_py:>10.4f} {t_c:>11.4f} {t_py / t_c:>8.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
