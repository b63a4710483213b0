"""Compare the compiled and pure-Python ALS kernels on one masked solve.

Usage: python3 benchmarks/bench_kernels.py [--m 300] [--n 300] [--r 5] [--p 0.2] [--sweeps 20]
"""
import argparse
import time

import numpy as np

from mfstab import _kernels_py, factor
from mfstab._backend import BACKEND
from mfstab.factor import SolverConfig, als_solve
from mfstab.matcore import ObservedMatrix, sample_uniform


def _time(obs, r, sweeps, repeats):
    cfg = SolverConfig(max_iterations=sweeps, rel_tolerance=1e-300)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        res = als_solve(obs, r, cfg, seed=0)
        best = min(best, time.perf_counter() - t0)
    return best, res.final_objective


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=300)
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--r", type=int, default=5)
    ap.add_argument("--p", type=float, default=0.2)
    ap.add_argument("--sweeps", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    Y = rng.standard_normal((args.m, args.r)) @ rng.standard_normal((args.r, args.n))
    omega = sample_uniform(Y.shape, round(args.p * Y.size), seed=1)
    obs = ObservedMatrix(Y + 0.1 * rng.standard_normal(Y.shape), omega)

    results = {}
    if BACKEND == "cython":
        results["cython"] = _time(obs, args.r, args.sweeps, args.repeats)
    else:
        print("compiled kernels not built; timing the Python fallback only")
    compiled = factor.kernels
    factor.kernels = _kernels_py
    try:
        results["python"] = _time(obs, args.r, args.sweeps, args.repeats)
    finally:
        factor.kernels = compiled

    print(f"m={args.m} n={args.n} r={args.r} p={args.p} |Omega|={len(omega)} sweeps={args.sweeps}")
    for name, (sec, obj) in results.items():
        print(f"{name:>7}: {sec * 1e3:9.1f} ms   final objective {obj:.10e}")
    if len(results) == 2:
        print(f"speedup: {results['python'][0] / results['cython'][0]:.1f}x")


if __name__ == "__main__":
    main()
