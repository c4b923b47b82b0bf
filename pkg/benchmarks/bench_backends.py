"""Benchmark the pairwise residual kernels: numba versus numpy backend.

The backend is fixed at import time by NDF_BACKEND, so this script
re-executes itself in a subprocess per backend and prints a comparison
table. Direct single-backend timing:

    NDF_BACKEND=numpy python benchmarks/bench_backends.py --single
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

SIZES = [64, 256, 1024]
DEGREE = 8
REPEATS = 5


def time_backend():
    from ndf.harmonics import degree_dims
    from ndf._kernels import pair_gradient, pair_legendre_sums

    rng = np.random.default_rng(0)
    rows = []
    for n in SIZES:
        pts = rng.standard_normal((n, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        dims = degree_dims(DEGREE, 2)
        # first call pays any JIT cost; excluded from the timing
        pair_legendre_sums(pts, DEGREE, 2)
        pair_gradient(pts, n // 2, dims)
        best_s, best_g = float("inf"), float("inf")
        for _ in range(REPEATS):
            t0 = time.perf_counter()
            pair_legendre_sums(pts, DEGREE, 2)
            best_s = min(best_s, time.perf_counter() - t0)
            t0 = time.perf_counter()
            pair_gradient(pts, n // 2, dims)
            best_g = min(best_g, time.perf_counter() - t0)
        rows.append({"n": n, "sums_s": best_s, "grad_s": best_g})
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--single", action="store_true",
                        help="time only the active backend, emit JSON")
    args = parser.parse_args()

    if args.single:
        from ndf import ACTIVE_BACKEND

        print(json.dumps({"backend": ACTIVE_BACKEND, "rows": time_backend()}))
        return

    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, NDF_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--single"],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{backend}: failed\n{proc.stderr}", file=sys.stderr)
            continue
        payload = json.loads(proc.stdout.strip().splitlines()[-1])
        results[payload["backend"]] = payload["rows"]

    if set(results) != {"numba", "numpy"}:
        sys.exit(1)
    print(f"pairwise kernels, degree t={DEGREE}, best of {REPEATS}")
    print(f"{'n':>6} {'op':>5} {'numpy [ms]':>12} {'numba [ms]':>12} "
          f"{'speedup':>8}")
    for i, n in enumerate(SIZES):
        for op, key in (("sums", "sums_s"), ("grad", "grad_s")):
            a = results["numpy"][i][key]
            b = results["numba"][i][key]
            print(f"{n:>6} {op:>5} {a * 1e3:>12.3f} {b * 1e3:>12.3f} "
                  f"{a / b:>8.2f}x")


if __name__ == "__main__":
    main()
