#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the two hot kernels (row statistics and polar-dual membership) and one
end-to-end workload (the weighted extremal function on a dense grid) under
both backends and prints a timing table.

Usage: python benchmarks/bench_backends.py [--samples N] [--repeat K]
"""

from __future__ import annotations

import argparse
import subprocess
import sys
import time

import numpy as np


def _time(fn, repeat: int) -> float:
    fn()  # warm-up / JIT compile
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_for_backend(samples: int, repeat: int) -> dict:
    from pluripot._backend import backend_name, dual_membership_count, pqr_stats
    from pluripot.extremal import v_kq_many

    rng = np.random.Generator(np.random.Philox(key=0xBE9C))
    results = {"backend": backend_name()}

    xr = rng.normal(size=(samples, 4))
    xi = rng.normal(size=(samples, 4))
    results["pqr_stats"] = _time(lambda: pqr_stats(xr, xi), repeat)

    dirs = rng.normal(size=(2048, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    w = np.concatenate([dirs, -dirs])
    pts = rng.uniform(-1.2, 1.2, size=(samples, 3))
    results["dual_membership"] = _time(
        lambda: dual_membership_count(pts, w, n_coarse=256, lo=0.93), repeat)

    grid = rng.normal(size=(samples, 3)) + 1j * rng.normal(size=(samples, 3))
    results["v_kq_grid"] = _time(lambda: v_kq_many(grid), repeat)
    return results


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=400_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--backend", choices=["this", "both"], default="both",
                        help="'both' re-runs the script once per backend")
    args = parser.parse_args()

    if args.backend == "this":
        res = run_for_backend(args.samples, args.repeat)
        print(f"{res['backend']:>6}  pqr={res['pqr_stats'] * 1e3:8.2f}ms  "
              f"membership={res['dual_membership'] * 1e3:8.2f}ms  "
              f"vkq={res['v_kq_grid'] * 1e3:8.2f}ms")
        return 0

    print(f"samples={args.samples} repeat={args.repeat} (best of)")
    import os
    for backend in ("numpy", "numba"):
        cmd = [sys.executable, __file__, "--backend", "this",
               "--samples", str(args.samples), "--repeat", str(args.repeat)]
        env = dict(os.environ, PLURIPOT_BACKEND=backend)
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        for line in proc.stdout.splitlines():
            if "pqr=" in line:
                print(line)
        if proc.returncode:
            print(proc.stderr, file=sys.stderr)
            return proc.returncode
    return 0


if __name__ == "__main__":
    sys.exit(main())
