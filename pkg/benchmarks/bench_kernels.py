"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot paths (Hermite function tables, greedy ball selection) on
the backend active in this process, then re-runs itself in a subprocess with
``HERMLAB_PURE=1`` to time the fallback, and prints a side-by-side table.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 5] [--scale 1.0]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from hermlab import kernels


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(scale):
    rng = np.random.default_rng(0)
    kmax = int(200 * scale)
    x = np.linspace(-25.0, 25.0, int(20_000 * scale))
    cand = rng.uniform(-20.0, 20.0, size=(int(4_000 * scale), 2))
    radii = (1.0 + (cand ** 2).sum(axis=1)) ** 0.25
    return kmax, x, cand, radii


def run_suite(repeats, scale):
    kmax, x, cand, radii = _workloads(scale)
    table = kernels.hermite_function_table(kmax, x)
    kept = kernels.greedy_ball_select(cand, radii)
    return {
        "backend": kernels.BACKEND,
        "hermite_table_s": _best_of(lambda: kernels.hermite_function_table(kmax, x), repeats),
        "ball_select_s": _best_of(lambda: kernels.greedy_ball_select(cand, radii), repeats),
        "table_checksum": float(np.abs(table).sum()),
        "kept_count": int(kept.size),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--scale", type=float, default=1.0, help="workload size multiplier")
    ap.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    res = run_suite(args.repeats, args.scale)
    if args.inner:
        print(json.dumps(res))
        return 0

    env = dict(os.environ, HERMLAB_PURE="1")
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--inner",
         "--repeats", str(args.repeats), "--scale", str(args.scale)],
        env=env, capture_output=True, text=True, check=True,
    )
    pure = json.loads(out.stdout)

    if res["backend"] == pure["backend"]:
        print("note: compiled extension not importable, comparing python against itself")
    if abs(res["table_checksum"] - pure["table_checksum"]) > 1e-9 * pure["table_checksum"]:
        print("WARNING: backends disagree on the Hermite table checksum")
    if res["kept_count"] != pure["kept_count"]:
        print("WARNING: backends disagree on the covering selection")

    print(f"{'kernel':<22}{res['backend']:>14}{pure['backend']:>14}{'speedup':>10}")
    for key, label in (("hermite_table_s", "hermite_table"), ("ball_select_s", "ball_select")):
        a, b = res[key], pure[key]
        print(f"{label:<22}{a:>13.4f}s{b:>13.4f}s{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
