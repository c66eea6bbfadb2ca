#!/usr/bin/env python3
"""Benchmark the hot kernels with and without the JIT backend.

Runs each kernel in two subprocesses -- one with the default numba
backend and one with CHAOSLINK_NO_NUMBA=1 -- and prints a comparison
table.  Usage:

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _bench_worker(steps, repeat):
    from chaoslink import USING_NUMBA
    from chaoslink._accel import (
        additive_transmit,
        coupled_sync,
        fx_sync_run,
        logistic_orbit,
        lyapunov_sum,
    )
    import numpy as np

    info = np.zeros(steps)
    dist = np.zeros(steps)
    kernels = {
        "logistic_orbit": lambda: logistic_orbit(3.7, 1.0, 0.1, steps),
        "lyapunov_sum": lambda: lyapunov_sum(3.7, 1.0, 0.1, steps, 100),
        "coupled_sync": lambda: coupled_sync(3.7, 1.0, 0.5, 0.1, -1.0, steps),
        "additive_transmit": lambda: additive_transmit(
            3.7, 1.0, 0.5, 0.1, -1.0, info, dist, 1e6
        ),
        "fx_sync_run": lambda: fx_sync_run(15155, 2048, 4096, 1024, 122, -1024, steps),
    }
    results = {}
    for name, fn in kernels.items():
        fn()  # warm-up (JIT compile / cache touch)
        best = min(_time_once(fn) for _ in range(repeat))
        results[name] = best
    json.dump({"using_numba": USING_NUMBA, "timings": results}, sys.stdout)


def _time_once(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        _bench_worker(args.steps, args.repeat)
        return

    runs = {}
    for label, extra_env in [("numba", {}), ("fallback", {"CHAOSLINK_NO_NUMBA": "1"})]:
        env = dict(os.environ, **extra_env)
        if label == "numba":
            env.pop("CHAOSLINK_NO_NUMBA", None)
        proc = subprocess.run(
            [sys.executable, __file__, "--worker",
             "--steps", str(args.steps), "--repeat", str(args.repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        runs[label] = json.loads(proc.stdout)

    assert runs["numba"]["using_numba"] or not runs["fallback"]["using_numba"]
    print(f"steps per kernel call: {args.steps:,}   (best of {args.repeat})")
    print(f"{'kernel':<20} {'numba':>12} {'fallback':>12} {'speedup':>9}")
    for name in runs["numba"]["timings"]:
        fast = runs["numba"]["timings"][name]
        slow = runs["fallback"]["timings"][name]
        print(f"{name:<20} {fast:>11.4f}s {slow:>11.4f}s {slow / fast:>8.1f}x")


if __name__ == "__main__":
    main()
