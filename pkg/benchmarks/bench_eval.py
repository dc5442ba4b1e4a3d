"""Compare the compiled and pure-Python solution-program evaluators.

    python3 benchmarks/bench_eval.py [--rows 2000] [--repeat 3]

Both kernels evaluate the same compiled solution program for each bundled
robot over the same batch of random reachable poses; the script checks the
outputs agree bit for bit before timing.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from symik import _evalcore_py
from symik.kinmodel import builtin_robot, numeric_fk, pose_bindings
from symik.pipeline import solve
from symik.program import run_batch
from symik.verify import random_seed

try:
    from symik import _evalcore
except ImportError:  # extension not built
    _evalcore = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _evalcore is None:
        print("compiled extension not available; run `pip install -e . --no-build-isolation`")
        return
    print(f"{'robot':<14}{'instrs':>8}{'rows':>8}{'cython s':>12}{'python s':>12}{'speedup':>10}")
    for name in ("puma", "chair_helper", "olson13"):
        robot = builtin_robot(name)
        prog = solve(robot).program
        rng = np.random.default_rng(args.seed)
        x = np.array([prog.input_vector({**robot.constants,
                                         **pose_bindings(numeric_fk(robot, random_seed(robot, rng)))})
                      for _ in range(args.rows)])
        a = run_batch(prog, x, _evalcore)
        b = run_batch(prog, x, _evalcore_py)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]), "kernels disagree"
        tc = _best(lambda: run_batch(prog, x, _evalcore), args.repeat)
        tp = _best(lambda: run_batch(prog, x, _evalcore_py), args.repeat)
        print(f"{name:<14}{len(prog.instrs):>8}{args.rows:>8}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
