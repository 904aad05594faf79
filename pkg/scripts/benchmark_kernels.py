#!/usr/bin/env python3
"""Times the compiled and pure-Python best-response kernels on the same work.

Run after `pip install -e . --no-build-isolation`; if the extension did not
build, only the Python rows are reported.
"""

import argparse
import os
import time

import numpy as np

from timeline_contest import backends
from timeline_contest.harness import generate_linear_instance, generate_log_instance
from timeline_contest.iterative import SolverConfig, solve_general_ne


def time_batch(instances, backend):
    os.environ["TIMELINE_CONTEST_BACKEND"] = backend
    try:
        start = time.perf_counter()
        for inst in instances:
            solve_general_ne(inst, SolverConfig())
        return time.perf_counter() - start
    finally:
        os.environ.pop("TIMELINE_CONTEST_BACKEND", None)


def batch(family, n, count, seed):
    rng = np.random.default_rng(seed)
    gen = generate_linear_instance if family == "linear" else generate_log_instance
    return [
        gen(n, int(rng.integers(2**32)), theta=float(rng.uniform(0.1, 3.0)))
        for _ in range(count)
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=100, help="solves per cell")
    parser.add_argument("--seed", type=int, default=20250809)
    args = parser.parse_args()

    print(f"compiled kernel available: {backends.HAVE_COMPILED}")
    cells = [("linear", 5), ("logarithmic", 5), ("logarithmic", 20)]
    rows = []
    for family, n in cells:
        instances = batch(family, n, args.count, args.seed)
        t_py = time_batch(instances, "python")
        row = [f"{family} N={n}", f"{1000 * t_py / args.count:8.3f} ms"]
        if backends.HAVE_COMPILED:
            t_c = time_batch(instances, "compiled")
            row += [f"{1000 * t_c / args.count:8.3f} ms", f"{t_py / t_c:6.1f}x"]
        rows.append(row)

    header = ["cell", "python/solve"] + (["compiled/solve", "speedup"] if backends.HAVE_COMPILED else [])
    width = max(len(r[0]) for r in rows + [header])
    print("  ".join([header[0].ljust(width)] + header[1:]))
    for r in rows:
        print("  ".join([r[0].ljust(width)] + r[1:]))


if __name__ == "__main__":
    main()
