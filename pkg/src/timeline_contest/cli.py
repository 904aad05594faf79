"""Command-line entry point: solve instances, print bound tables, run sweeps,
regenerate figure data and run the verification suite.

Exit codes: 0 success, 1 verification/convergence failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import acceptance
from . import bounds as bnd
from . import harness
from .closed_form import solve_linear_ne
from .core import (
    ContestError,
    ContestInstance,
    DomainError,
    RegimeError,
    StructuralError,
    UsageError,
    compute_measures,
    load_instance,
)
from .iterative import ConvergenceError, SolverConfig, solve_general_ne

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _default_workers() -> int:
    env = os.environ.get("TIMELINE_CONTEST_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as e:
            raise UsageError(f"TIMELINE_CONTEST_WORKERS must be an integer, got {env!r}") from e
    return os.cpu_count() or 1


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    method = args.method
    if method == "closed" and not instance.all_linear:
        raise UsageError("--method closed requires an all-linear instance")
    use_closed = method == "closed" or (method == "auto" and instance.all_linear)
    try:
        if use_closed:
            result = solve_linear_ne(instance)
        else:
            result = solve_general_ne(instance, SolverConfig())
    except ConvergenceError as e:
        print(f"solver did not converge: {e}", file=sys.stderr)
        print(f"last rates: {list(e.profile.x)}", file=sys.stderr)
        print(f"last residuals: {list(e.residuals)}", file=sys.stderr)
        return EXIT_FAIL

    measures = compute_measures(instance, result.profile)
    doc = {
        "method": result.method,
        "degenerate": result.degenerate,
        "rates": list(result.profile.x),
        "shares": list(result.profile.d),
        "z": result.profile.z,
        "participating_benign": list(result.participating_benign),
        "malicious_active": result.malicious_active,
        "iterations": result.iterations,
        "foc_residuals": list(result.foc_residuals),
        "order": list(instance.order),
        "scale": instance.scale,
        "measures": {
            "su": measures.su,
            "sv": measures.sv,
            "sw": measures.sw,
            "v0": measures.v0,
            "per_agent_u": list(measures.per_agent_u),
            "per_agent_v": list(measures.per_agent_v),
        },
    }
    text = json.dumps(doc, indent=2)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _parse_grid(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError("--theta-grid must be start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as e:
        raise UsageError(f"--theta-grid values must be numbers: {spec!r}") from e
    if step <= 0 or stop < start:
        raise UsageError("--theta-grid needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def cmd_bounds(args) -> int:
    if args.theta is not None:
        thetas = [args.theta]
    elif args.theta_grid:
        thetas = _parse_grid(args.theta_grid)
    else:
        raise UsageError("provide --theta or --theta-grid")
    if any(t < 0 for t in thetas):
        raise UsageError("theta must be >= 0")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    lines = [bnd.BOUND_TABLE_HEADER]
    lines.extend(bnd.bound_table_rows(args.n, thetas))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = harness.load_sweep_config(args.config)
    if args.out:
        config = harness.SweepConfig(**{**config.to_dict(), "output_path": args.out})
    workers = args.workers if args.workers else _default_workers()
    result = harness.run_sweep(config, workers=workers)
    summary = result.summary
    print(f"records: {summary['records']}")
    print(f"non-advisory violations: {summary['violation_total']} {summary['violations']}")
    print(f"advisory: {summary['advisory']}")
    print(f"solver failures: {summary['solver_failures']}")
    if config.output_path:
        print(f"csv: {config.output_path}")
    else:
        sys.stdout.write(result.to_csv())
    return EXIT_OK


def cmd_verify(args) -> int:
    results = acceptance.run_all(quick=args.quick)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_FAIL


# Figure id -> (family, N, ratio column, bound columns to overlay)
FIGURE_SWEEPS = {
    2: ("linear", 5, "r1", ["lb1", "ub1"]),
    3: ("linear", 5, "r2", ["lb2", "ub2_adv"]),
    4: ("linear", 5, "r3", ["lb3", "ub3"]),
    5: ("linear", 5, "r4", ["lb4"]),
    6: ("linear", 5, "r5", ["lb5", "ub5"]),
    7: ("linear", 5, "r6", ["lb6"]),
    8: ("linear", 100, "r1", ["lb1", "ub1"]),
    10: ("logarithmic", 5, "r1", ["lb1"]),
    11: ("logarithmic", 5, "r2", ["lb2"]),
    12: ("logarithmic", 5, "r3", ["lb3"]),
    13: ("logarithmic", 5, "r4", ["lb4"]),
}

FIG9_HEADER = "M,theta,N,x_benign,x_malicious,su,sv,sw,v0,benign_net"
FIGURES_SEED = 20240817


def _fig9_rows(N: int = 20, theta: float = 2.0):
    rows = []
    for M in range(1, N + 1):
        inst = ContestInstance.create(
            [("linear", 1.0)] * N, theta=theta, targeted=[i < M for i in range(N)]
        )
        res = solve_linear_ne(inst)
        m = compute_measures(inst, res.profile)
        f = bnd.format_float
        rows.append(
            ",".join(
                [
                    str(M),
                    f(theta),
                    str(N),
                    f(res.profile.x[1]),
                    f(res.profile.x[0]),
                    f(m.su),
                    f(m.sv),
                    f(m.sw),
                    f(m.v0),
                    f(m.per_agent_v[0]),
                ]
            )
        )
    return rows


def cmd_figures_data(args) -> int:
    fig = args.figure
    if fig not in FIGURE_SWEEPS and fig != 9:
        raise UsageError(f"unknown figure id {fig}; expected 2..13")
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, f"fig{fig:02d}.csv")
    cfg_path = os.path.join(args.out_dir, f"fig{fig:02d}.config.json")

    if fig == 9:
        rows = _fig9_rows()
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(FIG9_HEADER + "\n" + "\n".join(rows) + "\n")
        config = {
            "figure": 9,
            "kind": "targeting-grid",
            "n": 20,
            "theta": 2.0,
            "m_range": [1, 20],
            "csv": csv_path,
            "x_column": "M",
            "y_columns": ["v0", "benign_net"],
        }
    else:
        family, n, ratio, bound_cols = FIGURE_SWEEPS[fig]
        default_instances = 200 if family == "linear" else 50
        instances = args.instances or default_instances
        sweep = harness.SweepConfig(
            n=n,
            theta_start=0.0,
            theta_stop=3.0,
            theta_step=0.05,
            instances_per_theta=instances,
            rng_seed=args.seed,
            utility_family=family,
            output_path=csv_path,
        )
        workers = args.workers if args.workers else _default_workers()
        result = harness.run_sweep(sweep, workers=workers)
        config = {
            "figure": fig,
            "kind": "ratio-scatter",
            "sweep": sweep.to_dict(),
            "csv": csv_path,
            "x_column": "theta",
            "ratio_column": ratio,
            "bound_columns": bound_cols,
            "advisory_columns": [c for c in bound_cols if c.endswith("_adv")],
            "violations": result.summary["violation_total"],
        }
    with open(cfg_path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
        fh.write("\n")
    print(csv_path)
    print(cfg_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timeline-contest",
        description="Adversarial timeline contest: equilibria, optima, and efficiency bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance JSON file")
    p.add_argument("instance", help="path to the instance JSON")
    p.add_argument("--method", choices=["auto", "closed", "iterative"], default="auto")
    p.add_argument("--json-out", help="write the result JSON here instead of stdout")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("bounds", help="print the bound table for (N, theta)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float)
    p.add_argument("--theta-grid", help="start:stop:step")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config JSON")
    p.add_argument("config", help="path to the sweep config JSON")
    p.add_argument("--out", help="override the config's output path")
    p.add_argument("--workers", type=int, default=0, help="0 = use available parallelism")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true", help="reduced sample sizes (plumbing check only)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("figures-data", help="emit the sweep config and CSV behind one figure")
    p.add_argument("--figure", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--instances", type=int, default=0, help="instances per theta (0 = default)")
    p.add_argument("--seed", type=int, default=FIGURES_SEED)
    p.add_argument("--workers", type=int, default=0)
    p.set_defaults(fn=cmd_figures_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (UsageError, DomainError, StructuralError, RegimeError, FileNotFoundError) as e:
        # Bad inputs or malformed files are usage errors.
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ContestError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
