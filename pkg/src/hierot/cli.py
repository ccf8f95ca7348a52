"""Command-line front end.

Commands: ``distance``, ``geodesic``, ``flow``, ``check``.  Exit codes:
0 success, 2 schema/validation error, 3 level mismatch, 4 check failure.
Outputs are byte-deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import checks
from .errors import HierotError, LevelMismatch, SchemaError
from .functionals import gradient_descent
from .geodesics import interpolate, optimal_velocity_plan
from .plans import plan_norm
from .serialization import (dumps, format_float, functional_spec_from_obj,
                            load_measure, plan_to_obj, save_measure)
from .wasserstein import opt_hier_plan, plan_summary, w2

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_LEVEL = 3
EXIT_CHECK = 4


def cmd_distance(args) -> int:
    a = load_measure(args.a)
    b = load_measure(args.b)
    out = {"w2": w2(a, b)}
    if a.level >= 1:
        hp = opt_hier_plan(a, b)
        out["plan_summary"] = plan_summary(hp)
    if args.plan:
        gamma = optimal_velocity_plan(a, b)
        Path(args.plan).write_text(dumps(plan_to_obj(gamma)))
    sys.stdout.write(dumps(out))
    return EXIT_OK


def cmd_geodesic(args) -> int:
    a = load_measure(args.a)
    b = load_measure(args.b)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    gamma = optimal_velocity_plan(a, b)
    dist = w2(a, b)
    steps = args.steps
    rows = ["t,w2_to_start,w2_to_end,speed_deviation"]
    worst = 0.0
    for i in range(steps + 1):
        t = i / steps
        mu_t = interpolate(gamma, t)
        save_measure(mu_t, outdir / f"geodesic_{i:04d}.json")
        d0 = w2(mu_t, a)
        d1 = w2(mu_t, b)
        dev = max(abs(d0 - t * dist), abs(d1 - (1.0 - t) * dist))
        worst = max(worst, dev)
        rows.append(",".join(format_float(x) for x in (t, d0, d1, dev)))
    (outdir / "geodesic.csv").write_text("\n".join(rows) + "\n")
    sys.stdout.write(dumps({"w2": dist, "max_deviation": worst,
                            "files": steps + 1}))
    return EXIT_OK if worst <= args.tolerance else EXIT_CHECK


def cmd_flow(args) -> int:
    mu0 = load_measure(args.init)
    try:
        spec_obj = json.loads(Path(args.spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {args.spec}: {exc}") from exc
    spec = functional_spec_from_obj(spec_obj, mu0.manifold, mu0.level)
    trace = gradient_descent(spec, mu0, args.tau, args.iters)
    rows = ["step,value,step_norm"]
    for s in trace.steps:
        rows.append(",".join([str(s.index), format_float(s.value),
                              format_float(s.step_norm)]))
    Path(args.trace).write_text("\n".join(rows) + "\n")
    if args.final:
        save_measure(trace.steps[-1].measure, args.final)
    sys.stdout.write(dumps({"iters": args.iters,
                            "initial_value": trace.steps[0].value,
                            "final_value": trace.steps[-1].value}))
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = checks.CheckConfig(samples=args.samples)
    report = checks.run_suite(args.suite, args.seed, cfg)
    text = dumps(report)
    if args.report:
        Path(args.report).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hierot",
        description="hierarchical optimal transport over euclidean space "
                    "and the sphere")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distance", help="w2 distance between two measure files")
    d.add_argument("a")
    d.add_argument("b")
    d.add_argument("--plan", default=None,
                   help="write the optimal velocity plan to this JSON file")
    d.set_defaults(fn=cmd_distance)

    g = sub.add_parser("geodesic", help="sample the geodesic between two measures")
    g.add_argument("a")
    g.add_argument("b")
    g.add_argument("--steps", type=int, default=10)
    g.add_argument("--out", required=True)
    g.add_argument("--tolerance", type=float, default=1e-8)
    g.set_defaults(fn=cmd_geodesic)

    f = sub.add_parser("flow", help="explicit gradient descent of a functional")
    f.add_argument("--spec", required=True)
    f.add_argument("--init", required=True)
    f.add_argument("--tau", type=float, default=0.1)
    f.add_argument("--iters", type=int, default=100)
    f.add_argument("--trace", required=True)
    f.add_argument("--final", default=None,
                   help="write the final measure to this JSON file")
    f.set_defaults(fn=cmd_flow)

    c = sub.add_parser("check", help="run the invariant suites")
    c.add_argument("--suite", default="all",
                   choices=["all", "metric", "coupling", "geodesic", "calculus"])
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--samples", type=int, default=6)
    c.add_argument("--report", default=None)
    c.set_defaults(fn=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except LevelMismatch as exc:
        sys.stderr.write(f"level mismatch: {exc}\n")
        return EXIT_LEVEL
    except (SchemaError, HierotError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
