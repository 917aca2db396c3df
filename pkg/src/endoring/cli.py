"""Command-line front end.

Subcommands: compute (full pipeline on a problem file), btt (tree
utilities), divide-params (division-test parameter planner).  Exit
codes: 0 success, 2 parse error, 3 mathematical inconsistency, 4 oracle
precondition violation.
"""

import argparse
import json
import os
import sys

from . import btt
from .divide import HiddenOrderOracle, plan_division
from .errors import (
    MathematicalInconsistencyError,
    OraclePreconditionError,
    ParseError,
    PrecisionError,
)
from .pipeline import TraceLog, compute_endomorphism_ring
from .serialize import load_problem, result_to_json


def _parse_path(q: int, spec: str) -> btt.MatrixPath:
    spec = spec.strip()
    if spec in ("", "-", "root"):
        return btt.MatrixPath(q, ())
    steps = []
    for tok in spec.split(","):
        tok = tok.strip()
        if tok == "inf":
            steps.append(q)
        else:
            try:
                steps.append(int(tok))
            except ValueError:
                raise ParseError(f"bad path step {tok!r}") from None
    try:
        return btt.MatrixPath(q, tuple(steps))
    except Exception as exc:
        raise ParseError(f"bad path {spec!r}: {exc}") from None


def cmd_compute(args) -> int:
    order, fact, hidden, options = load_problem(args.input)
    if hidden is None:
        raise ParseError("compute requires an oracle section in the problem file")
    if args.precision_override is not None and args.precision_override < 0:
        raise ParseError("precision override must be nonnegative")
    oracle = HiddenOrderOracle(hidden)
    log = TraceLog()
    end, sols, calls = compute_endomorphism_ring(
        order, fact, oracle, log, parallel=args.parallel_primes
    )
    result = result_to_json(end, sols, calls, deterministic=args.deterministic)
    text = json.dumps(result, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    trace_path = args.trace or options.get("trace")
    if trace_path:
        with open(trace_path, "w") as fh:
            for ev in log.events:
                fh.write(json.dumps(ev) + "\n")
    dot_dir = args.dot_dir or options.get("dot_dir")
    if dot_dir:
        os.makedirs(dot_dir, exist_ok=True)
        for q, src in log.dot_sources().items():
            with open(os.path.join(dot_dir, f"explored_q{q}.dot"), "w") as fh:
                fh.write(src + "\n")
    return 0


def cmd_btt(args) -> int:
    q = args.q
    if args.subcommand == "distance":
        v1 = btt.vertex_of_path(_parse_path(q, args.paths[0]))
        v2 = btt.vertex_of_path(_parse_path(q, args.paths[1]))
        print(btt.distance(v1, v2))
    elif args.subcommand == "d3":
        verts = [btt.vertex_of_path(_parse_path(q, s)) for s in args.paths]
        print(btt.d3(verts))
    elif args.subcommand == "ball":
        center = btt.vertex_of_path(_parse_path(q, args.center))
        for v in btt.ball(center, args.radius):
            print(f"{v.a},{v.b},{v.c}")
    elif args.subcommand == "dot":
        center = btt.vertex_of_path(_parse_path(q, args.center))
        print(btt.dot_graph(btt.ball(center, args.radius), title=f"ball_q{q}_r{args.radius}"))
    else:
        raise ParseError(f"unknown btt subcommand {args.subcommand!r}")
    return 0


def cmd_divide_params(args) -> int:
    plan = plan_division(args.deg_beta, args.n, args.p)
    if plan is None:
        print(f"divisibility precheck failed: {args.n}^2 does not divide {args.deg_beta}")
        print("verdict: not divisible (no further work needed)")
        return 0
    print(f"N = {plan.N}")
    print(f"a = {plan.a}  (N+a = {plan.N + plan.a})")
    print(f"four_squares = {plan.four_squares}")
    print(f"B = {plan.B}")
    print(f"M = {plan.M}")
    print("alpha_matrix =")
    for row in plan.alpha_matrix:
        print("  " + " ".join(f"{x:6d}" for x in row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="endoring")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="run the full endomorphism-ring pipeline")
    pc.add_argument("--input", required=True)
    pc.add_argument("--output")
    pc.add_argument("--oracle", help="problem file path holding only the oracle (optional)")
    pc.add_argument("--trace")
    pc.add_argument("--dot-dir")
    pc.add_argument("--precision-override", type=int, default=None)
    pc.add_argument("--deterministic", action="store_true")
    pc.add_argument("--parallel-primes", action="store_true")
    pc.set_defaults(func=cmd_compute)

    pb = sub.add_parser("btt", help="Bruhat-Tits tree utilities")
    pb.add_argument("subcommand", choices=["distance", "d3", "ball", "dot"])
    pb.add_argument("q", type=int)
    pb.add_argument("--center", default="-")
    pb.add_argument("--radius", type=int, default=2)
    pb.add_argument("paths", nargs="*", help="comma-separated steps, 'inf' allowed, '-' for the root")
    pb.set_defaults(func=cmd_btt)

    pd = sub.add_parser("divide-params", help="division-test parameter plan")
    pd.add_argument("deg_beta", type=int)
    pd.add_argument("n", type=int)
    pd.add_argument("p", type=int)
    pd.set_defaults(func=cmd_divide_params)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MathematicalInconsistencyError, PrecisionError) as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 3
    except OraclePreconditionError as exc:
        print(f"oracle precondition violated: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
