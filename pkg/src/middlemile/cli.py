"""Command-line front end: ``middlemile {gen,plan,oracle-compare,validate,report}``.

Exit codes: 0 ok, 1 a check failed, 2 bad input, 3 infeasible instance,
4 generation failed.
"""

from __future__ import annotations

import argparse
import glob
import json
import logging
import math
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from middlemile import instances
from middlemile.analysis import bound_report, build_worst_chain, worst_chain_hub_distance
from middlemile.checks import validate_plan
from middlemile.cnd import plan_capacity
from middlemile.defaults import DEFAULT_RADIO
from middlemile.generate import OB_MODELS, GenerationError, GenParams, generate_instance, parse_range
from middlemile.hybrid import PASS_ORDERS
from middlemile.model import InconsistencyError, InfeasibleInstance, InstanceError
from middlemile.oracle import OracleRefused, brute_force_steiner_tc
from middlemile.plan import dumps_plan, run_pipeline, to_document
from middlemile.steiner_tc import steiner_tc_solve

LOG_ENV = "MIDDLEMILE_LOG"

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_GEN = 0, 1, 2, 3, 4

log = logging.getLogger("middlemile")


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load(path: str):
    inst = instances.load(path)
    instances.check_feasible(inst)
    return inst


def cmd_gen(args: argparse.Namespace) -> int:
    if args.chain:
        a, b = args.terminals, args.non_terminals
        try:
            lo_a, hi_a = parse_range(a)
            lo_b, hi_b = parse_range(b)
            if lo_a != hi_a or lo_b != hi_b:
                raise ValueError("--chain needs exact --terminals and --non-terminals")
            inst = build_worst_chain(lo_a, lo_b, args.gamma, args.demand)
        except ValueError as exc:
            log.error("%s", exc)
            return EXIT_INPUT
        _write(instances.dumps(inst), args.output)
        return EXIT_OK

    try:
        radio = DEFAULT_RADIO
        if args.capacity is not None:
            radio = replace(radio, U=args.capacity)
        params = GenParams(
            terminals=parse_range(args.terminals),
            non_terminals=parse_range(args.non_terminals),
            area=args.area,
            demand=parse_range(args.demand_range, float),
            ob_model=args.ob_model,
            ob_range=parse_range(args.ob_range, float),
            radio=radio,
            height_step=args.height_step,
            attempts=args.attempts,
        )
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT

    if args.count == 1:
        try:
            inst = generate_instance(args.seed, params)
        except GenerationError as exc:
            log.error("%s", exc)
            return EXIT_GEN
        _write(instances.dumps(inst), args.output)
        return EXIT_OK

    if not args.output or args.output == "-":
        log.error("--count > 1 needs -o DIR")
        return EXIT_INPUT
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    width = len(str(args.count - 1))
    for i in range(args.count):
        try:
            inst = generate_instance(args.seed + i, params)
        except GenerationError as exc:
            log.error("%s", exc)
            return EXIT_GEN
        instances.save(inst, out / f"inst-{i:0{width}d}.json")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    inst = _load(args.instance)
    if args.height_step is not None:
        inst = replace(inst, height_step=args.height_step)
        problems = instances.validate_instance(inst)
        if problems:
            raise InstanceError(problems)
    doc = to_document(run_pipeline(inst, args.hybrid), trace=args.trace)
    _write(dumps_plan(doc), args.output)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    inst = instances.load(args.instance)
    try:
        doc = json.loads(Path(args.plan).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        log.error("%s: not valid JSON (%s)", args.plan, exc)
        return EXIT_INPUT
    problems = validate_plan(inst, doc)
    for line in problems:
        print(f"FAIL {line}")
    if problems:
        return EXIT_CHECK
    print("OK")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    inst = _load(args.instance)
    rep = bound_report(inst)
    print(f"terminals |A| = {rep.a}, relays |B| = {rep.b}")
    gamma = "n/a" if rep.gamma is None else f"{rep.gamma:g}"
    print(f"case {rep.case}, gamma = {gamma}, ratio bound = {rep.ratio:.4f}")
    if args.chain_gamma is not None:
        try:
            print(f"worst chain hub distance = {worst_chain_hub_distance(rep.a, rep.b, args.chain_gamma)}")
        except ValueError as exc:
            log.warning("%s", exc)
    sol = steiner_tc_solve(inst)
    cap = plan_capacity(inst, sol.tree)
    print(f"greedy tower cost = {sol.tower_cost(inst):g}, hub hops = {cap.hub_distance_total}")
    return EXIT_OK


def cmd_oracle_compare(args: argparse.Namespace) -> int:
    paths: list[str] = []
    for pattern in args.instances:
        hits = sorted(glob.glob(pattern))
        paths.extend(hits or [pattern])
    start = time.perf_counter()
    failed = skipped = passed = 0
    print(f"{'instance':<32} {'|A|':>3} {'greedy':>10} {'oracle':>10} {'ratio':>7} {'bound':>7}  result")
    for path in paths:
        name = Path(path).name
        try:
            inst = _load(path)
            oracle = brute_force_steiner_tc(inst, args.max_space)
        except (OracleRefused, InfeasibleInstance, InstanceError, OSError) as exc:
            log.warning("%s skipped: %s", path, exc)
            print(f"{name:<32} {'':>3} {'':>10} {'':>10} {'':>7} {'':>7}  SKIP")
            skipped += 1
            continue
        greedy = steiner_tc_solve(inst).tower_cost(inst)
        a = len(inst.terminals)
        bound = max(1.0, 2 * math.log(a))
        ok = oracle.tower_cost <= greedy <= bound * oracle.tower_cost
        ratio = greedy / oracle.tower_cost if oracle.tower_cost else 1.0
        print(
            f"{name:<32} {a:>3} {greedy:>10g} {oracle.tower_cost:>10g} {ratio:>7.4f} {bound:>7.4f}  "
            f"{'PASS' if ok else 'FAIL'}"
        )
        passed += ok
        failed += not ok
    print(f"{passed} passed, {failed} failed, {skipped} skipped in {time.perf_counter() - start:.1f}s")
    return EXIT_CHECK if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="middlemile", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1, help="number of instances (seeds seed..seed+count-1)")
    g.add_argument("--terminals", default="4-6", help="terminal count incl. landline, N or LO-HI")
    g.add_argument("--non-terminals", default="0-4", help="relay count, N or LO-HI")
    g.add_argument("--area", type=float, default=12000.0, help="side of the square area (m)")
    g.add_argument("--demand-range", default="5-40", help="terminal demand range (Mbps)")
    g.add_argument("--capacity", type=float, default=None, help="link capacity U")
    g.add_argument("--ob-model", choices=OB_MODELS, default="uniform")
    g.add_argument("--ob-range", default="5-30", help="obstruction height range (m)")
    g.add_argument("--height-step", type=float, default=5.0)
    g.add_argument("--attempts", type=int, default=200)
    g.add_argument("--chain", action="store_true", help="emit the worst-case chain instead")
    g.add_argument("--gamma", type=int, default=2)
    g.add_argument("--demand", type=float, default=10.0)
    g.add_argument("-o", "--output", default=None, help="file (or directory with --count)")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("plan", help="run the planning pipeline")
    p.add_argument("instance")
    p.add_argument("--hybrid", choices=list(PASS_ORDERS), default="mp,omni")
    p.add_argument("--trace", action="store_true", help="include the greedy iteration trace")
    p.add_argument("--height-step", type=float, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_plan)

    o = sub.add_parser("oracle-compare", help="greedy vs exhaustive tower cost")
    o.add_argument("instances", nargs="+", help="files or glob patterns")
    o.add_argument("--max-space", type=int, default=1_000_000)
    o.set_defaults(func=cmd_oracle_compare)

    v = sub.add_parser("validate", help="re-check a plan against its instance")
    v.add_argument("instance")
    v.add_argument("plan")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("report", help="bound report for an instance")
    r.add_argument("instance")
    r.add_argument("--chain-gamma", type=int, default=None)
    r.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get(LOG_ENV, "WARNING").upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InstanceError as exc:
        for line in exc.problems:
            log.error("%s", line)
        return EXIT_INPUT
    except (InconsistencyError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except InfeasibleInstance as exc:
        log.error("infeasible: %s", exc)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
