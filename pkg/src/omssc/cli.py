"""Command line entry point: ``omssc run | gen-trace | verify-identities | bound``."""
from __future__ import annotations

import argparse
import math
import sys
import time
from fractions import Fraction

from .adversaries import random_trace
from .core import CapacityError, InvalidInputError, RequestSet, access_costs_all
from .harness import ORACLES, RunConfig, parse_params, run
from .io import dumps_trace, report_csv, report_json, write_report, write_trace
from .oracles import average_access, count_perms_with_cost, theorem1_bound


def _cmd_run(args) -> int:
    oracles = tuple(o for o in args.oracle if o != "none") if args.oracle else ("static",)
    config = RunConfig(
        algorithm=args.alg,
        source=args.source,
        n=args.n,
        r=args.r,
        m=args.m,
        seed=args.seed,
        alg_params=parse_params(args.alg_param),
        audits=args.audits,
        oracles=oracles,
        cap=args.cap,
    )
    report = run(config)
    if args.out:
        write_report(report, args.out, args.format)
    else:
        sys.stdout.write(report_json(report) if args.format == "json" else report_csv(report))
    if args.trace_out:
        write_trace(report.trace, args.trace_out)

    led = report.ledger
    print(
        f"{config.algorithm}: m={len(led)} access={led.total_access} moving={led.total_moving} "
        f"cost={led.total}",
        file=sys.stderr,
    )
    for name, ratio in report.ratios.items():
        print(f"  ratio vs {name}: {ratio:.4f} (oracle cost {report.oracle_costs[name]})", file=sys.stderr)
    for audit in report.audits:
        status = "PASS" if audit.passed else "FAIL"
        print(f"  audit {audit.name}: {status} worst margin {audit.worst_margin:.6g} over {audit.checks}",
              file=sys.stderr)
    if args.audits == "strict" and not report.passed:
        return 1
    return 0


def _cmd_gen_trace(args) -> int:
    trace = random_trace(args.n, args.r, args.m, args.seed)
    if args.out:
        write_trace(trace, args.out)
    else:
        sys.stdout.write(dumps_trace(trace))
    return 0


def verify_identities(n_max: int, out=sys.stdout) -> bool:
    """Check the permutation-counting identities against brute force, n <= n_max."""
    ok = True
    for n in range(1, n_max + 1):
        for r in range(1, n // 2 + 1):
            counts = [count_perms_with_cost(n, r, i) for i in range(1, n - r + 2)]
            total_ok = sum(counts) == math.factorial(n)
            costs = access_costs_all(n, RequestSet(tuple(range(1, r + 1))), max(8, n))
            mean = Fraction(int(costs.sum()), math.factorial(n))
            mean_ok = mean == average_access(n, r) == Fraction(n + 1, r + 1)
            ok &= total_ok and mean_ok
            print(
                f"n={n} r={r}: sum counts {'==' if total_ok else '!='} n!  "
                f"mean access {mean} {'==' if mean_ok else '!='} {Fraction(n + 1, r + 1)}",
                file=out,
            )
    return ok


def _cmd_verify(args) -> int:
    start = time.perf_counter()
    ok = verify_identities(args.n_max)
    print(f"{'all identities hold' if ok else 'IDENTITY FAILURE'} ({time.perf_counter() - start:.2f}s)")
    return 0 if ok else 1


def _cmd_bound(args) -> int:
    n, r = args.theorem1
    b = theorem1_bound(n, r)
    print(f"theorem1_bound(n={n}, r={r}) = {b} = {float(b):.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omssc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one algorithm against a trace or adversary")
    p.add_argument("--alg", required=True)
    p.add_argument("--alg-param", action="append", default=[], metavar="K=V")
    p.add_argument("--source", required=True, help="trace:<path> | adv:<id>[,k=v...] | random | planted")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--audits", choices=("off", "on", "strict"), default="on")
    p.add_argument("--oracle", action="append", choices=ORACLES + ("none",))
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--trace-out", help="write the realized request sequence here")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("gen-trace", help="write a seeded random r-uniform trace")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen_trace)

    p = sub.add_parser("verify-identities", help="check the permutation-counting identities")
    p.add_argument("--n-max", type=int, default=8)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bound", help="evaluate a closed-form bound")
    p.add_argument("--theorem1", nargs=2, type=int, metavar=("N", "R"), required=True)
    p.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
