"""Command-line front end.

Exit status: 0 when every verdict passes or is skipped, 1 when any verdict
fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys

from .chain import DEFAULT_MAX_STATES
from .errors import ChainError, SolverError
from .report import dumps, to_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _csv_ints(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _eps_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None
    if not values or any(not 0 < v < 1 for v in values):
        raise argparse.ArgumentTypeError("every epsilon must lie in (0, 1)")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=_eps_list, default=(0.25, 0.01),
                        help="comma-separated epsilons for the mixing-time bound (default 0.25,0.01)")
    common.add_argument("--exact-mixing", action="store_true",
                        help="also compute the exact worst-start TV mixing time")
    common.add_argument("--lazy", action="store_true", help="also analyse the lazy chain (I+P)/2")
    common.add_argument("--report", metavar="PATH", help="write the JSON report here")
    common.add_argument("--csv", metavar="PATH", help="write one CSV row per instance here")
    common.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES,
                        help=f"state-space cap (default {DEFAULT_MAX_STATES})")

    parser = argparse.ArgumentParser(
        prog="oddwalk",
        description="Smallest-eigenvalue bounds from canonical odd walks, checked exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("switch", parents=[common], help="switch chain on d-regular graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)

    p = sub.add_parser("matchings", parents=[common], help="perfect/near-perfect matchings chain")
    p.add_argument("--graph", required=True, metavar="PATH",
                   help="host graph file: 'n m' then m lines 'u v' (1-based)")

    p = sub.add_parser("contingency", parents=[common], help="heat-bath contingency table chain")
    p.add_argument("--rows", type=_csv_ints, required=True)
    p.add_argument("--cols", type=_csv_ints, required=True)

    p = sub.add_parser("random", parents=[common], help="sweep over random reversible chains")
    p.add_argument("--states", type=int, required=True, help="largest state count per chain")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    return parser


def run_command(args) -> dict:
    options = {"eps": args.eps, "exact_mixing": args.exact_mixing, "lazy": args.lazy}
    if args.command == "switch":
        from .switch import switch_analysis

        return switch_analysis(args.n, args.d, max_states=args.max_states, **options)
    if args.command == "matchings":
        from .matchings import matchings_analysis, read_graph

        return matchings_analysis(read_graph(args.graph), max_states=args.max_states, **options)
    if args.command == "contingency":
        from .contingency import Margins, contingency_analysis

        return contingency_analysis(Margins(args.rows, args.cols),
                                    max_states=args.max_states, **options)
    from .analysis import random_sweep

    return random_sweep(args.states, args.trials, args.seed, **options)


def _all_verdicts(report: dict):
    for name, v in report.get("checks", {}).items():
        yield name, v
    for name, v in report.get("oracle", {}).get("checks", {}).items():
        yield "oracle." + name, v


def _print_summary(report: dict, out) -> None:
    desc = report["descriptor"]
    params = " ".join(f"{k}={v}" for k, v in desc["params"].items() if k != "edges")
    print(f"{desc['family']} {params} N={desc['N']}", file=out)
    if "spectrum" in report:
        s, w = report["spectrum"], report["walkset"]
        print(f"  lambda_1={s['lambda_1']:.12g} lambda_min={s['lambda_min']:.12g} "
              f"eta={w['eta']} lengths={w['length_histogram']}", file=out)
    for name, v in _all_verdicts(report):
        line = f"  {v['status']:<7} {name}"
        if v["reason"]:
            line += f": {v['reason']}"
        print(line, file=out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_states < 1:
        parser.error("--max-states must be positive")
    try:
        report = run_command(args)
    except (ChainError, OSError) as exc:
        print(f"oddwalk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"oddwalk {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL

    _print_summary(report, sys.stdout)
    instances = report["trials"] if args.command == "random" else [report]
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(dumps(report))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(to_csv(instances, args.eps))

    statuses = [v["status"] for _, v in _all_verdicts(report)]
    for trial in report.get("trials", []):
        statuses += [v["status"] for _, v in _all_verdicts(trial)]
    return EXIT_FAIL if "fail" in statuses else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
