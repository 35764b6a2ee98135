"""Command-line front end for scenario-driven runs.

Subcommands mirror the scenario kinds (`relations`, `measure`, `amplify`,
`sterngerlach`, `sweep`) plus `selftest`, which runs the built-in acceptance
suite.  Exit codes: 0 success, 1 input/schema error, 2 runtime invariant
violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import scenarios, selfcheck
from .sterngerlach import SolverError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2


def _add_common(sub):
    sub.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    sub.add_argument("--out", default=".", help="output directory (default: cwd)")
    sub.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sub.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmamp",
        description="measurement couplings, amplification cascades, and Stern-Gerlach runs",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for kind in scenarios.KINDS:
        sub = subs.add_parser(kind, help=f"run a '{kind}' scenario")
        _add_common(sub)
    subs.add_parser("selftest", help="run the acceptance suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "selftest":
        ok = selfcheck.run_all()
        return EXIT_OK if ok else EXIT_INVARIANT

    try:
        scenario = scenarios.load_scenario(args.scenario)
        if scenario["kind"] != args.command:
            raise scenarios.ScenarioError(
                f"field 'kind': scenario is '{scenario['kind']}', invoked as '{args.command}'"
            )
        if args.seed is not None:
            scenario["seed"] = args.seed
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "relations":
            paths = scenarios.run_relations(scenario, out_dir)
        elif args.command == "measure":
            paths = scenarios.run_measure(scenario, out_dir)
        elif args.command == "amplify":
            paths = scenarios.run_amplify(scenario, out_dir)
        elif args.command == "sterngerlach":
            paths = scenarios.run_sterngerlach(scenario, out_dir)
        else:
            paths = scenarios.run_sweep(scenario, out_dir, jobs=args.jobs)
    except scenarios.ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, ValueError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
