"""Batch front-end: run scenario files, reproduce built-in cases.

Exit codes: 0 all assertions pass, 1 assertion failure, 2 input error,
3 capacity error.
"""

from __future__ import annotations

import argparse
import sys

from .config import DEFAULT_TOLS, Tolerances
from .errors import BranchkitError, CapacityError, ScenarioFormatError
from .registry import available_cases, reproduce_case, run_scenario
from .report import Report, emit_structured, emit_text
from .scenario_files import load_scenario

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override a named tolerance (repeatable)")
    common.add_argument("--format", choices=["text", "structured"], default="text",
                        help="report output format")
    common.add_argument("--seed", type=int, default=2718,
                        help="seed for randomized checks")

    parser = argparse.ArgumentParser(
        prog="branchkit",
        description="Density-matrix branching and credence-derivation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", parents=[common], help="run a scenario file")
    run_p.add_argument("file", help="path to a scenario JSON document")
    rep_p = sub.add_parser("reproduce", parents=[common],
                           help="run one built-in case, or all of them")
    rep_p.add_argument("case_id", help="a case id, or 'all'")
    rep_p.add_argument("--list", action="store_true", dest="list_cases",
                       help="list available case ids and exit")
    return parser


def _parse_tolerances(pairs: list[str]) -> Tolerances:
    overrides: dict[str, float | int] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise ScenarioFormatError(f"tolerance override {pair!r} is not NAME=VALUE",
                                      location="--tol")
        try:
            overrides[name] = int(value) if name == "max_dim" else float(value)
        except ValueError:
            raise ScenarioFormatError(f"tolerance value {value!r} is not numeric",
                                      location=f"--tol {name}") from None
    return DEFAULT_TOLS.override(**overrides) if overrides else DEFAULT_TOLS


def _emit(reports: list[Report], fmt: str, out) -> None:
    if fmt == "structured":
        if len(reports) == 1:
            out.write(emit_structured(reports[0]) + "\n")
        else:
            out.write("[\n" + ",\n".join(emit_structured(r) for r in reports) + "\n]\n")
    else:
        for r in reports:
            out.write(emit_text(r))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        tols = _parse_tolerances(args.tol)
        if args.command == "run":
            scenario = load_scenario(args.file)
            reports = [run_scenario(scenario, seed=args.seed, tols=tols)]
        else:
            if getattr(args, "list_cases", False):
                for case_id in available_cases():
                    out.write(f"{case_id}\n")
                return EXIT_OK
            if args.case_id == "all":
                reports = [reproduce_case(cid, seed=args.seed, tols=tols)
                           for cid in available_cases()]
            else:
                reports = [reproduce_case(args.case_id, seed=args.seed, tols=tols)]
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ScenarioFormatError, BranchkitError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    _emit(reports, args.format, out)
    failed = [r.scenario_id for r in reports if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
