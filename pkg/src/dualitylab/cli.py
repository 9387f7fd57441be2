"""Command line entry point: the `verify` scenario runner.

Exit codes: 0 when every check in the run passed, 1 when any check
failed, 2 on configuration or input errors.  Batch mode runs one
scenario per line of the batch file, concurrently up to
DUALITYLAB_THREADS workers, each writing its own report.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

from .engine import thread_count
from .nilpotent import GradingError, MembershipError, NoSl2Error, PartitionParityError
from .normality import NormalityLookupError
from .reports import ExperimentReport
from .scenarios import ConfigError, ScenarioConfig, list_scenarios, run_scenario

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verify",
        description="Run exact-arithmetic verification scenarios for "
                    "centralizer algebras on tensor powers of classical "
                    "formed spaces.")
    parser.add_argument("--scenario", help="registered scenario name")
    parser.add_argument("--list-scenarios", action="store_true",
                        help="print the scenario registry and exit")
    parser.add_argument("--family", default="sp",
                        choices=["so", "so-odd", "so-even", "sp", "gl"],
                        help="classical family (so infers parity from the partition)")
    parser.add_argument("--rank", type=int, default=2,
                        help="rank r (dim V = 2r+1 / 2r / 2r / r)")
    parser.add_argument("--partition", type=_partition_arg, default=None,
                        help="Jordan partition, e.g. 2,1,1")
    parser.add_argument("--d", type=int, default=2, help="tensor degree")
    parser.add_argument("--field", default="prime", dest="field_spec",
                        help="rational | prime | prime:P")
    parser.add_argument("--normalization", default="trace",
                        choices=["trace", "killing"])
    parser.add_argument("--normality-table", default=None,
                        help="path to an orbit-closure normality table")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (u64)")
    parser.add_argument("--report", default=None, dest="report_path",
                        help="write the JSON report here")
    parser.add_argument("--h-diag", type=_partition_arg, default=None,
                        help="override grading element diagonal, e.g. 3,1")
    parser.add_argument("--instances", type=int, default=200,
                        help="randomized instance count for trace-identities")
    parser.add_argument("--batch", default=None,
                        help="file of verify argument lines, run concurrently")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the human-readable summary")
    return parser


def _partition_arg(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    if not args.scenario:
        raise ConfigError("--scenario is required (or use --list-scenarios)")
    return ScenarioConfig(
        scenario=args.scenario,
        family=args.family,
        rank=args.rank,
        partition=args.partition,
        d=args.d,
        field_spec=args.field_spec,
        normalization=args.normalization,
        normality_table=args.normality_table,
        seed=args.seed,
        report_path=args.report_path,
        h_diag=args.h_diag,
        instances=args.instances,
    )


def _run_single(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
        report = run_scenario(config)
    except (ConfigError, NormalityLookupError, PartitionParityError,
            MembershipError, NoSl2Error, GradingError, ValueError) as exc:
        print(f"verify: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    if not args.quiet:
        print(report.to_text())
    return EXIT_PASS if report.passed else EXIT_CHECK_FAILED


def _run_batch(parser: argparse.ArgumentParser, batch_path: str,
               quiet: bool) -> int:
    try:
        with open(batch_path) as handle:
            lines = [ln.strip() for ln in handle
                     if ln.strip() and not ln.strip().startswith("#")]
    except OSError as exc:
        print(f"verify: cannot read batch file: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    configs: List[ScenarioConfig] = []
    for lineno, line in enumerate(lines, start=1):
        try:
            sub = parser.parse_args(shlex.split(line))
            if sub.batch:
                raise ConfigError("nested --batch is not allowed")
            configs.append(_config_from_args(sub))
        except SystemExit:
            print(f"verify: batch line {lineno} failed to parse: {line!r}",
                  file=sys.stderr)
            return EXIT_CONFIG_ERROR
        except ConfigError as exc:
            print(f"verify: batch line {lineno}: {exc}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
    worst = EXIT_PASS
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        futures = [(cfg, pool.submit(_safe_run, cfg)) for cfg in configs]
        for cfg, fut in futures:
            code, report = fut.result()
            worst = max(worst, code)
            if report is not None and not quiet:
                print(report.to_text())
                print()
    return worst


def _safe_run(config: ScenarioConfig):
    try:
        report = run_scenario(config)
    except (ConfigError, NormalityLookupError, PartitionParityError,
            MembershipError, NoSl2Error, GradingError, ValueError) as exc:
        print(f"verify[{config.scenario}]: configuration error: {exc}",
              file=sys.stderr)
        return EXIT_CONFIG_ERROR, None
    return (EXIT_PASS if report.passed else EXIT_CHECK_FAILED), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_scenarios:
        for name, citation in list_scenarios():
            print(f"{name:22s} {citation}")
        return EXIT_PASS
    if args.batch:
        return _run_batch(parser, args.batch, args.quiet)
    return _run_single(args)


if __name__ == "__main__":
    sys.exit(main())
