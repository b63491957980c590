"""Command line interface: `run`, `list` and `search-prop54`."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import pandas as pd

from orbicalc_cli import corpus
from orbicalc_cli.report import render
from orbicalc_cli.runner import run_scenario
from orbicalc_cli.scenario import ParseError, load_scenario
from orbicalc_cli.settings import Settings
from orbicalc_cli.steps import StepError
from orbicalc_math.obstruction import divisibility_audit, exhaustive_search

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT_ERROR = 2


def _parse_params(pairs: Sequence[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs:
        key, eq, value = pair.partition("=")
        if not eq or not key.strip():
            raise ValueError(f"--params expects k=v, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def _run_one(path: Path, overrides: dict[str, str], fmt: str) -> tuple[int, str, str]:
    """(exit code, report text, error text) for one scenario file."""
    try:
        scenario = load_scenario(path, overrides)
        report = run_scenario(scenario)
    except (ParseError, StepError) as e:
        return EXIT_INPUT_ERROR, "", f"error: {e}\n"
    except (OSError, UnicodeDecodeError) as e:
        return EXIT_INPUT_ERROR, "", f"error: cannot read {path}: {e}\n"
    return report.exit_code, render(report, fmt), ""


def _cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    try:
        overrides = _parse_params(args.params)
        paths = [corpus.resolve(t, settings) for t in args.targets]
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    fmt = args.format or settings.report_format
    workers = args.workers or settings.workers
    jobs = [(p, overrides, fmt) for p in paths]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, *zip(*jobs, strict=True)))
    else:
        results = [_run_one(*job) for job in jobs]

    code = EXIT_OK
    for status, out, err in results:
        if out:
            sys.stdout.write(out)
        if err:
            sys.stderr.write(err)
        code = max(code, status)
    return code


def _cmd_list(args: argparse.Namespace, settings: Settings) -> int:
    entries = corpus.list_scenarios(settings)
    df = pd.DataFrame(
        [{"name": e.name, "origin": e.origin, "description": e.description} for e in entries],
        columns=["name", "origin", "description"],
    )
    with pd.option_context(
        "display.max_rows", None, "display.width", 120, "display.max_colwidth", 80
    ):
        print(df.to_string(index=False) if not df.empty else "(no scenarios)")
    return EXIT_OK


def _cmd_search(args: argparse.Namespace, settings: Settings) -> int:
    bound = settings.search_bound if args.bound is None else args.bound
    n_bound = settings.search_nbound if args.nbound is None else args.nbound
    workers = args.workers or settings.workers
    kahler = not args.no_kahler
    try:
        found = exhaustive_search(bound, n_bound, kahler_filter=kahler, workers=workers)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    audit = divisibility_audit(found)
    df = pd.DataFrame(
        [
            {
                "n": e.candidate.n,
                "a": e.candidate.a,
                "b": e.candidate.b,
                "D2": f"({e.candidate.d2[0]}, {e.candidate.d2[1]})",
                "a=-1": e.a_is_minus_one,
                "n+2b=1": e.n_plus_2b_is_one,
                "no_kahler_class": e.sign_argument,
            }
            for e in audit
        ],
        columns=["n", "a", "b", "D2", "a=-1", "n+2b=1", "no_kahler_class"],
    )
    print(f"search |a|,|b| <= {bound}, 0 <= n <= {n_bound}, kahler_filter={kahler}")
    print(f"survivors={len(found)}")
    if not df.empty:
        with pd.option_context(
            "display.max_rows", args.head, "display.max_columns", None, "display.width", 120
        ):
            print(df.head(args.head).to_string(index=False))

    ok = not found if kahler else all(e.ok for e in audit)
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbicalc", description="Exact orbifold, Seifert and Smale-Barden invariant calculator."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run scenario files or bundled scenarios by name.")
    run.add_argument("targets", nargs="+", help="Scenario file paths or corpus names.")
    run.add_argument("--format", choices=["text", "record"], default=None)
    run.add_argument(
        "--params",
        nargs="*",
        action="extend",
        default=[],
        metavar="K=V",
        help="Override scenario parameters, e.g. --params b=3 p=5.",
    )
    run.add_argument("--workers", type=int, default=None, help="Run several scenarios in parallel.")
    run.set_defaults(handler=_cmd_run)

    lst = sub.add_parser("list", help="List bundled and user scenarios.")
    lst.set_defaults(handler=_cmd_list)

    search = sub.add_parser("search-prop54", help="Search for disjoint torus pairs on Hirzebruch surfaces.")
    search.add_argument("--bound", type=int, default=None, help="Bound A on |a|, |b|.")
    search.add_argument("--nbound", type=int, default=None, help="Bound N on n.")
    search.add_argument("--no-kahler", action="store_true", help="Skip the Kaehler positivity filter.")
    search.add_argument("--workers", type=int, default=None)
    search.add_argument("--head", type=int, default=20, help="Rows of survivors to print (default: 20).")
    search.set_defaults(handler=_cmd_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings()
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_INPUT_ERROR
    logging.info(f"orbicalc {args.command}")
    return args.handler(args, settings)
