"""Command-line entry point: localize, inject, evaluate and report.

Results go to stdout and files; logging goes to stderr.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from . import __version__
from .config import ExperimentConfig
from .corpus import RESOLVED_STATUSES, BugReport, Corpus, filter_reports, find_report, load_corpus_collection
from .errors import FaultInjectorError
from .evaluator import build_report, evaluate_target
from .injector import MutantSource, inject, inject_baseline, ranked_locations
from .irloc import build_index, locations_csv
from .mutants_io import clear_mutants, read_mutants, write_mutants
from .patterns.scope import ProgramContext
from .plots import render_figures
from .report import load_report, save_report, summary_markdown

logger = logging.getLogger(__name__)

PROG = "report-fault-injector"


class UsageError(Exception):
    """Invalid combination of command-line options (exit code 2)."""


def configure_logging() -> None:
    """Root logger to stderr, level from ``LOG_LEVEL``."""
    level = getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO)
    root = logging.getLogger()
    if not root.handlers:
        handler = logging.StreamHandler(stream=sys.stderr)
        handler.setFormatter(
            logging.Formatter(fmt="%(asctime)s %(levelname)s [%(name)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S")
        )
        root.addHandler(handler)
    root.setLevel(level)


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be at least 1")
    return value


def seed_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {text} is outside 0..2^64-1")
    return value


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", type=Path, default=default, help="Corpus root or collection of corpora")
    common.add_argument("--seed", type=seed_value, default=default, help="Root seed of every random stream")
    common.add_argument("--jobs", type=positive_int, default=default, help="Worker threads")
    common.add_argument("--config", type=Path, default=default, help="Key-value configuration file")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Bug-report-driven fault injection and evaluation for MiniJ corpora.",
        parents=[_global_options(suppress=False)],
    )
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_options(suppress=True)

    localize = sub.add_parser("localize", parents=[common], help="Rank statements for a bug report (CSV on stdout)")
    localize.add_argument("--report", required=True, help="Bug report id")
    localize.add_argument("--top", type=positive_int, default=None, help="Statements to print")
    localize.add_argument("--top-files", type=positive_int, default=None, help="Files to drill into")
    localize.set_defaults(handler=cmd_localize)

    inject_cmd = sub.add_parser("inject", parents=[common], help="Inject faults and write mutant directories")
    target = inject_cmd.add_mutually_exclusive_group()
    target.add_argument("--report", help="Bug report id")
    target.add_argument("--all-reports", action="store_true", help="Every resolved report linked to a fault")
    inject_cmd.add_argument("--n", type=positive_int, default=100, help="Viable mutants requested")
    inject_cmd.add_argument("--baseline", action="store_true", help="Random classical mutants instead; without a report, one set per project")
    inject_cmd.add_argument("--both", action="store_true", help="Run the bug-report injector and the baseline")
    inject_cmd.add_argument("--scope-file", action="append", default=None, help="Only mutate this file (repeatable)")
    inject_cmd.add_argument("--out", type=Path, default=Path("mutants"), help="Mutant output directory")
    inject_cmd.set_defaults(handler=cmd_inject)

    evaluate = sub.add_parser("evaluate", parents=[common], help="Run tests and write the evaluation report")
    evaluate.add_argument("--mutants", type=Path, default=Path("mutants"), help="Mutant directory")
    evaluate.add_argument("--out", type=Path, default=Path("report.json"), help="Report JSON path")
    evaluate.add_argument("--emit-matrix", type=Path, default=None, help="Directory for kill-matrix CSVs")
    evaluate.set_defaults(handler=cmd_evaluate)

    report = sub.add_parser("report", parents=[common], help="Render figures and a markdown summary")
    report.add_argument("--input", type=Path, default=Path("report.json"), help="Report JSON path")
    report.add_argument("--out", type=Path, default=Path("figures"), help="Output directory")
    report.set_defaults(handler=cmd_report)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {"corpus_root": args.corpus, "seed": args.seed, "jobs": args.jobs}
    return ExperimentConfig.resolve(args.config, overrides)


def _linked_reports(corpora: Sequence[Corpus]) -> list[tuple[Corpus, BugReport]]:
    return [
        (corpus, report)
        for corpus in corpora
        for report in filter_reports(corpus, RESOLVED_STATUSES)
        if report.linked_fault_id
    ]


def cmd_localize(args: argparse.Namespace, config: ExperimentConfig) -> int:
    corpus, report = find_report(load_corpus_collection(config.corpus_root), args.report)
    injection = config.injection(1).model_copy(
        update={
            "top_files": args.top_files or config.top_files,
            "top_statements": args.top or config.top_statements,
        }
    )
    locations = ranked_locations(corpus, report, injection)
    sys.stdout.write(locations_csv(locations))
    return 0


def _scope(args, config: ExperimentConfig, corpus: Corpus, report: Optional[BugReport]) -> Optional[frozenset[str]]:
    if args.scope_file:
        return frozenset(Path(p).as_posix() for p in args.scope_file)
    if config.scope_mode == "target_file" and report is not None:
        fault = corpus.find_fault(report)
        if fault is not None:
            return fault.fixed_files
    return None


def _inject_one(args, config: ExperimentConfig, corpus: Corpus, report: Optional[BugReport], indexes) -> None:
    scope = _scope(args, config, corpus, report)
    injection = config.injection(args.n, scope)
    group = report.id if report is not None else corpus.name
    context = ProgramContext(corpus)
    sources = []
    if args.both or not args.baseline:
        sources.append(MutantSource.IBIR)
    if args.both or args.baseline:
        sources.append(MutantSource.BASELINE)
    for source in sources:
        if source is MutantSource.IBIR:
            file_index, statement_index = indexes
            mutants = inject(
                corpus, report, injection, context=context, file_index=file_index, statement_index=statement_index
            )
        else:
            mutants = inject_baseline(corpus, injection, report.id if report else None, context=context)
        clear_mutants(args.out / group, source)
        write_mutants(args.out, group, mutants)
        sys.stdout.write(f"emitted={len(mutants)} requested={args.n} source={source.value} group={group}\n")


def cmd_inject(args: argparse.Namespace, config: ExperimentConfig) -> int:
    corpora = load_corpus_collection(config.corpus_root)
    if args.all_reports:
        targets = _linked_reports(corpora)
    elif args.report:
        targets = [find_report(corpora, args.report)]
    elif args.baseline and not args.both:
        # one report-less baseline per project, grouped under the project name
        targets = [(corpus, None) for corpus in corpora]
    elif args.both:
        raise UsageError("--both needs --report or --all-reports")
    else:
        raise UsageError("--report or --all-reports is required unless --baseline is given")
    for corpus, report in targets:
        indexes = (None, None)
        if report is not None:
            indexes = (build_index(corpus, "file"), build_index(corpus, "statement"))
        _inject_one(args, config, corpus, report, indexes)
    return 0


def cmd_evaluate(args: argparse.Namespace, config: ExperimentConfig) -> int:
    corpora = load_corpus_collection(config.corpus_root)
    evaluations = []
    for corpus, report in _linked_reports(corpora):
        fault = corpus.find_fault(report)
        mutant_sets = {}
        ours = read_mutants(args.mutants / report.id, MutantSource.IBIR)
        if ours:
            mutant_sets[MutantSource.IBIR.value] = ours
        theirs = read_mutants(args.mutants / report.id, MutantSource.BASELINE) or read_mutants(
            args.mutants / corpus.name, MutantSource.BASELINE
        )
        if theirs:
            mutant_sets[MutantSource.BASELINE.value] = theirs
        if not mutant_sets:
            logger.warning(f"No mutants for report {report.id}; fault {fault.fault_id} skipped")
            continue
        evaluation = evaluate_target(corpus, fault, mutant_sets, config)
        evaluations.append(evaluation)
        if args.emit_matrix is not None:
            args.emit_matrix.mkdir(parents=True, exist_ok=True)
            (args.emit_matrix / f"{fault.fault_id}.csv").write_text(evaluation.matrix.to_csv(), encoding="utf-8")
    if not evaluations:
        raise FaultInjectorError(f"no mutants found under {args.mutants}")
    report = build_report(evaluations, config)
    save_report(report, args.out)
    sys.stdout.write(f"faults={len(report.faults)} out={args.out}\n")
    return 0


def cmd_report(args: argparse.Namespace, config: ExperimentConfig) -> int:
    report = load_report(args.input)
    written = render_figures(report, args.out)
    summary = args.out / "summary.md"
    summary.write_text(summary_markdown(report), encoding="utf-8")
    for path in [*written, summary]:
        sys.stdout.write(f"{path}\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the process exit code."""
    load_dotenv()
    configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except (ValidationError, FileNotFoundError) as e:
        sys.stderr.write(f"{PROG}: error: invalid configuration: {e}\n")
        return 2
    try:
        return args.handler(args, config)
    except UsageError as e:
        sys.stderr.write(f"{PROG}: error: {e}\n")
        return 2
    except (FaultInjectorError, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
