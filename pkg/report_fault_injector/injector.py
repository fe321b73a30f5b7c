"""Ranked fault injection driven by bug reports, and the random baseline.

The report-driven injector walks localized statements in rank order, applies
every matching pattern in priority order and keeps the candidates that still
type-check, until the requested number of faults is reached. The baseline
draws classical mutation operators uniformly at random over the whole scope.
"""

import difflib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import partial
from itertools import batched
from typing import Iterable, Iterator, Optional

from pydantic import BaseModel, ConfigDict, Field

from . import rng
from .config import InjectionConfig
from .corpus import BugReport, Corpus, SourceFile, StatementPointer
from .errors import MiniJTypeError, NoOpMutant, NoViableMutants, ParseError
from .irloc import Index, RankedLocation, build_index, build_query, rank_files, rank_statements
from .minij.typecheck import check_program
from .patterns.catalog import Catalog, default_catalog
from .patterns.matching import PatternApplication, match_patterns, mutate_source
from .patterns.scope import ProgramContext

logger = logging.getLogger(__name__)


class MutantSource(str, Enum):
    IBIR = "ibir"
    BASELINE = "baseline"


class MutantStatus(str, Enum):
    VIABLE = "viable"
    STILLBORN = "stillborn"
    NOOP = "noop"


class Mutant(BaseModel):
    """One injected fault. Only viable mutants ever leave the injector."""

    model_config = ConfigDict(frozen=True)

    mutant_id: str
    source: MutantSource
    report_id: Optional[str] = None
    path: str = Field(..., description="Mutated source file, relative to the corpus root")
    pattern_id: str
    statement: StatementPointer = Field(..., description="Mutated statement as {path, index}, the fault-record shape")
    donor: Optional[str] = Field(None, description="Printable donor descriptor")
    rank: int = Field(..., ge=1)
    diff: str
    status: MutantStatus = MutantStatus.VIABLE
    mutated_source: str = Field("", exclude=True, repr=False)

    def program(self, corpus: Corpus) -> list:
        """The corpus program with this mutant's file swapped in."""
        return corpus.program(replace=SourceFile.from_text(self.path, self.mutated_source))


@dataclass(frozen=True)
class Candidate:
    application: PatternApplication
    status: MutantStatus
    text: str = ""
    diff: str = ""


def unified_diff(path: str, before: str, after: str) -> str:
    lines = difflib.unified_diff(
        before.splitlines(keepends=True),
        after.splitlines(keepends=True),
        fromfile=f"a/{path}",
        tofile=f"b/{path}",
    )
    return "".join(lines)


def check_candidate(corpus: Corpus, catalog: Catalog, application: PatternApplication) -> Candidate:
    """Apply, re-parse and type-check one application against the whole program."""
    source = corpus.source(application.statement.file_path)
    try:
        _, text = mutate_source(source.raw_text, source.unit, application, catalog)
    except NoOpMutant:
        return Candidate(application, MutantStatus.NOOP)
    if text == source.raw_text:
        return Candidate(application, MutantStatus.NOOP)
    try:
        mutated = SourceFile.from_text(source.path, text)
        check_program(corpus.program(replace=mutated))
    except (ParseError, MiniJTypeError) as e:
        logger.debug(f"Stillborn {application.pattern_id} at {source.path}#{application.statement.index}: {e}")
        return Candidate(application, MutantStatus.STILLBORN)
    return Candidate(application, MutantStatus.VIABLE, text, unified_diff(source.path, source.raw_text, text))


def _checked(
    corpus: Corpus, catalog: Catalog, applications: Iterable[PatternApplication], jobs: int
) -> Iterator[Candidate]:
    check = partial(check_candidate, corpus, catalog)
    if jobs <= 1:
        yield from map(check, applications)
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for chunk in batched(applications, jobs * 4):
            yield from pool.map(check, chunk)


def _collect(
    corpus: Corpus,
    catalog: Catalog,
    applications: Iterable[PatternApplication],
    n: int,
    jobs: int,
) -> list[Candidate]:
    """The first ``n`` viable candidates with distinct diffs, in application order."""
    seen: set[str] = set()
    kept: list[Candidate] = []
    stillborn = noop = 0
    for candidate in _checked(corpus, catalog, applications, jobs):
        if candidate.status is MutantStatus.STILLBORN:
            stillborn += 1
            continue
        if candidate.status is MutantStatus.NOOP or candidate.diff in seen:
            noop += 1
            continue
        seen.add(candidate.diff)
        kept.append(candidate)
        if len(kept) >= n:
            break
    logger.debug(f"Kept {len(kept)} candidates, discarded {stillborn} stillborn and {noop} no-op or duplicate")
    return kept


def _mutants(
    candidates: list[Candidate], source: MutantSource, seed: int, report_id: Optional[str]
) -> list[Mutant]:
    return [
        Mutant(
            mutant_id=f"{source.value}-{seed}-{rank}",
            source=source,
            report_id=report_id,
            path=c.application.statement.file_path,
            pattern_id=c.application.pattern_id,
            statement=c.application.statement.pointer(),
            donor=c.application.donor_label,
            rank=rank,
            diff=c.diff,
            mutated_source=c.text,
        )
        for rank, c in enumerate(candidates, start=1)
    ]


def _catalog(config: InjectionConfig, catalog: Optional[Catalog]) -> Catalog:
    if catalog is not None:
        return catalog
    return Catalog.load(config.patterns_file) if config.patterns_file else default_catalog()


def ranked_locations(
    corpus: Corpus,
    report: BugReport,
    config: InjectionConfig,
    file_index: Optional[Index] = None,
    statement_index: Optional[Index] = None,
) -> list[RankedLocation]:
    """
    Localize ``report``, honouring the scope allow-list.

    Out-of-scope files are dropped before the ``top_files`` cut, so a scoped
    run still ranks ``top_statements`` statements when the scope has them.
    """
    query = build_query(report)
    file_index = file_index or build_index(corpus, "file")
    statement_index = statement_index or build_index(corpus, "statement")
    files = rank_files(file_index, query, len(corpus.sources))
    if config.scope is not None:
        files = [f for f in files if f.path in config.scope]
    return rank_statements(statement_index, query, files[: config.top_files], config.top_statements)


def inject(
    corpus: Corpus,
    report: BugReport,
    config: InjectionConfig,
    catalog: Optional[Catalog] = None,
    context: Optional[ProgramContext] = None,
    file_index: Optional[Index] = None,
    statement_index: Optional[Index] = None,
) -> list[Mutant]:
    """
    Inject up to ``config.n_faults`` viable faults guided by ``report``.

    Applications are tried by (statement rank, pattern priority, BFS order,
    donor order); the first ``n`` viable ones with distinct diffs are kept.

    Raises:
        EmptyQuery: the report has no usable terms
        NoViableMutants: every application was stillborn or a no-op
    """
    catalog = _catalog(config, catalog)
    context = context or ProgramContext(corpus)
    locations = ranked_locations(corpus, report, config, file_index, statement_index)
    patterns = catalog.patterns()

    def applications() -> Iterator[PatternApplication]:
        for location in locations:
            matches = match_patterns(context.site(location.statement), patterns)
            yield from sorted(matches, key=PatternApplication.sort_key)

    kept = _collect(corpus, catalog, applications(), config.n_faults, config.jobs)
    if not kept:
        raise NoViableMutants(f"no viable mutant for report {report.id} over {len(locations)} locations")
    mutants = _mutants(kept, MutantSource.IBIR, config.seed, report.id)
    logger.info(f"Injected {len(mutants)}/{config.n_faults} faults for report {report.id}")
    return mutants


def baseline_pool(
    corpus: Corpus, config: InjectionConfig, catalog: Catalog, context: ProgramContext
) -> list[PatternApplication]:
    """Every classical-operator application over the statements in scope, in source order."""
    patterns = catalog.patterns(baseline=True)
    pool: list[PatternApplication] = []
    for ref in corpus.statement_refs():
        if config.scope is not None and ref.file_path not in config.scope:
            continue
        pool.extend(match_patterns(context.site(ref), patterns))
    return pool


def inject_baseline(
    corpus: Corpus,
    config: InjectionConfig,
    report_id: Optional[str] = None,
    catalog: Optional[Catalog] = None,
    context: Optional[ProgramContext] = None,
) -> list[Mutant]:
    """
    Sample up to ``config.n_faults`` viable classical mutants uniformly without replacement.

    Raises:
        NoViableMutants: the pool holds no viable mutant
    """
    catalog = _catalog(config, catalog)
    context = context or ProgramContext(corpus)
    pool = baseline_pool(corpus, config, catalog, context)
    order = rng.stream(config.seed, "baseline-sampling").permutation(len(pool))
    kept = _collect(corpus, catalog, (pool[i] for i in order), config.n_faults, config.jobs)
    if not kept:
        raise NoViableMutants(f"no viable baseline mutant in {corpus.name} (pool of {len(pool)})")
    mutants = _mutants(kept, MutantSource.BASELINE, config.seed, report_id)
    logger.info(f"Sampled {len(mutants)}/{config.n_faults} baseline mutants from a pool of {len(pool)}")
    return mutants
