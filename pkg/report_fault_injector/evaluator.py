"""Test execution against mutants, kill matrices and per-target metrics."""

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import median
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from . import rng
from .config import ExperimentConfig, StepBudget
from .corpus import Corpus, GroundTruthFault
from .errors import BandEmpty, DegenerateInput, EmptyGroup
from .injector import Mutant
from .minij.runner import run_tests
from .report import (
    BudgetAggregate,
    BudgetMetrics,
    EvaluationReport,
    SourceAggregate,
    Statistic,
    TargetMeta,
    defined,
)
from .stats import is_coupled, kendall_tau_b, ochiai, pearson_r, signed_rank_p, vargha_delaney_a12, wilcoxon
from .utils import create_summary_stats, safe_divide

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.05


@dataclass(frozen=True)
class KillMatrix:
    """Boolean detection table, one row per test and one column per subject."""

    tests: tuple[str, ...]
    subjects: tuple[str, ...]
    detect: np.ndarray = field(repr=False)
    excluded_tests: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.detect.shape != (len(self.tests), len(self.subjects)):
            raise ValueError(f"detect table of shape {self.detect.shape} for {len(self.tests)}x{len(self.subjects)}")

    def column(self, subject: str) -> np.ndarray:
        return self.detect[:, self.subjects.index(subject)]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["test", *self.subjects])
        for test, row in zip(self.tests, self.detect):
            writer.writerow([test, *(int(cell) for cell in row)])
        return buffer.getvalue()


def _units(program) -> list:
    return [unit for _, unit in program]


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def build_kill_matrix(
    corpus: Corpus,
    mutants: Sequence[Mutant],
    fault: GroundTruthFault,
    budget: Optional[StepBudget] = None,
    jobs: int = 1,
) -> KillMatrix:
    """
    Run the test suite against every mutant.

    Tests failing on the original program are left out. The last column is
    the ground-truth fault, true exactly at its failing tests.

    Raises:
        ExecutionError: the interpreter failed internally
    """
    original = run_tests(_units(corpus.program()), budget=budget)
    tests = tuple(v.test_name for v in original if v.passed)
    excluded = tuple(v.test_name for v in original if not v.passed)
    if excluded:
        logger.warning(f"{corpus.name}: {len(excluded)} tests fail on the original program and are excluded")

    def kills(mutant: Mutant) -> list[bool]:
        verdicts = run_tests(_units(mutant.program(corpus)), tests, budget)
        return [not v.passed for v in verdicts]

    columns = _map(kills, list(mutants), jobs)
    columns.append([t in fault.failing_tests for t in tests])
    detect = np.array(columns, dtype=bool).reshape(len(columns), len(tests)).T
    subjects = tuple(m.mutant_id for m in mutants) + (fault.fault_id,)
    logger.info(f"Kill matrix for {fault.fault_id}: {len(tests)} tests x {len(subjects)} subjects")
    return KillMatrix(tests, subjects, detect, excluded)


class SuiteSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    sample_id: int = Field(..., ge=0)
    test_subset: tuple[str, ...]
    detects_fault: bool
    detection_ratio: Optional[float] = Field(None, ge=0.0, le=1.0)


def suite_size_range(n_tests: int, band: tuple[float, float]) -> tuple[int, int]:
    lo, hi = band
    smallest = max(1, math.ceil(lo * n_tests - 1e-9))
    largest = math.floor(hi * n_tests + 1e-9)
    if smallest > largest:
        raise BandEmpty(f"no suite size of {n_tests} tests lies in the band {lo}..{hi}")
    return smallest, largest


def sample_suites(
    tests: Sequence[str],
    fault: GroundTruthFault,
    n_samples: int,
    band: tuple[float, float],
    seed: int,
) -> list[SuiteSample]:
    """
    Draw ``n_samples`` test suites: a size uniform in the band, then tests without replacement.

    Raises:
        BandEmpty: no integer suite size lies in the band
    """
    smallest, largest = suite_size_range(len(tests), band)
    generator = rng.stream(seed, f"suite-sampling/{fault.fault_id}")
    samples = []
    for i in range(n_samples):
        size = int(generator.integers(smallest, largest + 1))
        chosen = np.sort(generator.choice(len(tests), size=size, replace=False))
        subset = tuple(tests[j] for j in chosen)
        samples.append(
            SuiteSample(sample_id=i, test_subset=subset, detects_fault=bool(fault.failing_tests & set(subset)))
        )
    return samples


def detection_ratio(matrix: KillMatrix, suite: SuiteSample, mutant_ids: Sequence[str]) -> float:
    """Share of ``mutant_ids`` killed by at least one test of the suite."""
    if not mutant_ids:
        return 0.0
    rows = [matrix.tests.index(t) for t in suite.test_subset]
    cols = [matrix.subjects.index(m) for m in mutant_ids]
    killed = matrix.detect[np.ix_(rows, cols)].any(axis=0)
    return float(killed.mean())


def _undefined_on_degenerate(fn: Callable[[], float], what: str) -> Statistic:
    try:
        return fn()
    except (DegenerateInput, EmptyGroup) as e:
        logger.warning(f"{what} is undefined: {e}")
        return "undefined"


def budget_metrics(
    matrix: KillMatrix,
    fault: GroundTruthFault,
    mutant_ids: Sequence[str],
    suites: Sequence[SuiteSample],
    exact_threshold: int = 12,
    label: str = "",
) -> BudgetMetrics:
    fault_col = matrix.column(fault.fault_id)
    similarities = [ochiai(matrix.column(m), fault_col) for m in mutant_ids]
    killed = [bool(matrix.column(m).any()) for m in mutant_ids]
    coupled = [is_coupled(matrix.column(m), fault_col) for m in mutant_ids]
    suites = [s.model_copy(update={"detection_ratio": detection_ratio(matrix, s, mutant_ids)}) for s in suites]
    ratios = [s.detection_ratio for s in suites]
    detects = [float(s.detects_fault) for s in suites]
    detecting = [r for r, s in zip(ratios, suites) if s.detects_fault]
    missing = [r for r, s in zip(ratios, suites) if not s.detects_fault]
    stats = create_summary_stats(similarities)
    return BudgetMetrics(
        n_mutants=len(mutant_ids),
        mutant_ids=list(mutant_ids),
        similarities=similarities,
        best_similarity=stats["max"],
        mean_similarity=stats["avg"],
        killed=killed,
        coupled=coupled,
        any_coupled=any(coupled),
        detection_ratios=ratios,
        kendall=_undefined_on_degenerate(lambda: kendall_tau_b(ratios, detects), f"{label} kendall"),
        pearson=_undefined_on_degenerate(lambda: pearson_r(ratios, detects), f"{label} pearson"),
        ratio_p_value=_undefined_on_degenerate(
            lambda: wilcoxon(detecting, missing, "rank_sum", exact_threshold), f"{label} rank-sum"
        ),
        ratio_a12=_undefined_on_degenerate(lambda: vargha_delaney_a12(detecting, missing), f"{label} A12"),
    )


def available_budgets(
    budgets: Sequence[int], mutant_sets: Mapping[str, Sequence[Mutant]], label: str = ""
) -> list[int]:
    """Budgets every source has enough mutants for; the others are dropped with a warning."""
    kept = []
    for budget in budgets:
        short = {source: len(ms) for source, ms in mutant_sets.items() if len(ms) < budget}
        if short:
            logger.warning(f"{label}: budget {budget} omitted, too few mutants: {short}")
            continue
        kept.append(budget)
    return kept


@dataclass
class TargetEvaluation:
    fault: GroundTruthFault
    meta: TargetMeta
    metrics: dict[str, dict[str, BudgetMetrics]]
    matrix: KillMatrix


def evaluate_target(
    corpus: Corpus,
    fault: GroundTruthFault,
    mutant_sets: Mapping[str, Sequence[Mutant]],
    config: ExperimentConfig,
) -> TargetEvaluation:
    """
    Evaluate each source's mutants against one ground-truth fault.

    ``mutant_sets`` maps a source to its mutants in rank order; a budget ``b``
    takes the first ``b`` of them.
    """
    budgets = available_budgets(config.budgets, mutant_sets, fault.fault_id)
    everyone = [m for source in sorted(mutant_sets) for m in mutant_sets[source]]
    matrix = build_kill_matrix(corpus, everyone, fault, config.budget(), config.jobs)
    suites = sample_suites(matrix.tests, fault, config.n_suite_samples, config.sample_band, config.seed)
    metrics: dict[str, dict[str, BudgetMetrics]] = {}
    for source in sorted(mutant_sets):
        ids = [m.mutant_id for m in mutant_sets[source]]
        metrics[source] = {
            str(b): budget_metrics(
                matrix, fault, ids[:b], suites, config.exact_threshold, f"{fault.fault_id}/{source}/{b}"
            )
            for b in budgets
        }
    meta = TargetMeta(
        corpus=corpus.name,
        report_id=fault.bug_report_id,
        n_tests=len(matrix.tests),
        excluded_tests=list(matrix.excluded_tests),
        failing_tests=sorted(fault.failing_tests),
        suite_sizes=[len(s.test_subset) for s in suites],
        suites_detecting=[s.detects_fault for s in suites],
    )
    return TargetEvaluation(fault, meta, metrics, matrix)


def _a12_defined(g1: Sequence[Statistic], g2: Sequence[Statistic], what: str) -> Statistic:
    return _undefined_on_degenerate(
        lambda: vargha_delaney_a12([v for v in g1 if defined(v)], [v for v in g2 if defined(v)]), what
    )


def _source_aggregate(rows: Sequence[BudgetMetrics]) -> SourceAggregate:
    best = [m.best_similarity for m in rows]
    every = [s for m in rows for s in m.similarities]
    coupled = sum(m.any_coupled for m in rows)
    significant = sum(
        1
        for m in rows
        if defined(m.ratio_p_value) and m.ratio_p_value < SIGNIFICANCE and defined(m.ratio_a12) and m.ratio_a12 > 0.5
    )
    return SourceAggregate(
        median_best_similarity=median(best) if best else 0.0,
        mean_similarity=create_summary_stats(every)["avg"],
        targets_with_similarity=sum(1 for b in best if b > 0),
        coupled_targets=coupled,
        coupled_fraction=safe_divide(coupled, len(rows)),
        significant_targets=significant,
    )


def aggregate(
    faults: Mapping[str, Mapping[str, Mapping[str, BudgetMetrics]]],
    budgets: Sequence[int],
    exact_threshold: int = 12,
) -> dict[str, BudgetAggregate]:
    """Cross-target comparison of both sources, per budget, over faults that have both."""
    out: dict[str, BudgetAggregate] = {}
    for budget in budgets:
        key = str(budget)
        paired = [
            (entry["ibir"][key], entry["baseline"][key])
            for _, entry in sorted(faults.items())
            if key in entry.get("ibir", {}) and key in entry.get("baseline", {})
        ]
        if not paired:
            continue
        ours = [p[0] for p in paired]
        theirs = [p[1] for p in paired]
        out[key] = BudgetAggregate(
            n_targets=len(paired),
            sources={"ibir": _source_aggregate(ours), "baseline": _source_aggregate(theirs)},
            best_similarity_p_value=_undefined_on_degenerate(
                lambda: signed_rank_p(
                    [m.best_similarity for m in ours], [m.best_similarity for m in theirs], exact_threshold
                ),
                f"budget {budget} best-similarity signed-rank",
            ),
            best_similarity_a12=_undefined_on_degenerate(
                lambda: vargha_delaney_a12([m.best_similarity for m in ours], [m.best_similarity for m in theirs]),
                f"budget {budget} best-similarity A12",
            ),
            kendall_a12=_a12_defined(
                [m.kendall for m in ours], [m.kendall for m in theirs], f"budget {budget} kendall A12"
            ),
            pearson_a12=_a12_defined(
                [m.pearson for m in ours], [m.pearson for m in theirs], f"budget {budget} pearson A12"
            ),
        )
    return out


def build_report(evaluations: Sequence[TargetEvaluation], config: ExperimentConfig) -> EvaluationReport:
    faults = {e.fault.fault_id: e.metrics for e in evaluations}
    return EvaluationReport(
        seed=config.seed,
        budgets=list(config.budgets),
        n_suite_samples=config.n_suite_samples,
        sample_band=config.sample_band,
        scope_mode=config.scope_mode,
        faults=faults,
        targets={e.fault.fault_id: e.meta for e in evaluations},
        aggregate=aggregate(faults, config.budgets, config.exact_threshold),
    )
