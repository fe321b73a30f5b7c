"""Evaluation report model, JSON persistence and the markdown summary."""

import json
import logging
from pathlib import Path
from statistics import median
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import SchemaMismatch
from .stats import effect_size_magnitude
from .utils import format_number

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SOURCES = ("ibir", "baseline")

Undefined = Literal["undefined"]
Statistic = Union[float, Undefined]


def defined(value: Statistic) -> bool:
    return value != "undefined"


class BudgetMetrics(BaseModel):
    """Metrics of one source's first ``budget`` mutants against one fault."""

    model_config = ConfigDict(frozen=True)

    n_mutants: int = Field(..., ge=0)
    mutant_ids: list[str]
    similarities: list[float] = Field(..., description="Ochiai of each mutant against the fault, in rank order")
    best_similarity: float = Field(..., ge=0.0, le=1.0)
    mean_similarity: float = Field(..., ge=0.0, le=1.0)
    killed: list[bool]
    coupled: list[bool]
    any_coupled: bool
    detection_ratios: list[float] = Field(..., description="Share of mutants killed by each sampled suite")
    kendall: Statistic
    pearson: Statistic
    ratio_p_value: Statistic = Field(..., description="Rank-sum p, detecting vs non-detecting suites")
    ratio_a12: Statistic = Field(..., description="A12, detecting vs non-detecting suites")


class TargetMeta(BaseModel):
    model_config = ConfigDict(frozen=True)

    corpus: str
    report_id: str
    n_tests: int
    excluded_tests: list[str] = Field(default_factory=list, description="Tests failing on the original program")
    failing_tests: list[str]
    suite_sizes: list[int]
    suites_detecting: list[bool]


class SourceAggregate(BaseModel):
    model_config = ConfigDict(frozen=True)

    median_best_similarity: float
    mean_similarity: float
    targets_with_similarity: int = Field(..., description="Targets whose best similarity is above 0")
    coupled_targets: int
    coupled_fraction: float
    significant_targets: int = Field(..., description="Targets whose detecting suites have significantly higher ratios")


class BudgetAggregate(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_targets: int
    sources: dict[str, SourceAggregate]
    best_similarity_p_value: Statistic = Field(..., description="Paired signed-rank p, bug report vs baseline")
    best_similarity_a12: Statistic
    kendall_a12: Statistic
    pearson_a12: Statistic


class EvaluationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: Literal[1] = SCHEMA_VERSION
    seed: int
    budgets: list[int]
    n_suite_samples: int
    sample_band: tuple[float, float]
    scope_mode: str
    faults: dict[str, dict[str, dict[str, BudgetMetrics]]] = Field(
        ..., description="fault id -> source -> budget -> metrics"
    )
    targets: dict[str, TargetMeta]
    aggregate: dict[str, BudgetAggregate] = Field(default_factory=dict)

    def metrics(self, source: str, budget: int) -> list[BudgetMetrics]:
        """Metrics of one source and budget across every fault that has them, in fault order."""
        out = []
        for fault_id in sorted(self.faults):
            entry = self.faults[fault_id].get(source, {}).get(str(budget))
            if entry is not None:
                out.append(entry)
        return out


def save_report(report: EvaluationReport, path: Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote evaluation report for {len(report.faults)} faults to {path}")


def load_report(path: Path) -> EvaluationReport:
    """
    Read an evaluation report.

    Raises:
        SchemaMismatch: the file is not a report, or holds no fault
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
        report = EvaluationReport.model_validate_json(text)
    except (ValidationError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SchemaMismatch(f"{path}: not an evaluation report: {e}") from e
    if not report.faults:
        raise SchemaMismatch(f"{path}: report holds no fault")
    return report


def _cell(value: Optional[Statistic]) -> str:
    if value is None or not defined(value):
        return "undefined"
    return format_number(value)


def summary_markdown(report: EvaluationReport) -> str:
    """Per-budget comparison table of both sources, with effect-size categories."""
    lines = [
        "# Fault injection evaluation",
        "",
        f"Faults: {len(report.faults)}. Seed: {report.seed}. Scope: {report.scope_mode}. "
        f"Suites per fault: {report.n_suite_samples}.",
        "",
        "| budget | source | median best similarity | mean similarity | targets > 0 | coupled targets |",
        "|---|---|---|---|---|---|",
    ]
    for budget in report.budgets:
        for source in SOURCES:
            rows = report.metrics(source, budget)
            if not rows:
                continue
            best = [m.best_similarity for m in rows]
            mean = [s for m in rows for s in m.similarities]
            lines.append(
                f"| {budget} | {source} | {format_number(median(best))} | "
                f"{format_number(sum(mean) / len(mean) if mean else 0.0)} | "
                f"{sum(1 for b in best if b > 0)}/{len(rows)} | {sum(m.any_coupled for m in rows)}/{len(rows)} |"
            )
    if report.aggregate:
        lines += [
            "",
            "| budget | best similarity p | best similarity A12 | effect | kendall A12 | pearson A12 |",
            "|---|---|---|---|---|---|",
        ]
        for budget, agg in report.aggregate.items():
            effect = effect_size_magnitude(agg.best_similarity_a12) if defined(agg.best_similarity_a12) else "-"
            lines.append(
                f"| {budget} | {_cell(agg.best_similarity_p_value)} | {_cell(agg.best_similarity_a12)} | "
                f"{effect} | {_cell(agg.kendall_a12)} | {_cell(agg.pearson_a12)} |"
            )
    return "\n".join(lines) + "\n"
