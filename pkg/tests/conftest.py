"""Shared fixtures: small corpora written to temporary directories."""

import json
from pathlib import Path
from typing import Iterable, Mapping

import pytest

from report_fault_injector.config import ExperimentConfig, InjectionConfig
from report_fault_injector.corpus import load_corpus
from report_fault_injector.evaluator import aggregate
from report_fault_injector.report import BudgetMetrics, EvaluationReport, TargetMeta

SEEDED = Path(__file__).resolve().parent.parent / "corpora" / "seeded"

CALC = """\
int add(int a, int b) {
    return a + b;
}

int scale(int value, int factor) {
    int result = value * factor;
    return result;
}

float half(int value) {
    return value / 2.0;
}
"""

TEXT = """\
string greet(string name) {
    string message = "hello " + name;
    return message;
}

int wordLength(string word) {
    return len(word);
}
"""

CALC_TESTS = """\
void test_add() {
    assert(add(2, 3) == 5);
}

void test_add_negative() {
    assert(add(-2, 1) == -1);
}

void test_scale() {
    assert(scale(3, 4) == 12);
}

void test_half() {
    assert(half(3) == 1.5);
}
"""

TEXT_TESTS = """\
void test_greet() {
    assert(greet("ada") == "hello ada");
}

void test_word_length() {
    assert(wordLength("abc") == 3);
}
"""

ADD_REPORT = {
    "id": "R1",
    "title": "add returns a wrong sum",
    "description": "add(2, 3) does not give the sum 5.",
    "status": "resolved",
    "linked_fault_id": "F1",
}

ADD_FAULT = {
    "fault_id": "F1",
    "bug_report_id": "R1",
    "fixed_statements": [{"path": "src/calc.mj", "index": 0}],
    "failing_tests": ["test_add", "test_add_negative"],
}


def write_corpus(
    root: Path,
    files: Mapping[str, str],
    reports: Iterable[dict] = (),
    faults: Iterable[dict] = (),
) -> Path:
    """Lay out a corpus directory; ``files`` maps relative paths to MiniJ text."""
    for sub in ("src", "tests", "bugreports"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    for report in reports:
        (root / "bugreports" / f"{report['id']}.json").write_text(json.dumps(report), encoding="utf-8")
    faults = list(faults)
    if faults:
        (root / "faults").mkdir(exist_ok=True)
        for fault in faults:
            (root / "faults" / f"{fault['fault_id']}.json").write_text(json.dumps(fault), encoding="utf-8")
    return root


def calc_files() -> dict[str, str]:
    return {
        "src/calc.mj": CALC,
        "src/text.mj": TEXT,
        "tests/test_calc.mj": CALC_TESTS,
        "tests/test_text.mj": TEXT_TESTS,
    }


@pytest.fixture
def calc_dir(tmp_path: Path) -> Path:
    return write_corpus(tmp_path / "calc", calc_files(), [ADD_REPORT], [ADD_FAULT])


@pytest.fixture
def calc_corpus(calc_dir: Path):
    return load_corpus(calc_dir)


@pytest.fixture
def add_report(calc_corpus):
    return calc_corpus.report("R1")


@pytest.fixture
def injection_config() -> InjectionConfig:
    return InjectionConfig(n_faults=5, top_files=20, top_statements=50)


@pytest.fixture
def experiment_config(calc_dir: Path) -> ExperimentConfig:
    return ExperimentConfig(
        corpus_root=calc_dir,
        budgets=[1, 2],
        n_suite_samples=10,
        sample_band=(0.2, 0.5),
        step_budget=20_000,
    )


@pytest.fixture(scope="session")
def seeded_root() -> Path:
    return SEEDED


def make_metrics(
    best: float,
    coupled: bool = False,
    p_value="undefined",
    a12="undefined",
    kendall="undefined",
    pearson=0.5,
) -> BudgetMetrics:
    """A one-mutant metrics row with the given headline numbers."""
    return BudgetMetrics(
        n_mutants=1,
        mutant_ids=["m"],
        similarities=[best],
        best_similarity=best,
        mean_similarity=best,
        killed=[best > 0],
        coupled=[coupled],
        any_coupled=coupled,
        detection_ratios=[0.5],
        kendall=kendall,
        pearson=pearson,
        ratio_p_value=p_value,
        ratio_a12=a12,
    )


def make_report(faults=None, budgets=(1,)) -> EvaluationReport:
    """A two-fault report built from :func:`make_metrics` rows."""
    if faults is None:
        faults = {
            "F1": {"ibir": {"1": make_metrics(1.0, coupled=True)}, "baseline": {"1": make_metrics(0.2)}},
            "F2": {"ibir": {"1": make_metrics(0.5)}, "baseline": {"1": make_metrics(0.5)}},
        }
    meta = TargetMeta(
        corpus="calc",
        report_id="R",
        n_tests=6,
        failing_tests=["test_add"],
        suite_sizes=[2, 3],
        suites_detecting=[True, False],
    )
    return EvaluationReport(
        seed=0,
        budgets=list(budgets),
        n_suite_samples=2,
        sample_band=(0.2, 0.5),
        scope_mode="project",
        faults=faults,
        targets={fault_id: meta for fault_id in faults},
        aggregate=aggregate(faults, list(budgets)),
    )
