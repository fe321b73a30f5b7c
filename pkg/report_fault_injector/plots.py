"""SVG figures of an evaluation report."""

import logging
from pathlib import Path
from typing import Callable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .report import SOURCES, BudgetMetrics, EvaluationReport, defined  # noqa: E402

logger = logging.getLogger(__name__)

COLORS = {"ibir": "#4c72b0", "baseline": "#dd8452"}

plt.rcParams.update(
    {
        "svg.hashsalt": "report-fault-injector",
        "svg.fonttype": "none",
        "font.size": 9,
    }
)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def _boxes(
    report: EvaluationReport, values: Callable[[BudgetMetrics], Sequence[float]]
) -> tuple[list[list[float]], list[str], list[str]]:
    data, labels, colors = [], [], []
    for budget in report.budgets:
        for source in SOURCES:
            rows = report.metrics(source, budget)
            group = [v for m in rows for v in values(m)]
            if not group:
                continue
            data.append(group)
            labels.append(f"{source}\n{budget}")
            colors.append(COLORS[source])
    return data, labels, colors


def _boxplot(ax, data, labels, colors, ylabel: str) -> None:
    ax.set_ylabel(ylabel)
    if not data:
        ax.text(0.5, 0.5, "no data", ha="center", va="center", transform=ax.transAxes)
        return
    parts = ax.boxplot(data, patch_artist=True, showfliers=True)
    for patch, color in zip(parts["boxes"], colors):
        patch.set_facecolor(color)
    ax.set_xticks(range(1, len(labels) + 1), labels)


def _figure(report, values, ylabel: str, path: Path, ylim=(0.0, 1.05)) -> Path:
    data, labels, colors = _boxes(report, values)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * len(labels)), 3.5))
    _boxplot(ax, data, labels, colors, ylabel)
    if ylim is not None:
        ax.set_ylim(*ylim)
    return _save(fig, path)


def similarity_figure(report: EvaluationReport, path: Path) -> Path:
    """Similarity of every mutant, one box per source and budget."""
    return _figure(report, lambda m: m.similarities, "Ochiai similarity", path)


def best_similarity_figure(report: EvaluationReport, path: Path) -> Path:
    return _figure(report, lambda m: [m.best_similarity], "best Ochiai similarity per fault", path)


def coupling_figure(report: EvaluationReport, path: Path) -> Path:
    """Share of faults with at least one coupled mutant."""
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    width = 0.38
    for offset, source in zip((-width / 2, width / 2), SOURCES):
        shares = []
        for budget in report.budgets:
            rows = report.metrics(source, budget)
            shares.append(sum(m.any_coupled for m in rows) / len(rows) if rows else 0.0)
        positions = [i + offset for i in range(len(report.budgets))]
        ax.bar(positions, shares, width, label=source, color=COLORS[source])
    ax.set_xticks(range(len(report.budgets)), [str(b) for b in report.budgets])
    ax.set_xlabel("fault budget")
    ax.set_ylabel("faults with a coupled mutant")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    return _save(fig, path)


def correlation_figure(report: EvaluationReport, path: Path) -> Path:
    """Kendall and Pearson coefficients between detection ratio and fault detection."""
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.5), sharey=True)
    for ax, name in zip(axes, ("kendall", "pearson")):
        data, labels, colors = _boxes(report, lambda m: [v for v in [getattr(m, name)] if defined(v)])
        _boxplot(ax, data, labels, colors, f"{name} coefficient")
        ax.set_ylim(-1.05, 1.05)
    return _save(fig, path)


def a12_figure(report: EvaluationReport, path: Path) -> Path:
    """A12 of detection ratios, fault-detecting against other suites."""
    return _figure(report, lambda m: [v for v in [m.ratio_a12] if defined(v)], "A12 detection ratio", path)


FIGURES = {
    "similarity.svg": similarity_figure,
    "best_similarity.svg": best_similarity_figure,
    "coupling.svg": coupling_figure,
    "correlation.svg": correlation_figure,
    "a12.svg": a12_figure,
}


def render_figures(report: EvaluationReport, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [render(report, out_dir / name) for name, render in FIGURES.items()]
    logger.info(f"Rendered {len(written)} figures to {out_dir}")
    return written
