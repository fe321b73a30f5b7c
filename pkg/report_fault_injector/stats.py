"""Similarity, correlation, effect-size and significance statistics.

All functions take plain sequences (or numpy arrays) and return Python floats
or booleans. Undefined inputs raise :class:`DegenerateInput` rather than
returning NaN.
"""

import itertools
import math
from bisect import bisect_left
from typing import Literal, Sequence

import numpy as np
from scipy.stats import norm, rankdata

from .errors import DegenerateInput, EmptyGroup, LengthMismatch

EFFECT_LEVELS = (0.147, 0.33, 0.474)
EFFECT_MAGNITUDES = ("negligible", "small", "medium", "large")
EXACT_THRESHOLD = 12
_EPS = 1e-9


def _pair(x: Sequence, y: Sequence, dtype=float) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=dtype)
    b = np.asarray(y, dtype=dtype)
    if a.shape != b.shape:
        raise LengthMismatch(f"vectors of length {a.size} and {b.size}")
    return a, b


def ochiai(mutant_col: Sequence[bool], fault_col: Sequence[bool]) -> float:
    """|M ∩ F| / sqrt(|M| |F|) over the tests each column marks; 0 when either set is empty."""
    m, f = _pair(mutant_col, fault_col, dtype=bool)
    size_m, size_f = int(m.sum()), int(f.sum())
    if size_m == 0 or size_f == 0:
        return 0.0
    return float(np.logical_and(m, f).sum() / math.sqrt(size_m * size_f))


def is_coupled(mutant_col: Sequence[bool], fault_col: Sequence[bool]) -> bool:
    """True iff some test kills the mutant and every killing test also detects the fault."""
    m, f = _pair(mutant_col, fault_col, dtype=bool)
    return bool(m.any() and not np.logical_and(m, ~f).any())


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    """Kendall's tau-b with tie correction, by all-pairs concordance."""
    a, b = _pair(x, y)
    n = a.size
    if n < 2:
        raise DegenerateInput(f"kendall tau needs at least 2 observations, got {n}")
    upper = np.triu_indices(n, k=1)
    dx = np.sign(np.subtract.outer(a, a)[upper])
    dy = np.sign(np.subtract.outer(b, b)[upper])
    n0 = n * (n - 1) / 2
    n1 = float((dx == 0).sum())
    n2 = float((dy == 0).sum())
    if n1 == n0 or n2 == n0:
        raise DegenerateInput("kendall tau is undefined for a constant vector")
    tau = float((dx * dy).sum()) / math.sqrt((n0 - n1) * (n0 - n2))
    return min(1.0, max(-1.0, tau))


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    a, b = _pair(x, y)
    if a.size < 2:
        raise DegenerateInput(f"pearson r needs at least 2 observations, got {a.size}")
    da = a - a.mean()
    db = b - b.mean()
    sxx = float((da * da).sum())
    syy = float((db * db).sum())
    if sxx == 0 or syy == 0:
        raise DegenerateInput("pearson r is undefined for a zero-variance vector")
    r = float((da * db).sum()) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def vargha_delaney_a12(g1: Sequence[float], g2: Sequence[float]) -> float:
    """Probability that a value drawn from ``g1`` exceeds one from ``g2``, ties counting half."""
    a = np.asarray(g1, dtype=float)
    b = np.asarray(g2, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptyGroup(f"effect size needs two non-empty groups, got sizes {a.size} and {b.size}")
    greater = np.greater.outer(a, b).sum()
    equal = np.equal.outer(a, b).sum()
    return float((greater + 0.5 * equal) / (a.size * b.size))


def effect_size_magnitude(a12: float) -> str:
    """Negligible, small, medium or large by the scaled distance |A12 - 0.5| * 2."""
    return EFFECT_MAGNITUDES[bisect_left(EFFECT_LEVELS, abs(a12 - 0.5) * 2)]


def _two_sided(statistic: float, null: Sequence[float]) -> float:
    null = np.asarray(null)
    lower = float((null <= statistic + _EPS).mean())
    upper = float((null >= statistic - _EPS).mean())
    return min(1.0, 2 * min(lower, upper))


def _tie_term(ranks: np.ndarray) -> float:
    _, counts = np.unique(ranks, return_counts=True)
    return float((counts**3 - counts).sum())


def rank_sum_p(g1: Sequence[float], g2: Sequence[float], exact_threshold: int = EXACT_THRESHOLD) -> float:
    """
    Two-sided Wilcoxon rank-sum p-value.

    Exact (enumerating every assignment of the pooled mid-ranks to the first
    group) when the combined size is at most ``exact_threshold``; otherwise
    the normal approximation with tie and continuity corrections.
    """
    a = np.asarray(g1, dtype=float)
    b = np.asarray(g2, dtype=float)
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise DegenerateInput(f"rank-sum test needs two non-empty groups, got sizes {n1} and {n2}")
    ranks = rankdata(np.concatenate([a, b]))
    w = float(ranks[:n1].sum())
    total = n1 + n2
    if total <= exact_threshold:
        null = [sum(c) for c in itertools.combinations(ranks.tolist(), n1)]
        return _two_sided(w, null)
    u = w - n1 * (n1 + 1) / 2
    mean = n1 * n2 / 2
    variance = n1 * n2 / 12 * ((total + 1) - _tie_term(ranks) / (total * (total - 1)))
    if variance <= 0:
        return 1.0
    z = max(0.0, abs(u - mean) - 0.5) / math.sqrt(variance)
    return min(1.0, float(2 * norm.sf(z)))


def signed_rank_p(g1: Sequence[float], g2: Sequence[float], exact_threshold: int = EXACT_THRESHOLD) -> float:
    """
    Two-sided Wilcoxon signed-rank p-value for paired samples.

    Zero differences are dropped. Exact over all sign assignments when at most
    ``exact_threshold`` non-zero differences remain.
    """
    a, b = _pair(g1, g2)
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        raise DegenerateInput("signed-rank test needs at least one non-zero paired difference")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if n <= exact_threshold:
        null = [
            sum(r for r, s in zip(ranks.tolist(), signs) if s)
            for signs in itertools.product((False, True), repeat=n)
        ]
        return _two_sided(w_plus, null)
    mean = n * (n + 1) / 4
    variance = n * (n + 1) * (2 * n + 1) / 24 - _tie_term(ranks) / 48
    if variance <= 0:
        return 1.0
    z = max(0.0, abs(w_plus - mean) - 0.5) / math.sqrt(variance)
    return min(1.0, float(2 * norm.sf(z)))


def wilcoxon(
    g1: Sequence[float],
    g2: Sequence[float],
    mode: Literal["paired_signed_rank", "rank_sum"] = "rank_sum",
    exact_threshold: int = EXACT_THRESHOLD,
) -> float:
    if mode == "paired_signed_rank":
        return signed_rank_p(g1, g2, exact_threshold)
    if mode == "rank_sum":
        return rank_sum_p(g1, g2, exact_threshold)
    raise ValueError(f"unknown wilcoxon mode {mode!r}")
