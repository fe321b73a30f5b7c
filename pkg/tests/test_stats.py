import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from report_fault_injector.errors import DegenerateInput, EmptyGroup, LengthMismatch
from report_fault_injector.stats import (
    effect_size_magnitude,
    is_coupled,
    kendall_tau_b,
    ochiai,
    pearson_r,
    rank_sum_p,
    signed_rank_p,
    vargha_delaney_a12,
    wilcoxon,
)

small_ints = st.integers(-5, 5)


@st.composite
def paired(draw, min_size=2, max_size=15):
    n = draw(st.integers(min_size, max_size))
    x = draw(st.lists(small_ints, min_size=n, max_size=n))
    y = draw(st.lists(small_ints, min_size=n, max_size=n))
    return x, y


@st.composite
def distinct_groups(draw, min_total, max_total):
    total = draw(st.integers(min_total, max_total))
    n1 = draw(st.integers(1, total - 1))
    values = draw(st.permutations(range(total)))
    return list(values[:n1]), list(values[n1:])


def test_ochiai():
    assert ochiai([1, 1, 0, 0], [1, 0, 1, 0]) == pytest.approx(0.5)
    assert ochiai([1, 0], [1, 0]) == 1.0
    assert ochiai([0, 0], [1, 0]) == 0.0


def test_coupling():
    assert is_coupled([1, 0, 0], [1, 1, 0])
    assert not is_coupled([1, 1], [1, 0])
    assert not is_coupled([0, 0], [1, 1])


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        ochiai([1, 0], [1])
    with pytest.raises(LengthMismatch):
        kendall_tau_b([1, 2, 3], [1, 2])


def test_degenerate_correlations():
    with pytest.raises(DegenerateInput):
        kendall_tau_b([1, 1, 1], [1, 2, 3])
    with pytest.raises(DegenerateInput):
        pearson_r([1, 2, 3], [4, 4, 4])
    with pytest.raises(DegenerateInput):
        kendall_tau_b([1], [2])


def test_a12_and_magnitude():
    assert vargha_delaney_a12([3, 4], [1, 2]) == 1.0
    assert vargha_delaney_a12([1, 2], [1, 2]) == 0.5
    assert vargha_delaney_a12([1], [1, 2]) == 0.25
    assert [effect_size_magnitude(a) for a in (0.5, 0.57, 0.58, 0.66, 0.67, 0.74, 0.3, 0.0)] == [
        "negligible",
        "negligible",
        "small",
        "small",
        "medium",
        "large",
        "medium",
        "large",
    ]
    with pytest.raises(EmptyGroup):
        vargha_delaney_a12([], [1])


def test_rank_sum_exact_values():
    # completely separated groups of three: 2 of the 20 splits are as extreme
    assert rank_sum_p([1, 2, 3], [4, 5, 6]) == pytest.approx(0.1)
    assert rank_sum_p([1, 2, 3], [1, 2, 3]) == 1.0
    with pytest.raises(DegenerateInput):
        rank_sum_p([], [1, 2])


def test_signed_rank_exact_values():
    assert signed_rank_p([2, 3, 4, 5, 6], [1, 1, 1, 1, 1]) == pytest.approx(0.0625)
    assert signed_rank_p([1, 2, 3], [1, 2, 4]) == 1.0
    with pytest.raises(DegenerateInput):
        signed_rank_p([1, 2], [1, 2])


def test_wilcoxon_modes():
    g1, g2 = [5, 6, 7, 8], [1, 2, 3, 4]
    assert wilcoxon(g1, g2) == rank_sum_p(g1, g2)
    assert wilcoxon(g1, g2, mode="paired_signed_rank") == signed_rank_p(g1, g2)
    with pytest.raises(ValueError):
        wilcoxon(g1, g2, mode="sign")


@settings(max_examples=1000, deadline=None)
@given(paired())
def test_kendall_matches_scipy(xy):
    x, y = xy
    assume(len(set(x)) > 1 and len(set(y)) > 1)
    expected = scipy_stats.kendalltau(x, y)[0]
    assert kendall_tau_b(x, y) == pytest.approx(expected, abs=1e-9)


@settings(max_examples=1000, deadline=None)
@given(paired())
def test_pearson_matches_numpy(xy):
    x, y = xy
    assume(len(set(x)) > 1 and len(set(y)) > 1)
    assert pearson_r(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-9)


@settings(max_examples=1000, deadline=None)
@given(st.lists(small_ints, min_size=1, max_size=10), st.lists(small_ints, min_size=1, max_size=10))
def test_a12_matches_brute_force(g1, g2):
    wins = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a, b in itertools.product(g1, g2))
    a12 = vargha_delaney_a12(g1, g2)
    assert a12 == pytest.approx(wins / (len(g1) * len(g2)))
    assert a12 + vargha_delaney_a12(g2, g1) == pytest.approx(1.0)


@settings(max_examples=500, deadline=None)
@given(distinct_groups(2, 12))
def test_exact_rank_sum_matches_scipy(groups):
    g1, g2 = groups
    expected = scipy_stats.mannwhitneyu(g1, g2, alternative="two-sided", method="exact").pvalue
    assert rank_sum_p(g1, g2) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=500, deadline=None)
@given(
    st.lists(st.integers(0, 6), min_size=7, max_size=14),
    st.lists(st.integers(0, 6), min_size=7, max_size=14),
)
def test_approximate_rank_sum_matches_scipy(g1, g2):
    assume(len(set(g1 + g2)) > 1)
    expected = scipy_stats.mannwhitneyu(g1, g2, alternative="two-sided", method="asymptotic").pvalue
    assert rank_sum_p(g1, g2) == pytest.approx(expected, rel=1e-7, abs=1e-12)


@settings(max_examples=500, deadline=None)
@given(st.permutations(range(1, 21)), st.lists(st.booleans(), min_size=20, max_size=20))
def test_approximate_signed_rank_matches_scipy(magnitudes, signs):
    diffs = [m if s else -m for m, s in zip(magnitudes, signs)]
    expected = scipy_stats.wilcoxon(diffs, alternative="two-sided", method="approx", correction=True).pvalue
    assert signed_rank_p(diffs, [0] * len(diffs)) == pytest.approx(expected, rel=1e-7, abs=1e-12)


@settings(max_examples=500, deadline=None)
@given(paired(min_size=1, max_size=10))
def test_p_values_are_probabilities(xy):
    x, y = xy
    assume(any(a != b for a, b in zip(x, y)))
    assert 0.0 < signed_rank_p(x, y) <= 1.0
    assert 0.0 < rank_sum_p(x, y) <= 1.0
    assert signed_rank_p(x, y) == signed_rank_p(y, x)


def _midranks(values):
    ordered = sorted(values)
    return [ordered.index(v) + 1 + (ordered.count(v) - 1) / 2 for v in values]


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=20))
def test_ochiai_matches_set_formula(cells):
    mutant = [a for a, _ in cells]
    fault = [b for _, b in cells]
    killed = {i for i, a in enumerate(mutant) if a}
    failing = {i for i, b in enumerate(fault) if b}
    expected = len(killed & failing) / (len(killed) * len(failing)) ** 0.5 if killed and failing else 0.0
    assert ochiai(mutant, fault) == pytest.approx(expected, abs=1e-9)
    assert ochiai(mutant, fault) == ochiai(fault, mutant)


@settings(max_examples=1000, deadline=None)
@given(paired())
def test_kendall_matches_pair_counting(xy):
    x, y = xy
    assume(len(set(x)) > 1 and len(set(y)) > 1)
    concordant = discordant = tied_x = tied_y = 0
    for i, j in itertools.combinations(range(len(x)), 2):
        dx, dy = x[i] - x[j], y[i] - y[j]
        tied_x += dx == 0
        tied_y += dy == 0
        if dx * dy > 0:
            concordant += 1
        elif dx * dy < 0:
            discordant += 1
    pairs = len(x) * (len(x) - 1) // 2
    expected = (concordant - discordant) / ((pairs - tied_x) * (pairs - tied_y)) ** 0.5
    assert kendall_tau_b(x, y) == pytest.approx(expected, abs=1e-9)


@settings(max_examples=500, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: st.lists(st.integers(0, 4), min_size=n, max_size=n)), st.data())
def test_exact_rank_sum_matches_enumeration(pooled, data):
    n1 = data.draw(st.integers(1, len(pooled) - 1))
    ranks = _midranks(pooled)
    observed = sum(ranks[:n1])
    null = [sum(ranks[i] for i in chosen) for chosen in itertools.combinations(range(len(pooled)), n1)]
    lower = sum(w <= observed + 1e-9 for w in null) / len(null)
    upper = sum(w >= observed - 1e-9 for w in null) / len(null)
    expected = min(1.0, 2 * min(lower, upper))
    assert rank_sum_p(pooled[:n1], pooled[n1:]) == pytest.approx(expected, abs=1e-12)


kill_columns = st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=25)


@settings(max_examples=1000, deadline=None)
@given(kill_columns, st.data())
def test_ochiai_is_symmetric_and_ignores_test_order(cells, data):
    mutant = [a for a, _ in cells]
    fault = [b for _, b in cells]
    assert ochiai(mutant, fault) == ochiai(fault, mutant)
    order = data.draw(st.permutations(range(len(cells))))
    shuffled = ochiai([mutant[i] for i in order], [fault[i] for i in order])
    assert shuffled == pytest.approx(ochiai(mutant, fault), abs=1e-12)


@settings(max_examples=1000, deadline=None)
@given(
    st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=12),
    st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=12),
)
def test_a12_complement(g1, g2):
    forward = vargha_delaney_a12(g1, g2)
    assert 0.0 <= forward <= 1.0
    assert forward + vargha_delaney_a12(g2, g1) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=1000, deadline=None)
@given(kill_columns)
def test_coupling_bounds_similarity_from_below(cells):
    mutant = [a for a, _ in cells]
    fault = [b for _, b in cells]
    if is_coupled(mutant, fault):
        assert ochiai(mutant, fault) >= 1 / sum(fault) ** 0.5 - 1e-12


@settings(max_examples=500, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=25).filter(any), st.data())
def test_killing_a_subset_of_failing_tests_couples(fault, data):
    failing = [i for i, f in enumerate(fault) if f]
    killers = data.draw(st.sets(st.sampled_from(failing), min_size=1, max_size=len(failing)))
    mutant = [i in killers for i in range(len(fault))]
    assert is_coupled(mutant, fault)
    assert ochiai(mutant, fault) == pytest.approx((len(killers) / len(failing)) ** 0.5)
    assert ochiai(mutant, fault) >= 1 / len(failing) ** 0.5 - 1e-12
