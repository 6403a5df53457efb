import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from advicesim.errors import P0OutOfBounds
from advicesim.stats import (
    ConfidenceSpec,
    chebyshev_tail,
    dense_budget_chain,
    dense_budget_middle,
    hoeffding_samples,
    hoeffding_violation_rate,
    union_split,
    wilson_interval,
)


def test_hoeffding_examples():
    assert hoeffding_samples(ConfidenceSpec(0.1, 0.05)) == math.ceil(50 * math.log(40)) == 185
    assert hoeffding_samples(ConfidenceSpec(1 / 60, 1 / 12)) == 5721
    assert 5721 <= 76800
    assert hoeffding_samples(ConfidenceSpec(0.999, 0.5)) == 1


@given(st.floats(0.001, 0.99), st.floats(0.001, 0.99), st.floats(1.01, 5))
def test_hoeffding_monotone(eps, delta, factor):
    base = hoeffding_samples(ConfidenceSpec(eps, delta))
    if eps * factor < 1:
        assert hoeffding_samples(ConfidenceSpec(eps * factor, delta)) <= base
    if delta * factor < 1:
        assert hoeffding_samples(ConfidenceSpec(eps, delta * factor)) <= base


def test_confidence_spec_validates():
    with pytest.raises(ValueError):
        ConfidenceSpec(0, 0.1)
    with pytest.raises(ValueError):
        ConfidenceSpec(0.1, 1)


def test_union_split():
    assert union_split(Fraction(1, 3), 4) == Fraction(1, 12)
    assert union_split(0.05, 2 ** 12) == 0.05 / 4096
    assert union_split(0.2, 1) == 0.2
    with pytest.raises(ValueError):
        union_split(0.1, 0)


def test_chebyshev():
    assert chebyshev_tail(2) == 0.25
    assert chebyshev_tail(math.sqrt(32 / 8)) == pytest.approx(0.25, abs=1e-15)
    assert chebyshev_tail(1) == 1


def test_dense_chain_examples():
    assert dense_budget_chain(4, Fraction(1, 6)) == (5721, 76800)
    assert dense_budget_chain(1, 1) == (math.ceil(50 * math.log(6)), 1200) == (90, 1200)
    with pytest.raises(P0OutOfBounds):
        dense_budget_chain(4, Fraction(1, 9))


@given(st.integers(1, 10 ** 6))
def test_dense_chain_holds_at_both_extremes(q):
    mid = dense_budget_middle(q)
    for p0 in (Fraction(1, 2 * q), Fraction(1, q)):
        exact, cap = dense_budget_chain(q, p0)
        assert exact <= mid <= cap


def test_wilson_interval_contains_estimate():
    lo, hi = wilson_interval(95, 100)
    assert lo < 0.95 < hi
    assert wilson_interval(100, 100)[1] == 1.0
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_hoeffding_coverage_empirical():
    trials = 1000
    sigma = math.sqrt(0.05 * 0.95 / trials)
    rate = hoeffding_violation_rate(0.3, ConfidenceSpec(0.05, 0.05), trials, seed=0)
    assert rate <= 0.05 + 2 * sigma
