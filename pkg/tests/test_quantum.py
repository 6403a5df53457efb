import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from advicesim.distribution import from_weights, point_mass, random_distribution, uniform
from advicesim.errors import PeOutOfRange, TooLarge
from advicesim.point import PointConcept
from advicesim.quantum import (
    build_sample_state,
    closed_form_overlap,
    copies_needed,
    helstrom_error,
    max_pair_overlap,
    min_copies_bound,
    overlap,
    overlap_floor,
    pe_lower_bound,
)
from advicesim.rng import make_rng


def full_helstrom(u, v):
    """Equal-prior error from the full density matrices."""
    diff = 0.5 * (np.outer(u, u) - np.outer(v, v))
    return 0.5 * (1 - np.abs(np.linalg.eigvalsh(diff)).sum())


def test_state_examples():
    s = build_sample_state(uniform(1), PointConcept(1, 1))
    assert s.amplitude(0, 1) == pytest.approx(1 / math.sqrt(2))
    assert s.amplitude(1, 0) == pytest.approx(1 / math.sqrt(2))
    assert s.amplitude(0, 0) == 0 and s.amplitude(1, 1) == 0
    s = build_sample_state(point_mass(1, 0), PointConcept(1, 1))
    assert list(s.amplitudes) == [0, 1, 0, 0]


@settings(max_examples=50)
@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_states_are_normalized_and_nonnegative(n, seed):
    rng = make_rng(seed)
    d = random_distribution(n, rng, sparsity=0.3)
    s = build_sample_state(d, PointConcept(n, int(rng.integers(1, (1 << n) + 1))))
    assert abs(s.norm() - 1) <= 1e-12
    assert (s.amplitudes >= 0).all()
    assert len(s.amplitudes) == 2 << n


def test_overlap_examples():
    d = uniform(2)
    s1, s2 = (build_sample_state(d, PointConcept(2, j)) for j in (1, 2))
    assert overlap(s1, s2) == pytest.approx(0.5, abs=1e-15)
    assert closed_form_overlap(d, 1, 2) == 0.5
    assert overlap(s1, s1) == pytest.approx(1, abs=1e-15)
    assert closed_form_overlap(d, 3, 3) == 1
    e = from_weights(2, {0: 1, 1: 1})
    assert closed_form_overlap(e, 1, 2) == 0
    assert overlap(*(build_sample_state(e, PointConcept(2, j)) for j in (1, 2))) == 0


@settings(max_examples=200)
@given(st.integers(1, 10), st.integers(0, 2 ** 32 - 1))
def test_closed_form_matches_inner_product(n, seed):
    rng = make_rng(seed)
    d = random_distribution(n, rng, sparsity=0.2)
    i, j = (int(v) for v in rng.integers(1, (1 << n) + 1, size=2))
    s1 = build_sample_state(d, PointConcept(n, i))
    s2 = build_sample_state(d, PointConcept(n, j))
    assert abs(overlap(s1, s2) - closed_form_overlap(d, i, j)) <= 1e-12


def test_pe_examples():
    assert pe_lower_bound(0.5, 1) == pytest.approx(0.5 * (1 - math.sqrt(3) / 2), abs=1e-15)
    assert pe_lower_bound(0, 1) == 0
    assert pe_lower_bound(1, 3) == 0.5


def test_pe_grid_monotone():
    ovs = np.linspace(0, 1, 41)
    for N in range(1, 30):
        row = [pe_lower_bound(ov, N) for ov in ovs]
        assert all(b >= a for a, b in zip(row, row[1:]))
        assert all(pe_lower_bound(ov, N + 1) <= pe_lower_bound(ov, N) for ov in ovs)


@settings(max_examples=100)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_helstrom_equality_for_pure_states(n, seed):
    rng = make_rng(seed)
    d = random_distribution(n, rng, sparsity=0.3)
    i, j = (int(v) for v in rng.integers(1, (1 << n) + 1, size=2))
    s1 = build_sample_state(d, PointConcept(n, i))
    s2 = build_sample_state(d, PointConcept(n, j))
    want = full_helstrom(s1.amplitudes, s2.amplitudes)
    assert abs(helstrom_error(s1, s2) - want) <= 1e-12
    assert abs(pe_lower_bound(closed_form_overlap(d, i, j), 1) - want) <= 1e-9


def test_min_copies_examples():
    assert min_copies_bound(10, 1 / 3) == pytest.approx(-1024 * math.log(8 / 9) / 4, abs=1e-12)
    assert min_copies_bound(10, 1 / 3) == pytest.approx(30.15, abs=1e-2)
    assert min_copies_bound(10, 0.5 - 1e-9) < 1e-10
    with pytest.raises(PeOutOfRange):
        min_copies_bound(10, 0.5)


def test_min_copies_scaling_and_growth():
    for n in range(2, 60):
        assert min_copies_bound(n + 1, 1 / 3) == pytest.approx(2 * min_copies_bound(n, 1 / 3), rel=1e-14)
    assert all(min_copies_bound(n, 1 / 3) > n ** 3 for n in range(40, 200))


def test_copies_needed_dominates_bound():
    for n in range(3, 30):
        assert copies_needed(n, 1 / 3) >= min_copies_bound(n, 1 / 3) * (1 - 2 / 2 ** n)


def test_max_pair_overlap_examples():
    assert max_pair_overlap(uniform(2)) == pytest.approx(0.25, abs=1e-15)
    assert max_pair_overlap(uniform(2)) == pytest.approx(overlap_floor(2), abs=1e-15)
    assert max_pair_overlap(point_mass(3, 5)) == 1


def test_max_pair_overlap_above_floor():
    rng = make_rng(17)
    for _ in range(100):
        n = int(rng.integers(1, 13))
        d = random_distribution(n, rng, sparsity=float(rng.choice([0.0, 0.4])))
        assert max_pair_overlap(d) >= overlap_floor(n) - 1e-12


def test_state_width_limit():
    with pytest.raises(TooLarge):
        build_sample_state(uniform(21), PointConcept(21, 1))
