import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from advicesim.dense import (
    AdviceString,
    decode_counts,
    decode_dense,
    dense_sample_bound,
    encode_dense,
    guarded,
    simulate_dense,
)
from advicesim.distribution import batch_from_indices, sample
from advicesim.errors import AdviceTooLongForWidth, GuardMismatch


def width_for(q):
    return max(1, (q - 1).bit_length())


def counts_batch(counts, n):
    idx = [x for x, c in enumerate(counts) for _ in range(c)]
    return batch_from_indices(n, idx)


def test_encode_examples():
    d, p0 = encode_dense("10", 2)
    assert str(guarded("10")) == "0110"
    assert p0 == Fraction(1, 6)
    assert [d.prob(x) for x in range(4)] == [Fraction(k, 6) for k in (1, 2, 2, 1)]
    d, p0 = encode_dense("11", 2)
    assert p0 == Fraction(1, 7)
    assert [d.prob(x) for x in range(4)] == [Fraction(k, 7) for k in (1, 2, 2, 2)]


def test_encode_needs_room():
    with pytest.raises(AdviceTooLongForWidth):
        encode_dense("111", 2)


def test_decode_noiseless_counts():
    res = decode_dense(counts_batch((100, 200, 200, 100), 2), 4)
    assert str(res.advice) == "10"
    assert (res.M, res.m) == (200, 100)


def test_decode_hand_evaluated_counts():
    # the guard reads "10" here, but the per-position bits are still reported
    with pytest.raises(GuardMismatch) as info:
        decode_counts((210, 95, 205, 90))
    res = info.value.result
    assert (res.M, res.m) == (210, 90)
    assert res.guarded_bits[1] == 0  # |210-95| = 115 > |90-95| = 5
    assert res.guarded_bits[3] == 0
    assert res.guarded_bits[2] == 1


def test_flat_profile_is_guard_mismatch():
    with pytest.raises(GuardMismatch) as info:
        decode_counts((100, 100, 100, 100))
    assert info.value.result.ambiguous


def test_sample_bound_examples():
    assert dense_sample_bound(4) == 76800
    assert dense_sample_bound(1) == 1200
    assert dense_sample_bound(10) == 1_200_000


def test_exhaustive_noiseless_roundtrip():
    for q in range(1, 11):
        for bits in itertools.product((0, 1), repeat=q):
            g = q + 2
            d, p0 = encode_dense(bits, width_for(g))
            res = decode_counts([d.prob(x) for x in range(g)])
            assert res.advice.bits == bits


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_p0_bounds_and_support(bits):
    q = len(bits) + 2
    d, p0 = encode_dense(bits, width_for(q))
    assert Fraction(1, 2 * q) <= p0 <= Fraction(1, q)
    assert d.support == tuple(range(q))


@settings(max_examples=300)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=14), st.data())
def test_decoding_survives_deviations_below_tenth_of_p0(bits, data):
    q = len(bits) + 2
    d, p0 = encode_dense(bits, width_for(q))
    N = 10 ** 6
    band = p0 / 10
    counts = []
    for x in range(q):
        # frequency deviation strictly inside (-p0/10, p0/10)
        dev = data.draw(st.fractions(-band, band).filter(lambda f: abs(f) < band))
        counts.append((d.prob(x) + dev) * N)
    assert decode_counts(counts).advice.bits == tuple(bits)


def test_simulate_meets_two_thirds():
    q = 4
    rep = simulate_dense("10", 2, dense_sample_bound(q), trials=100, seed=11)
    assert rep.success_fraction >= 2 / 3
    assert len(rep.outcomes) == 100


def test_simulate_is_deterministic():
    a = simulate_dense("1011", 3, 5000, trials=20, seed=4)
    b = simulate_dense("1011", 3, 5000, trials=20, seed=4)
    assert a.to_json() == b.to_json()


def test_simulate_rejects_zero_samples():
    with pytest.raises(ValueError):
        simulate_dense("10", 2, 0, trials=5, seed=0)


def test_undersampled_batch_can_fail_guard():
    d, _ = encode_dense("10", 2)
    with pytest.raises(GuardMismatch):
        decode_dense(sample(d, 1, seed=0), 4)


def test_advice_string_validation():
    with pytest.raises(ValueError):
        AdviceString(())
    with pytest.raises(ValueError):
        AdviceString.parse("102")
    assert AdviceString.parse("0110").weight == 2
