"""Dense codec: one advice bit per probability level.

Bit ``b`` at position ``x`` becomes ``P(x) = (b + 1) * p0``, so zeros and
ones sit on two levels a factor of two apart.  A fixed guard ``01`` is
prepended so both levels always occur; without it the all-zero and all-one
strings encode to the same uniform distribution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Sequence

import numpy as np

from .distribution import FiniteDistribution, SampleBatch, make_distribution, sample
from .errors import AdviceTooLongForWidth, GuardMismatch
from .report import ExperimentReport, build_report, run_trials

GUARD = (0, 1)


@dataclass(frozen=True)
class AdviceString:
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ValueError("advice must contain at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"advice bits must be 0 or 1, got {self.bits}")

    @classmethod
    def parse(cls, text: str) -> "AdviceString":
        return cls(tuple(int(c) for c in text.strip()))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "AdviceString":
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=length)))

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _as_advice(advice) -> AdviceString:
    if isinstance(advice, AdviceString):
        return advice
    if isinstance(advice, str):
        return AdviceString.parse(advice)
    return AdviceString(tuple(advice))


def guarded(advice) -> AdviceString:
    return AdviceString(GUARD + _as_advice(advice).bits)


@dataclass(frozen=True)
class DenseDecodeResult:
    advice: AdviceString | None
    guarded_bits: tuple[int, ...]
    M: int
    m: int
    counts: tuple
    ambiguous: bool


def encode_dense(advice, n: int) -> tuple[FiniteDistribution, Fraction]:
    """Encode ``advice`` (after the guard) as an exact distribution on ``[0, q')``.

    Returns the distribution and the base level ``p0 = 1/(q' + w)``.
    """
    g = guarded(advice)
    q = len(g)
    if q > (1 << n):
        raise AdviceTooLongForWidth(f"guarded advice of length {q} needs 2**n >= {q}, n={n}")
    p0 = Fraction(1, q + g.weight)
    dist = make_distribution(n, [(x, (b + 1) * p0) for x, b in enumerate(g.bits)])
    return dist, p0


def decode_counts(counts: Sequence) -> DenseDecodeResult:
    """Apply the two-level argmin rule to per-position counts.

    ``counts`` may be integers or exact frequencies.  Equal distances resolve
    to bit 1.  Raises :class:`GuardMismatch` unless the first two positions
    decode to the guard.
    """
    counts = tuple(counts)
    if len(counts) < len(GUARD):
        raise ValueError(f"need at least {len(GUARD)} positions, got {len(counts)}")
    M = max(counts)
    positive = [c for c in counts if c > 0]
    m = min(positive) if positive else 0
    bits = tuple(1 if abs(M - c) <= abs(m - c) else 0 for c in counts)
    result = DenseDecodeResult(
        advice=None, guarded_bits=bits, M=M, m=m, counts=counts, ambiguous=(M == m)
    )
    if bits[: len(GUARD)] != GUARD:
        raise GuardMismatch(
            f"guard decoded as {bits[:len(GUARD)]}, expected {GUARD}; "
            "the batch is too small or corrupted",
            result,
        )
    return DenseDecodeResult(
        advice=AdviceString(bits[len(GUARD):]) if len(bits) > len(GUARD) else None,
        guarded_bits=bits, M=M, m=m, counts=counts, ambiguous=(M == m),
    )


def decode_dense(batch: SampleBatch, q_guarded: int) -> DenseDecodeResult:
    if q_guarded < 2:
        raise ValueError(f"guarded length must be >= 2, got {q_guarded}")
    counts = [int(c) for c in batch.counts(q_guarded)]
    return decode_counts(counts)


def dense_sample_bound(q_guarded: int) -> int:
    """Sample count ``1200 q**3`` after which decoding fails w.p. at most 1/3."""
    if q_guarded < 1:
        raise ValueError(f"q must be >= 1, got {q_guarded}")
    return 1200 * q_guarded ** 3


def _dense_trial(dist: FiniteDistribution, advice_bits: tuple, q: int, N: int, seed: int) -> int:
    batch = sample(dist, N, seed)
    try:
        result = decode_dense(batch, q)
    except GuardMismatch:
        return 0
    return int(result.advice is not None and result.advice.bits == advice_bits)


def simulate_dense(advice, n: int, N: int, trials: int, seed: int, jobs: int = 1) -> ExperimentReport:
    """Encode once, then decode ``trials`` independent batches of ``N`` draws."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    advice = _as_advice(advice)
    started = time.perf_counter()
    dist, p0 = encode_dense(advice, n)
    q = len(advice) + len(GUARD)
    fn = partial(_dense_trial, dist, advice.bits, q, N)
    outcomes = run_trials(fn, trials, seed, "dense", jobs=jobs)
    params = {"advice": str(advice), "n": n, "N": N, "q_guarded": q, "p0": str(p0)}
    return build_report("dense", params, seed, outcomes, started)
