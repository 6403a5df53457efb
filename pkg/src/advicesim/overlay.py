"""Overlay codec: hide advice in a low-mass set of an arbitrary base distribution.

The base is shrunk by ``1/(3h)`` and the ``h`` lowest-probability strings
``S`` receive an extra ``(2 + b)/(3h)``, where ``b`` is the advice bit
assigned to that string.  After renormalizing by ``C = (1 + 2h + w)/(3h)``
the strings outside ``S`` keep their base proportions, so conditioning a
sample on ``x not in S`` gives back honest draws from the base restricted
to the complement of ``S``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .dense import AdviceString, _as_advice
from .distribution import (
    FiniteDistribution,
    SampleBatch,
    _total,
    batch_from_indices,
    condition_outside,
    sample,
)
from .errors import (
    BoundVacuous,
    DecodeFailed,
    DegenerateEstimate,
    HTooLarge,
    InsufficientNonSSamples,
    WidthMismatch,
    ZeroTV,
)
from .report import ExperimentReport, build_report, run_trials
from .rng import derive_seed, make_rng
from .stats import ConfidenceSpec, hoeffding_samples


@dataclass(frozen=True)
class TrainingSet:
    pairs: tuple[tuple[int, int], ...]
    n: int

    def __post_init__(self):
        size = 1 << self.n
        for x, y in self.pairs:
            if not 0 <= x < size:
                raise ValueError(f"index {x} outside [0, 2**{self.n})")
            if y not in (0, 1):
                raise ValueError(f"label {y} is not a bit")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def indices(self) -> list[int]:
        return [x for x, _ in self.pairs]

    def batch(self) -> SampleBatch:
        return batch_from_indices(self.n, self.indices)


def label_batch(batch: SampleBatch, concept: Callable[[int], int]) -> TrainingSet:
    return TrainingSet(tuple((int(x), int(concept(int(x)))) for x in batch.indices), batch.n)


@dataclass(frozen=True)
class OverlayEncoding:
    base: FiniteDistribution
    S: tuple[int, ...]
    encoded: FiniteDistribution
    C: Fraction | float
    bit_of: Mapping[int, int]

    @property
    def h(self) -> int:
        return len(self.S)


def select_low_mass_set(base: FiniteDistribution, h: int) -> tuple[int, ...]:
    """The ``h`` least likely strings, ties broken by ascending index.

    Strings outside the support have probability zero and therefore come
    first.  Their total base mass is at most ``h / 2**n``.
    """
    size = base.size
    if h > size:
        raise HTooLarge(f"h={h} exceeds 2**n={size}")
    if h < 0:
        raise ValueError(f"h must be non-negative, got {h}")
    chosen: list[int] = []
    if len(base) < size:
        x = 0
        while len(chosen) < h and x < size:
            if x not in base.entries:
                chosen.append(x)
            x += 1
    if len(chosen) < h:
        ranked = sorted(base.entries.items(), key=lambda kv: (kv[1], kv[0]))
        chosen.extend(x for x, _ in ranked[: h - len(chosen)])
    return tuple(sorted(chosen))


def normalization_constant(h: int, weight: int) -> Fraction:
    """Closed form ``(1 + 2h + w) / (3h)`` of the overlay normalizer."""
    return Fraction(1 + 2 * h + weight, 3 * h)


def encode_overlay(base: FiniteDistribution, advice) -> OverlayEncoding:
    advice = _as_advice(advice)
    h = len(advice)
    if h < 2:
        raise ValueError(f"overlay advice needs at least 2 bits, got {h}")
    S = select_low_mass_set(base, h)
    bit_of = dict(zip(S, advice.bits))
    exact = base.is_exact
    three_h = 3 * h
    raw: dict[int, Fraction | float] = {}
    for x, p in base.entries.items():
        raw[x] = p / three_h if exact else float(p) / three_h
    for x, b in bit_of.items():
        bump = Fraction(2 + b, three_h) if exact else (2 + b) / three_h
        raw[x] = raw.get(x, 0) + bump
    C = _total(raw.values())
    if exact:
        entries = {x: v / C for x, v in sorted(raw.items())}
    else:
        entries = {x: float(v) / C for x, v in sorted(raw.items())}
    encoded = FiniteDistribution(base.n, MappingProxyType(entries))
    return OverlayEncoding(base, S, encoded, C, MappingProxyType(bit_of))


def overlay_probability(base: FiniteDistribution, S: Sequence[int], bits: Sequence[int], x: int) -> float:
    """Pointwise encoded probability evaluated straight from the closed form."""
    h = len(S)
    C = float(normalization_constant(h, sum(bits)))
    inside = dict(zip(S, bits))
    bump = (2 + inside[x]) / (3 * h) if x in inside else 0.0
    return (float(base.prob(x)) / (3 * h) + bump) / C


def _round_half_up(v) -> int:
    return math.floor(v + Fraction(1, 2)) if isinstance(v, Fraction) else math.floor(v + 0.5)


def decode_from_frequencies(freq: Callable[[int], float], base: FiniteDistribution, h: int) -> AdviceString:
    """Recover the advice from per-string frequencies ``freq(x)``.

    The normalizer is estimated from the frequency mass outside ``S``, which
    is unaffected by the advice; each bit then follows by rounding the
    rescaled frequency of its string.
    """
    if h < 2:
        raise ValueError(f"h must be >= 2, got {h}")
    S = select_low_mass_set(base, h)
    r = {x: freq(x) for x in S}
    r_S = sum(r.values())
    if r_S >= 1:
        raise DegenerateEstimate("no observed mass outside S; cannot estimate the normalizer")
    base_S = base.mass(S)
    c_hat = (1 - base_S) / (3 * h * (1 - r_S))
    bits = []
    for x in S:
        level = _round_half_up(3 * h * c_hat * r[x] - base.prob(x)) - 2
        bits.append(min(1, max(0, level)))
    return AdviceString(tuple(bits))


def decode_overlay(batch: SampleBatch, base: FiniteDistribution, h: int) -> AdviceString:
    if batch.n != base.n:
        raise WidthMismatch(f"batch width {batch.n} != base width {base.n}")
    total = len(batch)
    if total == 0:
        raise DegenerateEstimate("empty batch")
    S = select_low_mass_set(base, h)
    values, counts = np.unique(batch.indices[np.isin(batch.indices, S)], return_counts=True)
    tally = dict(zip(values.tolist(), counts.tolist()))
    return decode_from_frequencies(lambda x: Fraction(tally.get(x, 0), total), base, h)


def filter_training(labeled: TrainingSet, S: Iterable[int], p: int) -> TrainingSet:
    """The first ``p`` pairs whose string lies outside ``S``, in order."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    S = set(S)
    kept = []
    for pair in labeled.pairs:
        if pair[0] not in S:
            kept.append(pair)
            if len(kept) == p:
                return TrainingSet(tuple(kept), labeled.n)
    raise InsufficientNonSSamples(f"only {len(kept)} of the required {p} pairs fall outside S")


def nonS_sample_budget(p: int, h: int) -> tuple[int, float]:
    """``(16 p h, 8/p)``: draws needed for ``p`` strings outside ``S``, and the
    Chebyshev bound on failing to get them."""
    if p <= 8:
        raise BoundVacuous(f"the failure bound 8/p is >= 1 for p={p}")
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    return 16 * p * h, 8 / p


def tv_bound(n: int, h: int) -> float:
    """Upper bound ``h / (2**n - h)`` on the distance between a base and its
    restriction to the complement of an ``h``-element low-mass set."""
    size = 1 << n
    if h >= size:
        raise HTooLarge(f"h={h} must be below 2**n={size}")
    return h / (size - h)


def distinguish_lower_bound(pe: float, tv: float) -> float:
    """Minimum samples ``(2 - 4 pe)/tv`` to tell two distributions apart with
    average error ``pe`` under equal priors."""
    if not 0 <= pe <= 0.5:
        raise ValueError(f"pe must lie in [0, 1/2], got {pe}")
    if tv <= 0:
        raise ZeroTV("the distributions coincide; no sample count separates them")
    return (2 - 4 * pe) / tv


def certified_decode_budget(n: int, h: int, delta: float) -> int:
    """Hoeffding budget at the conservative per-string accuracy ``(3/(24h))**2``
    with the failure probability split over all ``2**n`` strings."""
    eps = (3 / (24 * h)) ** 2
    return hoeffding_samples(ConfidenceSpec(eps, delta / (1 << n)))


# ---------------------------------------------------------------------------
# advice-extraction learner


Machine = Callable[[int, TrainingSet, AdviceString], int]


def advice_bit_machine(x: int, training: TrainingSet, advice: AdviceString) -> int:
    return advice[x % len(advice)]


def majority_label_machine(x: int, training: TrainingSet, advice: AdviceString) -> int:
    ones = sum(y for _, y in training)
    return int(2 * ones > len(training))


def advice_xor_majority_machine(x: int, training: TrainingSet, advice: AdviceString) -> int:
    return advice_bit_machine(x, training, advice) ^ majority_label_machine(x, training, advice)


MACHINES: dict[str, Machine] = {
    "advice-bit": advice_bit_machine,
    "majority": majority_label_machine,
    "advice-xor-majority": advice_xor_majority_machine,
}


def reconstruct_learner(x: int, batch: TrainingSet, base: FiniteDistribution, h: int,
                        p: int, machine: Machine) -> int:
    """Classical learner built from an advice-consuming machine.

    Decode the advice from the training strings, keep the first ``p`` pairs
    outside ``S`` as a fresh training set, and hand both to ``machine``.
    """
    advice = decode_overlay(batch.batch(), base, h)
    S = select_low_mass_set(base, h)
    filtered = filter_training(batch, S, p)
    return int(machine(x, filtered, advice))


class ThresholdConcept:
    """Labels ``x`` with ``1{x >= threshold}``; picklable for worker pools."""

    def __init__(self, threshold: int):
        self.threshold = threshold

    def __call__(self, x: int) -> int:
        return int(x >= self.threshold)


# ---------------------------------------------------------------------------
# simulations


def _decode_trial(encoded: FiniteDistribution, base: FiniteDistribution, bits: tuple,
                  N: int, seed: int) -> int:
    try:
        got = decode_overlay(sample(encoded, N, seed), base, len(bits))
    except DecodeFailed:
        return 0
    return int(got.bits == bits)


def simulate_overlay(base: FiniteDistribution, advice, N: int, trials: int, seed: int,
                     jobs: int = 1) -> ExperimentReport:
    """Exact-recovery rate of :func:`decode_overlay` over seeded batches."""
    if N < 1 or trials < 1:
        raise ValueError("N and trials must be >= 1")
    advice = _as_advice(advice)
    started = time.perf_counter()
    enc = encode_overlay(base, advice)
    fn = partial(_decode_trial, enc.encoded, base, advice.bits, N)
    outcomes = run_trials(fn, trials, seed, "overlay-decode", jobs=jobs)
    params = {"n": base.n, "h": len(advice), "advice": str(advice), "N": N, "C": float(enc.C)}
    return build_report("overlay-decode", params, seed, outcomes, started)


def _count_trial(encoded: FiniteDistribution, S: tuple, p: int, N: int, seed: int) -> int:
    batch = sample(encoded, N, seed)
    z = int(np.count_nonzero(~np.isin(batch.indices, S)))
    return int(z >= p)


def simulate_nonS_count(base: FiniteDistribution, advice, p: int, trials: int, seed: int,
                        N: int | None = None, jobs: int = 1) -> ExperimentReport:
    """Fraction of trials in which ``N`` draws (default ``16 p h``) contain at
    least ``p`` strings outside ``S``."""
    advice = _as_advice(advice)
    h = len(advice)
    budget, failure = nonS_sample_budget(p, h)
    N = budget if N is None else N
    started = time.perf_counter()
    enc = encode_overlay(base, advice)
    fn = partial(_count_trial, enc.encoded, enc.S, p, N)
    outcomes = run_trials(fn, trials, seed, "overlay-nonS", jobs=jobs)
    params = {"n": base.n, "h": h, "p": p, "N": N, "failure_bound": failure}
    return build_report("overlay-nonS", params, seed, outcomes, started)


def _pipeline_trial(enc: OverlayEncoding, p: int, N: int, machine_name: str,
                    threshold: int, seed: int) -> int:
    machine = MACHINES[machine_name]
    concept = ThresholdConcept(threshold)
    h = enc.h
    rng = make_rng(derive_seed(seed, "query"))
    x = int(rng.integers(enc.base.size))
    labeled = label_batch(sample(enc.encoded, N, derive_seed(seed, "train")), concept)
    try:
        got = reconstruct_learner(x, labeled, enc.base, h, p, machine)
    except (DecodeFailed, InsufficientNonSSamples):
        return 0
    honest_dist = condition_outside(enc.base, enc.S)
    honest = label_batch(sample(honest_dist, p, derive_seed(seed, "honest")), concept)
    truth = AdviceString(tuple(enc.bit_of[s] for s in enc.S))
    return int(got == machine(x, honest, truth))


def simulate_pipeline(base: FiniteDistribution, advice, p: int, N: int, trials: int, seed: int,
                      machine: str = "advice-xor-majority", threshold: int | None = None,
                      jobs: int = 1) -> ExperimentReport:
    """Agreement rate between the reconstructed learner and the same machine
    run on the true advice with an honest conditional training set."""
    if machine not in MACHINES:
        raise KeyError(f"unknown machine {machine!r}; choose from {sorted(MACHINES)}")
    advice = _as_advice(advice)
    threshold = base.size // 4 if threshold is None else threshold
    started = time.perf_counter()
    enc = encode_overlay(base, advice)
    fn = partial(_pipeline_trial, enc, p, N, machine, threshold)
    outcomes = run_trials(fn, trials, seed, "overlay-pipeline", jobs=jobs)
    params = {"n": base.n, "h": len(advice), "p": p, "N": N, "machine": machine,
              "threshold": threshold}
    return build_report("overlay-pipeline", params, seed, outcomes, started)
