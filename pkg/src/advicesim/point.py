"""Point functions ``c_j(x) = 1{x = j - 1}`` and their identification error.

Concept indices ``j`` run from 1 to ``2**n``; the prior over them is uniform.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from types import MappingProxyType
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .distribution import FiniteDistribution
from .errors import (
    EvenK,
    ExactModeTooLarge,
    InconsistentTrainingSet,
    IndexOutOfRange,
    PTooLarge,
)
from .report import ExperimentReport, build_report, run_trials
from .rng import make_rng

EXACT_MAX_N = 4
EXACT_MAX_P = 4


@dataclass(frozen=True)
class PointConcept:
    n: int
    j: int

    def __post_init__(self):
        if not 1 <= self.j <= (1 << self.n):
            raise ValueError(f"concept index {self.j} outside [1, 2**{self.n}]")

    def __call__(self, x: int) -> int:
        return concept_eval(self, x)


def concept_eval(concept: PointConcept, x: int) -> int:
    if not 0 <= x < (1 << concept.n):
        raise IndexOutOfRange(f"x={x} outside [0, 2**{concept.n})")
    return int(x == concept.j - 1)


@dataclass(frozen=True)
class ConceptPosterior:
    n: int
    p: int
    weights: Mapping[int, Fraction]

    def weight(self, j: int) -> Fraction:
        return self.weights.get(j, Fraction(0))

    @property
    def max_weight(self) -> Fraction:
        return max(self.weights.values())

    @property
    def map_concept(self) -> int:
        return max(self.weights, key=lambda j: (self.weights[j], -j))


def posterior(n: int, T: Sequence[tuple[int, int]]) -> ConceptPosterior:
    """Posterior over point concepts given labeled pairs ``(x, y)``.

    A positive pair pins the concept; otherwise every concept whose point was
    not seen with label 0 stays equally likely.
    """
    pairs = list(T)
    positives = {x for x, y in pairs if y == 1}
    negatives = {x for x, y in pairs if y == 0}
    if len(positives) > 1 or positives & negatives:
        raise InconsistentTrainingSet(f"no point concept is consistent with {pairs}")
    size = 1 << n
    if positives:
        (x,) = positives
        weights = {x + 1: Fraction(1)}
    else:
        survivors = [j for j in range(1, size + 1) if j - 1 not in negatives]
        w = Fraction(1, len(survivors))
        weights = {j: w for j in survivors}
    return ConceptPosterior(n, len(pairs), MappingProxyType(weights))


class Estimate(NamedTuple):
    value: float | Fraction
    stderr: float


def _exact_bayes_error(n: int, dist: FiniteDistribution, p: int):
    size = 1 << n
    support = list(dist.entries)
    probs = dist.entries
    cache: dict = {}
    total = Fraction(0) if dist.is_exact else 0.0
    # Ordered training sets are grouped by multiset; each ordering is equally likely.
    for combo in itertools.combinations_with_replacement(support, p):
        counts = {}
        for x in combo:
            counts[x] = counts.get(x, 0) + 1
        orderings = math.factorial(p)
        for c in counts.values():
            orderings //= math.factorial(c)
        weight = orderings
        for x in combo:
            weight = weight * probs[x]
        seen = frozenset(counts)
        err_sum = 0
        for j in range(1, size + 1):
            key = (seen, j - 1 if j - 1 in seen else None)
            if key not in cache:
                labeled = [(x, int(x == j - 1)) for x in sorted(seen)]
                cache[key] = 1 - posterior(n, labeled).max_weight
            err_sum += cache[key]
        total += weight * (err_sum if dist.is_exact else float(err_sum))
    return total / size


def _mc_bayes_errors(n: int, dist: FiniteDistribution, p: int, draws: int, seed: int) -> np.ndarray:
    size = 1 << n
    rng = make_rng(seed)
    j0 = rng.integers(size, size=draws)
    if p == 0:
        return np.full(draws, 1 - 1 / size)
    idx, cdf = dist._sampling_table
    pos = np.minimum(np.searchsorted(cdf, rng.random((draws, p)), side="right"), len(cdf) - 1)
    xs = np.sort(idx[pos], axis=1)
    distinct = 1 + np.count_nonzero(np.diff(xs, axis=1), axis=1)
    hit = np.any(xs == j0[:, None], axis=1)
    unseen = np.maximum(size - distinct, 1)  # zero only when every concept was hit
    return np.where(hit, 0.0, 1 - 1 / unseen)


def bayes_error(n: int, dist: FiniteDistribution, p: int, mode: str = "exact",
                seed: int = 0, draws: int = 100_000) -> Estimate:
    """Error of the maximum-a-posteriori concept identifier.

    ``exact`` enumerates every training set of size ``p`` (only for
    ``n <= 4`` and ``p <= 4``) and returns a fraction when ``dist`` is exact.
    ``monte_carlo`` samples ``draws`` (concept, training set) pairs and
    reports the standard error of the mean.
    """
    if dist.n != n:
        raise ValueError(f"distribution width {dist.n} != n={n}")
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    if mode == "exact":
        if n > EXACT_MAX_N or p > EXACT_MAX_P:
            raise ExactModeTooLarge(
                f"exact enumeration limited to n <= {EXACT_MAX_N}, p <= {EXACT_MAX_P}; use monte_carlo"
            )
        return Estimate(_exact_bayes_error(n, dist, p), 0.0)
    if mode == "monte_carlo":
        errs = _mc_bayes_errors(n, dist, p, draws, seed)
        se = float(errs.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
        return Estimate(float(errs.mean()), se)
    raise ValueError(f"unknown mode {mode!r}")


def bayes_error_lower_bound(n: int, p: int) -> Fraction:
    """``(1 - 1/(2**n - p)) * (1 - 2**-n)**p``."""
    size = 1 << n
    if p >= size:
        raise PTooLarge(f"p={p} must be below 2**n={size}")
    return (1 - Fraction(1, size - p)) * (1 - Fraction(1, size)) ** p


def majority_error(base_error, k: int):
    """Probability that a majority of ``k`` independent votes is wrong."""
    if k < 1 or k % 2 == 0:
        raise EvenK(f"k must be a positive odd integer, got {k}")
    if not 0 <= base_error <= 1:
        raise ValueError(f"base_error must lie in [0, 1], got {base_error}")
    e = base_error
    return sum(math.comb(k, i) * e ** i * (1 - e) ** (k - i) for i in range((k + 1) // 2, k + 1))


def fit_amplification_constants(base_error, ks: Sequence[int]) -> tuple[float, float]:
    """Constants ``(c, a)`` with ``majority_error(base_error, k) <= c * a**k`` on ``ks``.

    ``a`` comes from a least-squares fit of ``log error`` against ``k``; ``c``
    is then the smallest value making the bound hold at every ``k``.
    """
    ks = list(ks)
    errs = np.array([float(majority_error(base_error, k)) for k in ks])
    slope, _ = np.polyfit(ks, np.log(errs), 1)
    a = float(math.exp(slope))
    c = float(max(err / a ** k for err, k in zip(errs, ks)))
    return c, a


def listing_error_bound(n: int, k: int, c: float, a: float) -> float:
    """Union bound ``c * 2**n * a**k`` on any of the ``2**n`` majority votes failing."""
    if not 0 < a < 1 or c <= 0:
        raise ValueError("need 0 < a < 1 and c > 0")
    return c * 2 ** n * a ** k


def listing_votes_needed(n: int, c: float, a: float, delta: float) -> int:
    """Smallest ``k`` with ``c * 2**n * a**k <= delta``."""
    if not 0 < a < 1 or c <= 0 or not 0 < delta < 1:
        raise ValueError("need 0 < a < 1, c > 0 and 0 < delta < 1")
    return max(0, math.ceil((n * math.log(2) + math.log(c / delta)) / math.log(1 / a)))


def majority_votes_for_listing(n: int, base_error, delta: float) -> int:
    """Smallest odd ``k`` with ``2**n * majority_error(base_error, k) <= delta``."""
    k = 1
    while (1 << n) * majority_error(base_error, k) > delta:
        k += 2
    return k


class ConceptFamily:
    """Concepts ``c_j(x) = machine(x, j)`` for ``j = 1 .. 2**q``."""

    def __init__(self, machine: Callable[[int, int], int], n: int, q: int):
        self.machine = machine
        self.n = n
        self.q = q

    def __len__(self) -> int:
        return 1 << self.q

    def indices(self) -> range:
        return range(1, len(self) + 1)

    def evaluate(self, j: int, x: int) -> int:
        if not 1 <= j <= len(self):
            raise IndexError(f"concept index {j} outside [1, 2**{self.q}]")
        if not 0 <= x < (1 << self.n):
            raise IndexOutOfRange(f"x={x} outside [0, 2**{self.n})")
        return int(self.machine(x, j))

    def __getitem__(self, j: int) -> Callable[[int], int]:
        if not 1 <= j <= len(self):
            raise IndexError(f"concept index {j} outside [1, 2**{self.q}]")
        return partial(self.evaluate, j)

    def truth_table(self, j: int) -> tuple[int, ...]:
        return tuple(self.evaluate(j, x) for x in range(1 << self.n))


def concepts_from_machine(machine: Callable[[int, int], int], n: int, q: int) -> ConceptFamily:
    return ConceptFamily(machine, n, q)


# ---------------------------------------------------------------------------
# simulations


def _majority_trial(base_error: float, k: int, seed: int) -> int:
    wrong = make_rng(seed).random(k) < base_error
    return int(2 * int(wrong.sum()) > k)


def simulate_majority(base_error: float, k: int, trials: int, seed: int, jobs: int = 1) -> ExperimentReport:
    if k % 2 == 0:
        raise EvenK(f"k must be odd, got {k}")
    started = time.perf_counter()
    outcomes = run_trials(partial(_majority_trial, base_error, k), trials, seed, "majority", k, jobs=jobs)
    params = {"base_error": base_error, "k": k, "exact": float(majority_error(base_error, k))}
    return build_report("majority", params, seed, outcomes, started)


def _listing_trial(n: int, base_error: float, k: int, seed: int) -> int:
    rng = make_rng(seed)
    size = 1 << n
    j = int(rng.integers(1, size + 1))
    truth = (np.arange(size) == j - 1).astype(np.int8)
    wrong = rng.random((size, k)) < base_error
    votes_wrong = wrong.sum(axis=1)
    listed = np.where(2 * votes_wrong > k, 1 - truth, truth)
    ones = np.flatnonzero(listed)
    return int(len(ones) == 1 and ones[0] == j - 1)


def simulate_listing(n: int, base_error: float, delta: float, trials: int, seed: int,
                     jobs: int = 1) -> ExperimentReport:
    """Identify a point concept by listing its truth table with a noisy learner.

    Each of the ``2**n`` values comes from a majority of ``k`` answers that
    are wrong independently with probability ``base_error``; ``k`` is the
    smallest odd count whose union bound is at most ``delta``.
    """
    started = time.perf_counter()
    k = majority_votes_for_listing(n, base_error, delta)
    outcomes = run_trials(partial(_listing_trial, n, base_error, k), trials, seed, "listing", jobs=jobs)
    params = {"n": n, "base_error": base_error, "delta": delta, "k": k,
              "union_bound": float((1 << n) * majority_error(base_error, k))}
    return build_report("listing", params, seed, outcomes, started)


def _bayes_trial(n: int, dist: FiniteDistribution, p: int, seed: int) -> float:
    return float(_mc_bayes_errors(n, dist, p, 1, seed)[0])


def simulate_bayes(n: int, dist: FiniteDistribution, p: int, trials: int, seed: int,
                   jobs: int = 1) -> ExperimentReport:
    """Per-trial identification error of the MAP rule, one draw per trial."""
    started = time.perf_counter()
    outcomes = run_trials(partial(_bayes_trial, n, dist, p), trials, seed, "bayes", jobs=jobs)
    params = {"n": n, "p": p, "lower_bound": float(bayes_error_lower_bound(n, p)) if p < (1 << n) else None}
    return build_report("bayes", params, seed, outcomes, started)
