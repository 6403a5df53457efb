"""Finite probability distributions over n-bit strings.

Strings are identified with the integers ``0 .. 2**n - 1``.  Distributions
are sparse: only indices with positive probability are stored.  Probabilities
may be ``float`` or :class:`fractions.Fraction`; a distribution whose entries
are all fractions is *exact* and every operation below keeps it exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    AllMassInS,
    DistributionFileError,
    DuplicateIndex,
    EmptyBatch,
    IndexOutOfRange,
    NegativeProbability,
    NotNormalized,
    WidthMismatch,
)
from .rng import make_rng

Probability = Union[float, Fraction]

NORMALIZATION_TOL = 1e-9


def _total(values: Iterable[Probability]) -> Probability:
    values = list(values)
    if values and all(isinstance(v, Fraction) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(float(v) for v in values)


@dataclass(frozen=True)
class FiniteDistribution:
    """Immutable sparse distribution over ``[0, 2**n)``.

    Use :func:`make_distribution` to build one; the constructor trusts its
    input.
    """

    n: int
    entries: Mapping[int, Probability]

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.entries)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.entries.values())

    def prob(self, x: int) -> Probability:
        return self.entries.get(x, 0)

    def mass(self, indices: Iterable[int]) -> Probability:
        return _total(self.prob(x) for x in set(indices))

    def total(self) -> Probability:
        return _total(self.entries.values())

    def items(self):
        return self.entries.items()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def dense(self) -> np.ndarray:
        """Probability vector of length ``2**n`` (floats)."""
        out = np.zeros(self.size)
        for x, p in self.entries.items():
            out[x] = float(p)
        return out

    @cached_property
    def _sampling_table(self) -> tuple[np.ndarray, np.ndarray]:
        idx = np.fromiter(self.entries.keys(), dtype=np.int64, count=len(self.entries))
        cdf = np.cumsum(np.fromiter((float(p) for p in self.entries.values()),
                                    dtype=float, count=len(self.entries)))
        cdf /= cdf[-1]
        return idx, cdf

    def to_json(self) -> str:
        entries = [[x, float(p)] for x, p in self.entries.items()]
        return json.dumps({"n": self.n, "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "FiniteDistribution":
        data = json.loads(text)
        pairs = [(int(x), float(p)) for x, p in data["entries"]]
        indices = [x for x, _ in pairs]
        if indices != sorted(indices):
            raise DistributionFileError("entries must be listed in ascending index order")
        return make_distribution(int(data["n"]), pairs)

    def __repr__(self) -> str:
        shown = ", ".join(f"{x}: {p}" for x, p in list(self.entries.items())[:6])
        more = ", ..." if len(self.entries) > 6 else ""
        return f"FiniteDistribution(n={self.n}, {{{shown}{more}}})"


def make_distribution(n: int, entries: Iterable[tuple[int, Probability]]) -> FiniteDistribution:
    """Validate ``(index, probability)`` pairs and build a canonical distribution.

    Zero entries are dropped and the rest are stored in ascending index order.
    The probabilities must sum to one within ``1e-9``; fractions get the
    same absolute tolerance.
    """
    if n < 0:
        raise IndexOutOfRange(f"width must be non-negative, got {n}")
    size = 1 << n
    seen: dict[int, Probability] = {}
    for x, p in entries:
        x = int(x)
        if x < 0 or x >= size:
            raise IndexOutOfRange(f"index {x} outside [0, 2**{n})")
        if x in seen:
            raise DuplicateIndex(f"index {x} listed twice")
        if p < 0:
            raise NegativeProbability(f"P({x}) = {p} < 0")
        seen[x] = p
    total = _total(seen.values())
    if abs(total - 1) > NORMALIZATION_TOL:
        raise NotNormalized(f"probabilities sum to {float(total)!r}, not 1")
    canonical = {x: seen[x] for x in sorted(seen) if seen[x] != 0}
    return FiniteDistribution(n, MappingProxyType(canonical))


def uniform(n: int, exact: bool = False) -> FiniteDistribution:
    """Uniform distribution over all ``2**n`` strings."""
    size = 1 << n
    p = Fraction(1, size) if exact else 1.0 / size
    return FiniteDistribution(n, MappingProxyType({x: p for x in range(size)}))


def point_mass(n: int, x: int) -> FiniteDistribution:
    return make_distribution(n, [(x, Fraction(1))])


def from_weights(n: int, weights: Mapping[int, int]) -> FiniteDistribution:
    """Exact distribution proportional to non-negative integer weights."""
    total = sum(weights.values())
    return make_distribution(n, [(x, Fraction(w, total)) for x, w in weights.items()])


def random_distribution(n: int, rng: np.random.Generator, exact: bool = False,
                        sparsity: float = 0.0, max_weight: int = 1000) -> FiniteDistribution:
    """Random test distribution.

    Each index is dropped with probability ``sparsity`` (at least one is
    kept); surviving indices get integer weights in ``[1, max_weight]``.
    """
    size = 1 << n
    keep = rng.random(size) >= sparsity
    if not keep.any():
        keep[rng.integers(size)] = True
    weights = rng.integers(1, max_weight + 1, size=size)
    if exact:
        return from_weights(n, {int(x): int(weights[x]) for x in np.flatnonzero(keep)})
    w = np.where(keep, weights, 0).astype(float)
    w /= w.sum()
    return FiniteDistribution(n, MappingProxyType({int(x): float(w[x]) for x in np.flatnonzero(w)}))


@dataclass(frozen=True)
class SampleBatch:
    """Ordered i.i.d. draws, plus the seed that produced them."""

    indices: np.ndarray
    n: int
    seed: int | None = None
    _counts: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.indices)

    def tolist(self) -> list[int]:
        return [int(x) for x in self.indices]

    def counts(self, length: int) -> np.ndarray:
        """Occurrence counts of indices ``0 .. length-1``."""
        if length not in self._counts:
            inside = self.indices[self.indices < length]
            self._counts[length] = np.bincount(inside, minlength=length)[:length]
        return self._counts[length]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "seed": self.seed, "indices": self.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "SampleBatch":
        data = json.loads(text)
        return batch_from_indices(int(data["n"]), data["indices"], data.get("seed"))


def batch_from_indices(n: int, indices: Sequence[int], seed: int | None = None) -> SampleBatch:
    arr = np.asarray(list(indices), dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= (1 << n)):
        raise IndexOutOfRange(f"batch contains indices outside [0, 2**{n})")
    arr.setflags(write=False)
    return SampleBatch(arr, n, seed)


def sample(dist: FiniteDistribution, count: int, seed: int) -> SampleBatch:
    """Draw ``count`` i.i.d. indices by inverse CDF.

    The cumulative table is built once per distribution (linear in the
    support) and each draw is a binary search over it.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    idx, cdf = dist._sampling_table
    u = make_rng(seed).random(count)
    pos = np.searchsorted(cdf, u, side="right")
    np.minimum(pos, len(cdf) - 1, out=pos)
    out = idx[pos]
    out.setflags(write=False)
    return SampleBatch(out, dist.n, seed)


def empirical(batch: SampleBatch) -> FiniteDistribution:
    """Empirical distribution of a batch, with exact rational frequencies."""
    total = len(batch)
    if total == 0:
        raise EmptyBatch("cannot form the empirical distribution of an empty batch")
    values, counts = np.unique(batch.indices, return_counts=True)
    entries = {int(x): Fraction(int(c), total) for x, c in zip(values, counts)}
    return FiniteDistribution(batch.n, MappingProxyType(entries))


def tv_distance(d1: FiniteDistribution, d2: FiniteDistribution) -> Probability:
    """Total variation distance ``(1/2) * sum_x |P1(x) - P2(x)|``."""
    if d1.n != d2.n:
        raise WidthMismatch(f"widths differ: {d1.n} vs {d2.n}")
    keys = set(d1.entries) | set(d2.entries)
    if d1.is_exact and d2.is_exact:
        return sum((abs(d1.prob(x) - d2.prob(x)) for x in keys), Fraction(0)) / 2
    return math.fsum(abs(float(d1.prob(x)) - float(d2.prob(x))) for x in keys) / 2


def condition_outside(dist: FiniteDistribution, S: Iterable[int]) -> FiniteDistribution:
    """The conditional distribution given ``x not in S``."""
    S = set(S)
    kept = {x: p for x, p in dist.entries.items() if x not in S}
    outside = _total(kept.values())
    if outside <= 0:
        raise AllMassInS("the set S carries all of the probability mass")
    if isinstance(outside, Fraction):
        entries = {x: p / outside for x, p in kept.items()}
    else:
        entries = {x: float(p) / outside for x, p in kept.items()}
    return FiniteDistribution(dist.n, MappingProxyType(entries))


def parse_distribution_spec(text: str) -> FiniteDistribution:
    """``"uniform:n"`` or a path to a distribution JSON file."""
    if text.startswith("uniform:"):
        return uniform(int(text.split(":", 1)[1]))
    with open(text) as fh:
        return FiniteDistribution.from_json(fh.read())
