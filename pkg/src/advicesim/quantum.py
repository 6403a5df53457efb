"""Sampling-advice pure states for the point class, and the bounds on telling
them apart.

The state for concept ``j`` is ``sum_x sqrt(P(x)) |x>|c_j(x)>``.  Its
amplitudes are real and non-negative, so everything reduces to real inner
products; no density matrices are ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import FiniteDistribution
from .errors import PeOutOfRange, TooLarge, WidthMismatch
from .point import PointConcept, concept_eval

MAX_STATE_WIDTH = 20


@dataclass(frozen=True)
class PureState:
    """Amplitudes over ``(x, label)`` with the label as the low-order bit."""

    n: int
    amplitudes: np.ndarray

    def amplitude(self, x: int, label: int) -> float:
        return float(self.amplitudes[2 * x + label])

    def norm(self) -> float:
        return float(math.sqrt(math.fsum(self.amplitudes ** 2)))


def build_sample_state(dist: FiniteDistribution, concept: PointConcept) -> PureState:
    if dist.n != concept.n:
        raise WidthMismatch(f"distribution width {dist.n} != concept width {concept.n}")
    if dist.n > MAX_STATE_WIDTH:
        raise TooLarge(f"state vectors limited to n <= {MAX_STATE_WIDTH}")
    amps = np.zeros(2 << dist.n)
    for x, p in dist.entries.items():
        amps[2 * x + concept_eval(concept, x)] = math.sqrt(p)
    amps.setflags(write=False)
    return PureState(dist.n, amps)


def overlap(s1: PureState, s2: PureState) -> float:
    if s1.n != s2.n:
        raise WidthMismatch(f"state widths differ: {s1.n} vs {s2.n}")
    return float(math.fsum(s1.amplitudes * s2.amplitudes))


def closed_form_overlap(dist: FiniteDistribution, i: int, j: int) -> float:
    """``1 - P(i-1) - P(j-1)`` for distinct concepts; 1 when ``i == j``."""
    if i == j:
        return 1.0
    return 1 - float(dist.prob(i - 1)) - float(dist.prob(j - 1))


def helstrom_error(s1: PureState, s2: PureState) -> float:
    """Optimal equal-prior error for discriminating two pure states.

    Computed as ``(1 - trace_norm(rho - sigma)/2) / 2`` from the eigenvalues of
    ``rho - sigma`` restricted to the span of the two vectors.
    """
    u = s1.amplitudes
    v = s2.amplitudes
    e1 = u / np.linalg.norm(u)
    w = v - np.dot(e1, v) * e1
    wn = np.linalg.norm(w)
    basis = [e1] if wn < 1e-15 else [e1, w / wn]
    a = np.array([np.dot(b, u) for b in basis])
    c = np.array([np.dot(b, v) for b in basis])
    diff = np.outer(a, a) - np.outer(c, c)
    trace_norm = float(np.abs(np.linalg.eigvalsh(diff)).sum())
    return 0.5 * (1 - 0.5 * trace_norm)


def pe_lower_bound(overlap_value: float, N: int) -> float:
    """``(1 - sqrt(1 - |overlap|**(2N))) / 2``: error floor with ``N`` copies."""
    if not 0 <= abs(overlap_value) <= 1:
        raise ValueError(f"|overlap| must lie in [0, 1], got {overlap_value}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return 0.5 * (1 - math.sqrt(1 - abs(overlap_value) ** (2 * N)))


def min_copies_bound(n: int, pe_star: float) -> float:
    """``-2**n * log(1 - (1 - 2 pe)**2) / 4`` copies needed for error ``pe``."""
    if not 0 < pe_star < 0.5:
        raise PeOutOfRange(f"pe_star must lie in (0, 1/2), got {pe_star}")
    return -(2.0 ** n) * math.log(1 - (1 - 2 * pe_star) ** 2) / 4


def copies_needed(n: int, pe_star: float) -> float:
    """The sharper intermediate form ``log(1 - (1-2pe)**2) / (2 log(1 - 2/2**n))``."""
    if not 0 < pe_star < 0.5:
        raise PeOutOfRange(f"pe_star must lie in (0, 1/2), got {pe_star}")
    if n < 2:
        raise ValueError("needs n >= 2 so that 1 - 2/2**n is positive")
    return math.log(1 - (1 - 2 * pe_star) ** 2) / (2 * math.log1p(-2 / 2 ** n))


def overlap_floor(n: int) -> float:
    return (1 - 2 / 2 ** n) ** 2


def max_pair_overlap(dist: FiniteDistribution) -> float:
    """Largest squared overlap between two distinct concept states.

    Attained by the two least likely strings; never below ``(1 - 2/2**n)**2``.
    """
    if dist.n > MAX_STATE_WIDTH:
        raise TooLarge(f"limited to n <= {MAX_STATE_WIDTH}")
    size = dist.size
    if size < 2:
        raise ValueError("need at least two concepts")
    smallest = sorted(float(p) for p in dist.entries.values())[:2]
    zeros = size - len(dist)
    smallest = ([0.0] * min(2, zeros) + smallest)[:2]
    value = (1 - smallest[0] - smallest[1]) ** 2
    floor = overlap_floor(dist.n)
    if value < floor - 1e-12:
        raise ArithmeticError(f"max pair overlap {value} fell below the floor {floor}")
    return value
