"""Concentration-inequality budgets used by the codecs and the harness.

Every ``log`` is natural and every sample count is rounded up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import P0OutOfBounds
from .rng import make_rng


@dataclass(frozen=True)
class ConfidenceSpec:
    """Additive accuracy ``epsilon`` achieved with failure probability ``delta``."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


def hoeffding_samples(spec: ConfidenceSpec) -> int:
    """Samples making one empirical frequency epsilon-accurate w.p. 1 - delta."""
    return math.ceil(math.log(2 / spec.delta) / (2 * spec.epsilon ** 2))


def union_split(delta_total, events: int):
    """Per-event failure probability so that the union stays below ``delta_total``."""
    if events < 1:
        raise ValueError(f"events must be >= 1, got {events}")
    return delta_total / events


def chebyshev_tail(K: float) -> float:
    """Upper bound on ``P(|Z - E Z| >= K sigma)``."""
    if K <= 0:
        raise ValueError(f"K must be positive, got {K}")
    return 1 / K ** 2


def dense_budget_chain(q: int, p0) -> tuple[int, int]:
    """Sample budgets for the dense codec with ``q`` guarded positions.

    Returns ``(N_exact, N_cap)``: the Hoeffding/union-bound count at
    ``epsilon = p0/10`` and ``delta = 1/(3q)``, and the polynomial cap
    ``1200 q**3`` that dominates it whenever ``1/(2q) <= p0 <= 1/q``.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    p0 = Fraction(p0) if not isinstance(p0, float) else p0
    if not Fraction(1, 2 * q) <= p0 <= Fraction(1, q):
        raise P0OutOfBounds(f"p0={p0} outside [1/(2q), 1/q] for q={q}")
    coef = float(50 / Fraction(p0) ** 2)
    return _ceil_log_budget(coef, q), 1200 * q ** 3


def dense_budget_middle(q: int) -> int:
    """The intermediate term ``ceil(200 q**2 log(6q))`` of the budget chain."""
    return _ceil_log_budget(float(200 * q * q), q)


def _ceil_log_budget(coef: float, q: int) -> int:
    return math.ceil(coef * math.log(6 * q))


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def hoeffding_violation_rate(p: float, spec: ConfidenceSpec, trials: int, seed: int) -> float:
    """Fraction of seeded trials whose Bernoulli(p) mean misses p by more than epsilon."""
    n = hoeffding_samples(spec)
    means = make_rng(seed).binomial(n, p, size=trials) / n
    return float(np.mean(np.abs(means - p) > spec.epsilon))
