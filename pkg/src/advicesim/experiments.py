"""Named experiments and the single entry point that runs them from a config.

A config is a flat mapping::

    {"experiment": "dense", "seed": 7, "trials": 100, "jobs": 1,
     "params": {"q": 8}}

Unknown experiment names raise :class:`UnknownExperiment`; missing or
malformed parameters raise :class:`InvalidParameters`.
"""

from __future__ import annotations

import time
from functools import partial
from typing import Callable


from . import dense, overlay, point
from .dense import AdviceString
from .distribution import parse_distribution_spec
from .errors import InvalidParameters, UnknownExperiment
from .report import ExperimentReport, build_report, run_trials
from .rng import default_seed, derive_seed, make_rng
from .stats import ConfidenceSpec, hoeffding_samples


def _advice(params: dict, seed: int, length_key: str, offset: int = 0) -> AdviceString:
    if params.get("advice"):
        return AdviceString.parse(str(params["advice"]))
    if length_key not in params:
        raise InvalidParameters(f"give either 'advice' or '{length_key}'")
    length = int(params[length_key]) - offset
    if length < 1:
        raise InvalidParameters(f"'{length_key}' too small to hold any advice")
    return AdviceString.random(length, make_rng(derive_seed(seed, "advice", length)))


def _run_dense(params, seed, trials, jobs):
    advice = _advice(params, seed, "q", offset=len(dense.GUARD))
    q = len(advice) + len(dense.GUARD)
    n = int(params.get("n", max(1, (q - 1).bit_length())))
    N = int(params.get("samples") or dense.dense_sample_bound(q))
    return dense.simulate_dense(advice, n, N, trials, seed, jobs=jobs)


def _base(params):
    return parse_distribution_spec(str(params.get("base", "uniform:12")))


def _run_overlay_decode(params, seed, trials, jobs):
    advice = _advice(params, seed, "h")
    N = int(params.get("samples", 1_000_000))
    return overlay.simulate_overlay(_base(params), advice, N, trials, seed, jobs=jobs)


def _run_overlay_nonS(params, seed, trials, jobs):
    advice = _advice(params, seed, "h")
    samples = params.get("samples")
    return overlay.simulate_nonS_count(_base(params), advice, int(params.get("p", 32)), trials, seed,
                                       N=int(samples) if samples else None, jobs=jobs)


def _run_overlay_pipeline(params, seed, trials, jobs):
    advice = _advice(params, seed, "h")
    threshold = params.get("threshold")
    return overlay.simulate_pipeline(
        _base(params), advice, int(params.get("p", 32)), int(params.get("samples", 200_000)),
        trials, seed, machine=str(params.get("machine", "advice-xor-majority")),
        threshold=int(threshold) if threshold is not None else None, jobs=jobs,
    )


def _run_majority(params, seed, trials, jobs):
    return point.simulate_majority(float(params.get("base_error", 1 / 3)), int(params.get("k", 5)),
                                   trials, seed, jobs=jobs)


def _run_listing(params, seed, trials, jobs):
    return point.simulate_listing(int(params.get("n", 6)), float(params.get("base_error", 1 / 3)),
                                  float(params.get("delta", 0.05)), trials, seed, jobs=jobs)


def _run_bayes(params, seed, trials, jobs):
    n = int(params.get("n", 3))
    dist = parse_distribution_spec(str(params.get("dist", f"uniform:{n}")))
    return point.simulate_bayes(n, dist, int(params.get("p", 2)), trials, seed, jobs=jobs)


def _hoeffding_trial(p: float, n: int, eps: float, seed: int) -> int:
    mean = make_rng(seed).binomial(n, p) / n
    return int(abs(mean - p) > eps)


def _run_hoeffding(params, seed, trials, jobs):
    p = float(params.get("p", 0.3))
    spec = ConfidenceSpec(float(params.get("epsilon", 0.05)), float(params.get("delta", 0.05)))
    n = hoeffding_samples(spec)
    started = time.perf_counter()
    outcomes = run_trials(partial(_hoeffding_trial, p, n, spec.epsilon), trials, seed, "hoeffding", jobs=jobs)
    params = {"p": p, "epsilon": spec.epsilon, "delta": spec.delta, "N": n}
    return build_report("hoeffding", params, seed, outcomes, started)


REGISTRY: dict[str, Callable[..., ExperimentReport]] = {
    "dense": _run_dense,
    "overlay-decode": _run_overlay_decode,
    "overlay-nonS": _run_overlay_nonS,
    "overlay-pipeline": _run_overlay_pipeline,
    "majority": _run_majority,
    "listing": _run_listing,
    "bayes": _run_bayes,
    "hoeffding": _run_hoeffding,
}


def run_experiment(config: dict) -> ExperimentReport:
    name = config.get("experiment")
    if name not in REGISTRY:
        raise UnknownExperiment(f"unknown experiment {name!r}; known: {sorted(REGISTRY)}")
    seed = config.get("seed")
    seed = default_seed() if seed is None else int(seed)
    trials = int(config.get("trials", 100))
    jobs = int(config.get("jobs", 1))
    if trials < 1:
        raise InvalidParameters(f"trials must be >= 1, got {trials}")
    try:
        return REGISTRY[name](dict(config.get("params", {})), seed, trials, jobs)
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, (InvalidParameters, UnknownExperiment)):
            raise
        raise InvalidParameters(f"{name}: {exc}") from exc
