"""Experiment reports and the seeded trial runner."""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import __version__
from .rng import derive_seed
from .stats import wilson_interval


def trial_seeds(seed: int, trials: int, *keys) -> list[int]:
    return [derive_seed(seed, *keys, t) for t in range(trials)]


def run_trials(fn: Callable[[int], float], trials: int, seed: int, *keys,
               jobs: int = 1) -> list:
    """Evaluate ``fn(trial_seed)`` for every trial, in trial-index order.

    ``fn`` must be picklable when ``jobs > 1``.  Results never depend on
    ``jobs``: each trial's seed is derived from ``(seed, *keys, index)``.
    """
    seeds = trial_seeds(seed, trials, *keys)
    if jobs <= 1 or trials <= 1:
        return [fn(s) for s in seeds]
    chunk = max(1, trials // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, seeds, chunksize=chunk))


def _clean(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if hasattr(value, "item"):
        return _clean(value.item())
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    return str(value)


def aggregate(outcomes: Sequence[float]) -> dict:
    """Mean, standard error and a 95% interval of the per-trial outcomes.

    Binary outcomes also get a success fraction and a Wilson interval;
    other outcomes get a normal-approximation interval.
    """
    vals = [float(v) for v in outcomes]
    k = len(vals)
    if k == 0:
        return {"mean": None, "stderr": None, "ci95": None, "success_fraction": None}
    mean = math.fsum(vals) / k
    var = math.fsum((v - mean) ** 2 for v in vals) / (k - 1) if k > 1 else 0.0
    se = math.sqrt(var / k)
    binary = all(v in (0.0, 1.0) for v in vals)
    if binary:
        ci = wilson_interval(int(round(mean * k)), k)
    else:
        ci = (mean - 1.96 * se, mean + 1.96 * se)
    return {
        "mean": mean,
        "stderr": se,
        "ci95": [ci[0], ci[1]],
        "success_fraction": mean if binary else None,
    }


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict
    seed: int
    trials: int
    outcomes: list
    aggregate: dict = field(default_factory=dict)
    duration_s: float = 0.0
    version: str = __version__

    @property
    def success_fraction(self):
        return self.aggregate.get("success_fraction")

    def to_dict(self, timing: bool = False) -> dict:
        data = {
            "experiment": self.experiment,
            "parameters": _clean(dict(self.parameters)),
            "seed": self.seed,
            "trials": self.trials,
            "outcomes": _clean(list(self.outcomes)),
            "aggregate": _clean(self.aggregate),
            "version": self.version,
        }
        if timing:
            data["duration_s"] = self.duration_s
        return data

    def to_json(self, timing: bool = False) -> str:
        """Canonical JSON.  Wall-clock time is left out unless ``timing`` is set,
        so that equal inputs serialize to equal bytes."""
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2) + "\n"

    def write(self, path: str, timing: bool = False, index: bool = True) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(self.to_json(timing))
        if index:
            append_index(os.path.join(os.path.dirname(os.path.abspath(path)), "index.csv"), self)


INDEX_FIELDS = ["experiment", "parameters", "seed", "trials", "mean", "success_fraction"]


def append_index(path: str, report: ExperimentReport) -> None:
    new = not os.path.exists(path)
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(INDEX_FIELDS)
        writer.writerow([
            report.experiment,
            json.dumps(_clean(report.parameters), sort_keys=True),
            report.seed,
            report.trials,
            report.aggregate.get("mean"),
            report.aggregate.get("success_fraction"),
        ])


def build_report(experiment: str, parameters: dict, seed: int, outcomes: list,
                 started: float) -> ExperimentReport:
    return ExperimentReport(
        experiment=experiment,
        parameters=parameters,
        seed=seed,
        trials=len(outcomes),
        outcomes=list(outcomes),
        aggregate=aggregate(outcomes),
        duration_s=time.perf_counter() - started,
    )
