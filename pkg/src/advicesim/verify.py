"""The acceptance suite: criteria A1-A11, each a deterministic function of the seed.

``verify_all`` runs them in order, prints one table row per criterion and
optionally writes every Monte Carlo report plus a summary to a directory.
Reports carry no timing, so two runs with the same seed write identical
bytes.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .dense import AdviceString, decode_counts, encode_dense, guarded
from .distribution import condition_outside, random_distribution, tv_distance, uniform
from .experiments import run_experiment
from .overlay import (
    distinguish_lower_bound,
    encode_overlay,
    normalization_constant,
    overlay_probability,
    select_low_mass_set,
    tv_bound,
)
from .point import PointConcept, bayes_error, bayes_error_lower_bound, majority_error
from .quantum import (
    build_sample_state,
    closed_form_overlap,
    helstrom_error,
    max_pair_overlap,
    min_copies_bound,
    overlap,
    overlap_floor,
    pe_lower_bound,
)
from .report import ExperimentReport
from .rng import derive_seed, make_rng
from .stats import dense_budget_chain, dense_budget_middle


@dataclass
class CriterionResult:
    id: str
    title: str
    observed: str
    threshold: str
    passed: bool
    reports: dict[str, ExperimentReport] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"id": self.id, "title": self.title, "observed": self.observed,
                "threshold": self.threshold, "passed": self.passed, "details": self.details}


# ---------------------------------------------------------------------------


def check_a1(seed: int, jobs: int = 1) -> CriterionResult:
    reports, fractions = {}, {}
    for q in (4, 8, 16):
        rep = run_experiment({"experiment": "dense", "seed": derive_seed(seed, "A1", q),
                              "trials": 100, "jobs": jobs, "params": {"q": q}})
        reports[f"A1_dense_q{q}"] = rep
        fractions[q] = rep.success_fraction
    ok = all(f >= 2 / 3 for f in fractions.values())
    observed = ", ".join(f"q'={q}: {f:.2f}" for q, f in fractions.items())
    return CriterionResult("A1", "dense codec succeeds at N = 1200 q'^3", observed,
                           "success >= 2/3 each", ok, reports)


def check_a2(seed: int, jobs: int = 1) -> CriterionResult:
    failures = 0
    total = 0
    for length in range(1, 11):
        for bits in itertools.product((0, 1), repeat=length):
            n = max(1, (length + 1).bit_length())
            dist, _ = encode_dense(bits, n)
            probs = [dist.prob(x) for x in range(length + 2)]
            total += 1
            try:
                got = decode_counts(probs).advice
            except Exception:
                failures += 1
                continue
            failures += got is None or got.bits != bits
    return CriterionResult("A2", "dense noiseless roundtrip, all advice of length <= 10",
                           f"{failures} failures / {total}", "0 failures", failures == 0)


def check_a3(seed: int, jobs: int = 1) -> CriterionResult:
    qs = sorted({int(round(v)) for v in np.logspace(0, 6, 400)})
    chain_bad = 0
    for q in qs:
        mid = dense_budget_middle(q)
        for p0 in (Fraction(1, 2 * q), Fraction(1, q)):
            exact, cap = dense_budget_chain(q, p0)
            chain_bad += not (exact <= mid <= cap)
    rng = make_rng(derive_seed(seed, "A3"))
    p0_bad = 0
    for _ in range(10_000):
        advice = AdviceString.random(int(rng.integers(1, 65)), rng)
        g = guarded(advice)
        _, p0 = encode_dense(advice, max(1, (len(g) - 1).bit_length()))
        p0_bad += not (Fraction(1, 2 * len(g)) <= p0 <= Fraction(1, len(g)))
    ok = chain_bad == 0 and p0_bad == 0
    return CriterionResult("A3", "budget chain and p0 bounds",
                           f"chain violations {chain_bad}/{2 * len(qs)}, p0 violations {p0_bad}/10000",
                           "0 violations", ok)


def _a4_bases(seed: int):
    rng = make_rng(derive_seed(seed, "A4"))
    bases = [uniform(8, exact=True)]
    for i in range(20):
        bases.append(random_distribution(3 + i % 8, rng, exact=True, sparsity=0.3 * (i % 3 == 0)))
    return bases


def check_a4(seed: int, jobs: int = 1) -> CriterionResult:
    c_bad = range_bad = 0
    worst = 0.0
    cases = 0
    for base in _a4_bases(seed):
        for h in range(2, 9):
            for bits in itertools.product((0, 1), repeat=h):
                enc = encode_overlay(base, bits)
                cases += 1
                C = enc.C
                c_bad += C != normalization_constant(h, sum(bits))
                range_bad += not (Fraction(2, 3) <= C <= Fraction(4, 3))
                for x in set(enc.encoded.entries) | set(enc.S):
                    dev = abs(float(enc.encoded.prob(x)) - overlay_probability(base, enc.S, bits, x))
                    worst = max(worst, dev)
    ok = c_bad == 0 and range_bad == 0 and worst <= 1e-12
    return CriterionResult("A4", "overlay normalizer and pointwise formula",
                           f"C mismatches {c_bad}, C out of range {range_bad}, max pointwise dev {worst:.3g} ({cases} encodings)",
                           "0, 0, <= 1e-12", ok)


def _eps_check() -> bool:
    for h in range(8, 10_001):
        eps = Fraction(3, 24 * h) ** 2
        if eps > 1 / (6 * Fraction(4, 3) * h):
            return False
    return True


def check_a5(seed: int, jobs: int = 1) -> CriterionResult:
    rep = run_experiment({"experiment": "overlay-decode", "seed": derive_seed(seed, "A5"),
                          "trials": 100, "jobs": jobs,
                          "params": {"base": "uniform:12", "h": 16, "samples": 1_000_000}})
    eps_ok = _eps_check()
    rate = rep.success_fraction
    return CriterionResult("A5", "overlay decoding n=12, h=16, N=1e6",
                           f"recovery {rate:.2f}; eps<=1/(6Ch) for h in [8,1e4]: {eps_ok}",
                           "recovery >= 0.95; symbolic check holds", rate >= 0.95 and eps_ok,
                           {"A5_overlay_decode": rep})


def check_a6(seed: int, jobs: int = 1) -> CriterionResult:
    rep = run_experiment({"experiment": "overlay-nonS", "seed": derive_seed(seed, "A6"),
                          "trials": 400, "jobs": jobs,
                          "params": {"base": "uniform:12", "h": 16, "p": 32}})
    frac = rep.success_fraction
    return CriterionResult("A6", "at least p draws outside S with N = 16 p h",
                           f"fraction {frac:.4f}", ">= 0.75", frac >= 1 - 8 / 32,
                           {"A6_overlay_nonS": rep})


def check_a7(seed: int, jobs: int = 1) -> CriterionResult:
    rng = make_rng(derive_seed(seed, "A7"))
    bad = 0
    cases = 0
    worst_ratio = 0.0
    for n in (8, 12, 16):
        bases = [uniform(n)] + [random_distribution(n, rng) for _ in range(10)]
        for base in bases:
            for h in (4, 8, 16):
                S = select_low_mass_set(base, h)
                tv = tv_distance(base, condition_outside(base, S))
                bound = tv_bound(n, h)
                cases += 1
                bad += tv > bound
                worst_ratio = max(worst_ratio, tv / bound)
    u = uniform(8, exact=True)
    tv_exact = tv_distance(u, condition_outside(u, select_low_mass_set(u, 8)))
    repro = abs(float(tv_exact) - 1 / 32) <= 1e-12 and abs(tv_bound(8, 8) - 8 / 248) <= 1e-12
    ok = bad == 0 and repro
    return CriterionResult("A7", "d_TV(base, conditional) <= h/(2^n - h)",
                           f"violations {bad}/{cases}, max tv/bound {worst_ratio:.4f}; uniform n=8,h=8: tv={float(tv_exact):.12g}, bound={tv_bound(8, 8):.12g}",
                           "0 violations; 1/32 and 8/248 to 1e-12", ok)


def _a8_dists(seed: int, n: int):
    rng = make_rng(derive_seed(seed, "A8", n))
    return [uniform(n, exact=True)] + [
        random_distribution(n, rng, exact=True, sparsity=0.25 * (i % 2), max_weight=20)
        for i in range(20)
    ]


def check_a8(seed: int, jobs: int = 1) -> CriterionResult:
    headline = bayes_error(2, uniform(2, exact=True), 1).value
    below = 0
    outside = 0
    cases = 0
    worst_z = 0.0
    for n in range(1, 5):
        for d_idx, dist in enumerate(_a8_dists(seed, n)):
            for p in range(0, 5):
                exact = bayes_error(n, dist, p).value
                if p < (1 << n):
                    below += exact < bayes_error_lower_bound(n, p)
                mc = bayes_error(n, dist, p, mode="monte_carlo",
                                 seed=derive_seed(seed, "A8mc", n, d_idx, p))
                diff = abs(mc.value - float(exact))
                cases += 1
                if mc.stderr == 0:
                    outside += diff > 1e-12
                else:
                    z = diff / mc.stderr
                    worst_z = max(worst_z, z)
                    outside += z > 3
    ok = headline == Fraction(1, 2) and below == 0 and outside == 0
    return CriterionResult("A8", "Bayes oracle: exact, lower bound, Monte Carlo",
                           f"p_e(2,uniform,1)={headline}; below bound {below}; MC outside 3 SE {outside}/{cases} (max z {worst_z:.2f})",
                           "1/2 exactly; 0; 0", ok)


def check_a9(seed: int, jobs: int = 1) -> CriterionResult:
    third = Fraction(1, 3)
    exact5 = majority_error(third, 5)
    ks = list(range(1, 22, 2))
    errs = [majority_error(third, k) for k in ks]
    monotone = all(a > b for a, b in zip(errs, errs[1:]))
    reports = {}
    worst_z = 0.0
    for k in ks:
        rep = run_experiment({"experiment": "majority", "seed": derive_seed(seed, "A9", k),
                              "trials": 20_000, "jobs": jobs,
                              "params": {"base_error": 1 / 3, "k": k}})
        reports[f"A9_majority_k{k}"] = rep
        e = float(majority_error(third, k))
        sigma = math.sqrt(e * (1 - e) / rep.trials)
        worst_z = max(worst_z, abs(rep.aggregate["mean"] - e) / sigma)
    ok = exact5 == Fraction(51, 243) and monotone and worst_z <= 3
    return CriterionResult("A9", "majority-vote amplification",
                           f"majority_error(1/3,5)={exact5}; strictly decreasing: {monotone}; MC max z {worst_z:.2f}",
                           "51/243; True; <= 3", ok, reports)


def check_a10(seed: int, jobs: int = 1) -> CriterionResult:
    rng = make_rng(derive_seed(seed, "A10"))
    worst_overlap = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 11))
        dist = random_distribution(n, rng, sparsity=float(rng.choice([0.0, 0.5])))
        i, j = (int(v) + 1 for v in rng.choice(1 << n, size=2, replace=False))
        numeric = overlap(build_sample_state(dist, PointConcept(n, i)), build_sample_state(dist, PointConcept(n, j)))
        worst_overlap = max(worst_overlap, abs(numeric - closed_form_overlap(dist, i, j)))
    floor_bad = 0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        dist = random_distribution(n, rng, sparsity=float(rng.choice([0.0, 0.5])))
        floor_bad += max_pair_overlap(dist) < overlap_floor(n) - 1e-12
    uniform_eq = max(abs(max_pair_overlap(uniform(n)) - overlap_floor(n)) for n in range(1, 13))
    worst_helstrom = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        dist = random_distribution(n, rng, sparsity=float(rng.choice([0.0, 0.5])))
        i, j = (int(v) + 1 for v in rng.choice(1 << n, size=2, replace=False))
        s1 = build_sample_state(dist, PointConcept(n, i))
        s2 = build_sample_state(dist, PointConcept(n, j))
        ov = closed_form_overlap(dist, i, j)
        worst_helstrom = max(worst_helstrom, abs(pe_lower_bound(ov, 1) - helstrom_error(s1, s2)))
    copies10 = min_copies_bound(10, 1 / 3)
    poly_ok = all(min_copies_bound(n, 1 / 3) > n ** 3 for n in range(40, 1001))
    ok = (worst_overlap <= 1e-12 and floor_bad == 0 and uniform_eq <= 1e-12
          and worst_helstrom <= 1e-12 and abs(copies10 - 30.15) <= 1e-2 and poly_ok)
    return CriterionResult(
        "A10", "sampling-state closed forms",
        f"overlap dev {worst_overlap:.2g}; floor violations {floor_bad}/100; uniform dev {uniform_eq:.2g}; "
        f"Helstrom dev {worst_helstrom:.2g}; copies(10,1/3)={copies10:.4f}; > n^3 for n in [40,1000]: {poly_ok}",
        "<=1e-12; 0; <=1e-12; <=1e-12; 30.15+-1e-2; True", ok)


def check_a11(seed: int, jobs: int = 1) -> CriterionResult:
    headline = distinguish_lower_bound(1 / 3, 1 / 32)
    h, pe = 8, 1 / 3
    tvs = {}
    for n in range(8, 17):
        base = uniform(n)
        tvs[n] = float(tv_distance(base, condition_outside(base, select_low_mass_set(base, h))))
    ratios = [distinguish_lower_bound(pe, tvs[n + 1]) / distinguish_lower_bound(pe, tvs[n])
              for n in range(8, 16)]
    worst_ratio = max(abs(r - 2) for r in ratios)
    bounds = [distinguish_lower_bound(pe, tv_bound(n, h)) for n in range(8, 21)]
    increasing = all(a < b for a, b in zip(bounds, bounds[1:]))
    ok = abs(headline - 64 / 3) <= 1e-12 and worst_ratio <= 1e-12 and increasing
    return CriterionResult("A11", "hypothesis-testing sample bound",
                           f"bound(1/3,1/32)={headline:.12g}; max |ratio-2| {worst_ratio:.2g}; increasing with tv_bound: {increasing}",
                           "64/3 to 1e-12; <= 1e-12; True", ok)


CRITERIA: dict[str, Callable[..., CriterionResult]] = {
    "A1": check_a1, "A2": check_a2, "A3": check_a3, "A4": check_a4, "A5": check_a5,
    "A6": check_a6, "A7": check_a7, "A8": check_a8, "A9": check_a9, "A10": check_a10,
    "A11": check_a11,
}


def print_table(results: list[CriterionResult], stream=sys.stdout) -> None:
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.id:<4} {status}  {r.title}\n       observed:  {r.observed}\n       threshold: {r.threshold}",
              file=stream)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed", file=stream)


def verify_all(seed: int = 0, jobs: int = 1, out_dir: str | None = None,
               only: list[str] | None = None, stream=sys.stdout) -> list[CriterionResult]:
    results = []
    timings = {}
    for cid, fn in CRITERIA.items():
        if only and cid not in only:
            continue
        started = time.perf_counter()
        res = fn(seed, jobs)
        timings[cid] = time.perf_counter() - started
        results.append(res)
        status = "PASS" if res.passed else "FAIL"
        print(f"[{cid}] {status} ({timings[cid]:.1f}s)", file=sys.stderr, flush=True)
    print_table(results, stream)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for res in results:
            for name, rep in res.reports.items():
                rep.write(os.path.join(out_dir, f"{name}.json"), index=False)
        summary = {"seed": seed, "version": __version__,
                   "all_passed": all(r.passed for r in results),
                   "criteria": [r.row() for r in results]}
        with open(os.path.join(out_dir, "verify_summary.json"), "w") as fh:
            fh.write(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return results
