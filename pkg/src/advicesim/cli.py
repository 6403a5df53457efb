"""Command-line entry point ``advicesim``.

Every subcommand accepts ``--seed`` (default ``$ADVICESIM_SEED`` or 0),
``--jobs``, ``--out`` and ``--config``.  A config file is a JSON object whose
keys are flag names (dashes or underscores); explicit flags win over it.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__, dense, overlay, point, quantum, stats
from .distribution import SampleBatch, parse_distribution_spec, sample, uniform
from .errors import AdviceSimError
from .experiments import run_experiment
from .rng import default_seed


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=1, help="worker processes (parallelism hint)")
    parser.add_argument("--out", default=None, help="write the JSON result here")
    parser.add_argument("--config", default=None, help="JSON file of default flag values")


def _num(text: str):
    """Parse ``1/3`` as an exact fraction, anything else as a float."""
    return Fraction(text) if "/" in text else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="advicesim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="group", required=True)

    g = top.add_parser("dense", help="dense codec").add_subparsers(dest="action", required=True)
    for action in ("encode", "decode", "simulate"):
        p = g.add_parser(action)
        _common(p)
        p.add_argument("--advice", help="bit string, e.g. 1011")
        p.add_argument("--n", type=int, default=None, help="domain width in bits")
        p.add_argument("--samples", type=int, default=None, help="draws per trial (default 1200 q'^3)")
        p.add_argument("--trials", type=int, default=100)
        if action == "decode":
            p.add_argument("--batch", help="sample batch JSON; drawn from --advice if absent")

    g = top.add_parser("overlay", help="overlay codec").add_subparsers(dest="action", required=True)
    for action in ("encode", "decode", "simulate", "pipeline"):
        p = g.add_parser(action)
        _common(p)
        p.add_argument("--base", default="uniform:12", help='distribution JSON path or "uniform:n"')
        p.add_argument("--advice", help="bit string of length h >= 2")
        p.add_argument("--h", type=int, default=16, help="random advice of this length when --advice is absent")
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--p", type=int, default=32, help="training-set size outside S")
        p.add_argument("--trials", type=int, default=100)
        if action == "decode":
            p.add_argument("--batch", help="sample batch JSON; drawn from the encoding if absent")
        if action == "pipeline":
            p.add_argument("--machine", default="advice-xor-majority", choices=sorted(overlay.MACHINES))
            p.add_argument("--threshold", type=int, default=None, help="labels are 1{x >= threshold}")
        if action == "simulate":
            p.add_argument("--mode", choices=("decode", "count"), default="decode")

    g = top.add_parser("point", help="point-function class").add_subparsers(dest="action", required=True)
    for action in ("bayes", "bound", "majority"):
        p = g.add_parser(action)
        _common(p)
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--p", type=int, default=1)
        p.add_argument("--dist", default=None, help='distribution JSON path or "uniform:n"')
        p.add_argument("--mode", choices=("exact", "monte_carlo"), default="exact")
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--error", type=_num, default=Fraction(1, 3), help="per-vote error (majority)")
        p.add_argument("--k", type=int, default=5, help="odd vote count (majority)")

    g = top.add_parser("quantum", help="sampling-state bounds").add_subparsers(dest="action", required=True)
    for action in ("overlap", "pe-bound", "copies"):
        p = g.add_parser(action)
        _common(p)
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--dist", default=None)
        p.add_argument("--i", type=int, default=1)
        p.add_argument("--j", type=int, default=2)
        p.add_argument("--copies", type=int, default=1)
        p.add_argument("--overlap", type=float, default=None)
        p.add_argument("--pe", type=_num, default=Fraction(1, 3))

    g = top.add_parser("stats", help="concentration budgets").add_subparsers(dest="action", required=True)
    for action in ("hoeffding", "chain"):
        p = g.add_parser(action)
        _common(p)
        p.add_argument("--epsilon", type=_num, default=0.1)
        p.add_argument("--delta", type=_num, default=0.05)
        p.add_argument("--q", type=int, default=4)
        p.add_argument("--p0", type=_num, default=None)

    p = top.add_parser("run", help="run a registered experiment from a config")
    _common(p)
    p.add_argument("--experiment", default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")

    p = top.add_parser("verify", help="run the acceptance suite")
    _common(p)
    p.add_argument("--only", nargs="*", default=None, help="criterion ids, e.g. A1 A7")
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace, argv) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        config = json.load(fh)
    given = {a.split("=", 1)[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in config.items():
        attr = key.replace("-", "_")
        if attr not in given:
            setattr(args, attr, value)
    return args


def _emit(payload, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _report(rep, out):
    if out:
        rep.write(out)
    sys.stdout.write(rep.to_json())


def _dist(spec: str | None, n: int):
    return parse_distribution_spec(spec) if spec else uniform(n)


def _need(advice, action):
    if advice is None:
        raise SystemExit(f"advicesim: {action} needs --advice")
    return advice


def _dense(args) -> int:
    advice = dense.AdviceString.parse(args.advice) if args.advice else None
    if args.action == "encode":
        _need(advice, "dense encode")
        q = len(advice) + 2
        n = args.n if args.n is not None else max(1, (q - 1).bit_length())
        dist, p0 = dense.encode_dense(advice, n)
        _emit({"n": n, "guarded": str(dense.guarded(advice)), "p0": str(p0),
               "entries": [[x, str(p)] for x, p in dist.items()]}, args.out)
        return 0
    if args.action == "decode":
        if args.batch:
            with open(args.batch) as fh:
                batch = SampleBatch.from_json(fh.read())
            q = len(advice) + 2 if advice else args.n
            if q is None:
                raise SystemExit("decode --batch needs --advice (for its length) or --n as the guarded length")
        else:
            q = len(_need(advice, "dense decode")) + 2
            n = args.n if args.n is not None else max(1, (q - 1).bit_length())
            dist, _ = dense.encode_dense(advice, n)
            batch = sample(dist, args.samples or dense.dense_sample_bound(q), args.seed)
        res = dense.decode_dense(batch, q)
        _emit({"advice": str(res.advice) if res.advice else "", "M": res.M, "m": res.m,
               "counts": list(res.counts), "ambiguous": res.ambiguous}, args.out)
        return 0
    params = {"advice": args.advice}
    if args.n is not None:
        params["n"] = args.n
    if args.samples:
        params["samples"] = args.samples
    rep = run_experiment({"experiment": "dense", "seed": args.seed, "trials": args.trials,
                          "jobs": args.jobs, "params": params})
    _report(rep, args.out)
    return 0


def _overlay(args) -> int:
    base = parse_distribution_spec(args.base)
    advice = dense.AdviceString.parse(args.advice) if args.advice else None
    if args.action == "encode":
        enc = overlay.encode_overlay(base, _need(advice, "overlay encode"))
        _emit({"n": base.n, "S": list(enc.S), "C": str(enc.C),
               "bits": [enc.bit_of[s] for s in enc.S],
               "entries": [[x, float(p)] for x, p in enc.encoded.items()]}, args.out)
        return 0
    if args.action == "decode":
        h = len(_need(advice, "overlay decode"))
        if args.batch:
            with open(args.batch) as fh:
                batch = SampleBatch.from_json(fh.read())
        else:
            enc = overlay.encode_overlay(base, advice)
            batch = sample(enc.encoded, args.samples or 1_000_000, args.seed)
        got = overlay.decode_overlay(batch, base, h)
        _emit({"advice": str(got), "S": list(overlay.select_low_mass_set(base, h))}, args.out)
        return 0
    params = {"base": args.base, "advice": args.advice, "h": args.h, "p": args.p}
    if args.samples:
        params["samples"] = args.samples
    if args.action == "simulate":
        name = "overlay-decode" if args.mode == "decode" else "overlay-nonS"
    else:
        name = "overlay-pipeline"
        params["machine"] = args.machine
        if args.threshold is not None:
            params["threshold"] = args.threshold
    rep = run_experiment({"experiment": name, "seed": args.seed, "trials": args.trials,
                          "jobs": args.jobs, "params": params})
    _report(rep, args.out)
    return 0


def _point(args) -> int:
    if args.action == "bayes":
        dist = _dist(args.dist, args.n)
        if args.mode == "exact" and not args.dist:
            dist = uniform(args.n, exact=True)
        est = point.bayes_error(args.n, dist, args.p, mode=args.mode, seed=args.seed, draws=args.trials)
        out = {"n": args.n, "p": args.p, "mode": args.mode, "value": float(est.value),
               "stderr": est.stderr}
        if args.p < (1 << args.n):
            out["lower_bound"] = float(point.bayes_error_lower_bound(args.n, args.p))
        _emit(out, args.out)
        return 0
    if args.action == "bound":
        lb = point.bayes_error_lower_bound(args.n, args.p)
        _emit({"n": args.n, "p": args.p, "lower_bound": float(lb), "exact": str(lb)}, args.out)
        return 0
    err = point.majority_error(args.error, args.k)
    _emit({"base_error": str(args.error), "k": args.k, "majority_error": float(err),
           "exact": str(err)}, args.out)
    return 0


def _quantum(args) -> int:
    if args.action == "overlap":
        dist = _dist(args.dist, args.n)
        s1 = quantum.build_sample_state(dist, point.PointConcept(dist.n, args.i))
        s2 = quantum.build_sample_state(dist, point.PointConcept(dist.n, args.j))
        _emit({"n": dist.n, "i": args.i, "j": args.j, "overlap": quantum.overlap(s1, s2),
               "closed_form": quantum.closed_form_overlap(dist, args.i, args.j),
               "max_pair_overlap": quantum.max_pair_overlap(dist)}, args.out)
        return 0
    if args.action == "pe-bound":
        ov = args.overlap
        if ov is None:
            dist = _dist(args.dist, args.n)
            ov = quantum.closed_form_overlap(dist, args.i, args.j)
        _emit({"overlap": ov, "copies": args.copies,
               "pe_lower_bound": quantum.pe_lower_bound(ov, args.copies)}, args.out)
        return 0
    pe = float(args.pe)
    _emit({"n": args.n, "pe": pe, "min_copies": quantum.min_copies_bound(args.n, pe)}, args.out)
    return 0


def _stats(args) -> int:
    if args.action == "hoeffding":
        spec = stats.ConfidenceSpec(float(args.epsilon), float(args.delta))
        _emit({"epsilon": spec.epsilon, "delta": spec.delta,
               "samples": stats.hoeffding_samples(spec)}, args.out)
        return 0
    q = args.q
    p0 = args.p0 if args.p0 is not None else Fraction(1, q)
    exact, cap = stats.dense_budget_chain(q, p0)
    _emit({"q": q, "p0": str(p0), "N_exact": exact, "N_middle": stats.dense_budget_middle(q),
           "N_cap": cap}, args.out)
    return 0


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _run(args) -> int:
    config = {"experiment": args.experiment, "seed": args.seed, "jobs": args.jobs,
              "params": dict(getattr(args, "params", None) or {})}
    if args.trials is not None:
        config["trials"] = args.trials
    for item in args.param:
        key, _, value = item.partition("=")
        config["params"][key] = _parse_value(value)
    rep = run_experiment(config)
    _report(rep, args.out)
    return 0


def _verify(args) -> int:
    from .verify import verify_all

    results = verify_all(seed=args.seed, jobs=args.jobs, out_dir=args.out, only=args.only)
    return 0 if all(r.passed for r in results) else 1


HANDLERS = {"dense": _dense, "overlay": _overlay, "point": _point, "quantum": _quantum,
            "stats": _stats, "run": _run, "verify": _verify}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args = _apply_config(parser, args, argv)
    if args.seed is None:
        args.seed = default_seed()
    try:
        return HANDLERS[args.group](args)
    except AdviceSimError as exc:
        print(f"advicesim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
