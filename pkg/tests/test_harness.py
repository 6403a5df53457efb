import csv
import json
import math

import pytest

from advicesim import __version__
from advicesim.cli import main
from advicesim.errors import InvalidParameters, UnknownExperiment
from advicesim.experiments import REGISTRY, run_experiment
from advicesim.report import aggregate, build_report, run_trials
from advicesim.rng import derive_seed


def _square(seed):
    return (seed % 1000) / 1000


def test_derive_seed_is_stable_and_key_sensitive():
    assert derive_seed(0, "a", 1) == derive_seed(0, "a", 1)
    assert derive_seed(0, "a", 1) != derive_seed(0, "a", 2)
    assert derive_seed(0, "a", 1) != derive_seed(1, "a", 1)
    assert 0 <= derive_seed(5, "x") < 2 ** 63


def test_run_trials_serial_equals_parallel():
    assert run_trials(_square, 50, 3, "k") == run_trials(_square, 50, 3, "k", jobs=2)


def test_aggregate_binary_and_real():
    agg = aggregate([1, 1, 0, 1])
    assert agg["success_fraction"] == 0.75
    assert agg["ci95"][0] < 0.75 < agg["ci95"][1]
    agg = aggregate([0.5, 1.5])
    assert agg["success_fraction"] is None
    assert agg["stderr"] == pytest.approx(0.5)


def test_dense_config_report():
    rep = run_experiment({"experiment": "dense", "seed": 7, "trials": 100, "params": {"q": 8}})
    assert rep.trials == len(rep.outcomes) == 100
    assert rep.success_fraction >= 2 / 3
    assert rep.parameters["q_guarded"] == 8
    assert rep.aggregate == aggregate(rep.outcomes)


def test_same_config_gives_identical_bytes():
    cfg = {"experiment": "overlay-nonS", "seed": 2, "trials": 30, "params": {"h": 8, "p": 16}}
    assert run_experiment(cfg).to_json() == run_experiment(dict(cfg)).to_json()


def test_parallel_report_matches_serial():
    cfg = {"experiment": "majority", "seed": 1, "trials": 200, "params": {"base_error": 0.3, "k": 7}}
    serial = run_experiment(cfg).to_json()
    parallel = run_experiment(dict(cfg, jobs=2)).to_json()
    assert serial == parallel


def test_unknown_and_invalid():
    with pytest.raises(UnknownExperiment):
        run_experiment({"experiment": "nope"})
    with pytest.raises(InvalidParameters):
        run_experiment({"experiment": "majority", "trials": 5, "params": {"k": 4}})
    with pytest.raises(InvalidParameters):
        run_experiment({"experiment": "dense", "trials": 0})


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_every_registered_experiment_runs(name):
    params = {
        "dense": {"q": 4, "samples": 2000},
        "overlay-decode": {"base": "uniform:8", "h": 4, "samples": 20000},
        "overlay-nonS": {"h": 4, "p": 12},
        "overlay-pipeline": {"base": "uniform:8", "h": 4, "p": 12, "samples": 20000},
        "majority": {"k": 3},
        "listing": {"n": 3},
        "bayes": {"n": 3, "p": 2},
        "hoeffding": {},
    }[name]
    rep = run_experiment({"experiment": name, "seed": 0, "trials": 4, "params": params})
    assert rep.experiment == name and len(rep.outcomes) == 4
    assert json.loads(rep.to_json())["version"] == __version__


def test_report_write_and_index(tmp_path):
    rep = build_report("demo", {"a": 1}, 0, [1, 0, 1], 0.0)
    rep.write(str(tmp_path / "r1.json"))
    rep.write(str(tmp_path / "r2.json"))
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    rows = list(csv.DictReader((tmp_path / "index.csv").open()))
    assert len(rows) == 2 and rows[0]["experiment"] == "demo"
    assert "duration_s" not in json.loads((tmp_path / "r1.json").read_text())
    assert "duration_s" in json.loads(rep.to_json(timing=True))


# --- CLI ----------------------------------------------------------------------

def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_cli_dense_encode_decode(capsys):
    assert main(["dense", "encode", "--advice", "10"]) == 0
    out = _json_out(capsys)
    assert out["p0"] == "1/6" and out["guarded"] == "0110"
    assert main(["dense", "decode", "--advice", "1011", "--seed", "3"]) == 0
    assert _json_out(capsys)["advice"] == "1011"


def test_cli_decode_from_batch_file(tmp_path, capsys):
    from advicesim.dense import encode_dense
    from advicesim.distribution import sample

    d, _ = encode_dense("110", 3)
    path = tmp_path / "batch.json"
    path.write_text(sample(d, 200_000, 1).to_json())
    assert main(["dense", "decode", "--batch", str(path), "--n", "5"]) == 0
    assert _json_out(capsys)["advice"] == "110"


def test_cli_dense_simulate_writes_report(tmp_path, capsys):
    out = tmp_path / "dense.json"
    code = main(["dense", "simulate", "--advice", "10", "--trials", "5", "--seed", "1",
                 "--samples", "3000", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["trials"] == 5 and rep["seed"] == 1
    assert (tmp_path / "index.csv").exists()


def test_cli_overlay(capsys):
    assert main(["overlay", "encode", "--base", "uniform:2", "--advice", "10"]) == 0
    assert float(_json_out(capsys)["C"]) == 1
    assert main(["overlay", "decode", "--base", "uniform:10", "--advice", "0110", "--seed", "2"]) == 0
    assert _json_out(capsys)["advice"] == "0110"
    assert main(["overlay", "simulate", "--mode", "count", "--base", "uniform:10",
                 "--advice", "1010", "--p", "16", "--trials", "10"]) == 0
    assert _json_out(capsys)["experiment"] == "overlay-nonS"


def test_cli_point_quantum_stats(capsys):
    assert main(["point", "bayes", "--n", "2", "--p", "1"]) == 0
    assert _json_out(capsys)["value"] == 0.5
    assert main(["point", "majority", "--error", "1/3", "--k", "5"]) == 0
    assert _json_out(capsys)["exact"] == "17/81"
    assert main(["point", "bound", "--n", "10", "--p", "0"]) == 0
    assert _json_out(capsys)["exact"] == "1023/1024"
    assert main(["quantum", "overlap", "--dist", "uniform:2"]) == 0
    assert _json_out(capsys)["closed_form"] == 0.5
    assert main(["quantum", "pe-bound", "--overlap", "0.5"]) == 0
    assert _json_out(capsys)["pe_lower_bound"] == pytest.approx(0.5 * (1 - math.sqrt(3) / 2))
    assert main(["quantum", "copies", "--n", "10"]) == 0
    assert _json_out(capsys)["min_copies"] == pytest.approx(30.15, abs=1e-2)
    assert main(["stats", "hoeffding"]) == 0
    assert _json_out(capsys)["samples"] == 185
    assert main(["stats", "chain", "--q", "4", "--p0", "1/6"]) == 0
    assert _json_out(capsys)["N_exact"] == 5721


def test_cli_errors_exit_nonzero(capsys):
    assert main(["run", "--experiment", "nope"]) == 2
    assert "UnknownExperiment" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["dense", "encode"])


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "majority", "trials": 12, "seed": 4,
                               "params": {"k": 3, "base_error": 0.25}}))
    assert main(["run", "--config", str(cfg)]) == 0
    a = _json_out(capsys)
    assert (a["trials"], a["seed"], a["parameters"]["k"]) == (12, 4, 3)
    assert main(["run", "--config", str(cfg), "--seed", "9", "--param", "k=5"]) == 0
    b = _json_out(capsys)
    assert (b["trials"], b["seed"], b["parameters"]["k"]) == (12, 9, 5)


def test_cli_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("ADVICESIM_SEED", "21")
    assert main(["run", "--experiment", "majority", "--trials", "3"]) == 0
    assert _json_out(capsys)["seed"] == 21
