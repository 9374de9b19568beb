import json
import math

import numpy as np
import pytest

from lqcentroid import acceptance, runner
from lqcentroid.cli import main
from lqcentroid.runner import ConfigError, ExperimentConfig, StageError, run
from lqcentroid.sampler import load_cloud

pytestmark = pytest.mark.filterwarnings("ignore:no search start improved")


def _config(tmp_path, **kw):
    d = {"seed": 7, "N": 4000, "body": {"kind": "cube", "dim": 4}, "out": str(tmp_path / "run")}
    d.update(kw)
    return d


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


# -- config ------------------------------------------------------------------------


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig.from_dict(_config(tmp_path, q_grid=[1, 2, 4], search={"starts": 3}, t_grid=[1, 2]))
    again = ExperimentConfig.from_json(cfg.to_json())
    assert again == cfg and again.hash() == cfg.hash()


def test_config_hash_ignores_key_order(tmp_path):
    d = _config(tmp_path, search={"starts": 3, "step_tol": 1e-4})
    shuffled = dict(reversed(list(d.items())))
    shuffled["search"] = {"step_tol": 1e-4, "starts": 3}
    assert ExperimentConfig.from_dict(d).hash() == ExperimentConfig.from_dict(shuffled).hash()
    assert ExperimentConfig.from_dict(d).hash() != ExperimentConfig.from_dict({**d, "seed": 8}).hash()


@pytest.mark.parametrize(
    "change, match",
    [
        ({"seed": None}, "seed"),
        ({"seed": -3}, None),
        ({"N": 0}, "N"),
        ({"logconcave": {"family": "gaussian", "cov": [[1]]}}, "exactly one"),
        ({"checks": ["nope"]}, "unknown checks"),
        ({"search": {"speed": 3}}, "search"),
        ({"colour": 1}, "unknown config fields"),
        ({"schema_version": 99}, "schema_version"),
    ],
)
def test_config_errors(tmp_path, change, match):
    with pytest.raises(ConfigError, match=match):
        ExperimentConfig.from_dict({**_config(tmp_path), **change})


def test_seed_is_mandatory(tmp_path):
    d = _config(tmp_path)
    del d["seed"]
    with pytest.raises(ConfigError, match="seed"):
        ExperimentConfig.from_dict(d)


def test_untrusted_q_flagged(tmp_path):
    cfg = ExperimentConfig.from_dict(_config(tmp_path, q_grid=[1, 2, 16, 32]))
    assert cfg.untrusted_q == [32]


# -- run ------------------------------------------------------------------------------


def test_run_sampling_only(tmp_path):
    m = run(ExperimentConfig.from_dict(_config(tmp_path)))
    assert set(m.artifacts) == {"cloud", "config", "manifest", "timings"}
    cloud = load_cloud(tmp_path / "run" / "cloud.bin")
    assert cloud.points.shape == (4000, 4) and cloud.seed == 7
    saved = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert saved["config_hash"] == m.config_hash and "wall_times" not in saved


def test_run_cube8_pipeline(tmp_path):
    d = _config(tmp_path, body={"kind": "cube", "dim": 8}, N=20_000, search={"starts": 2},
                checks=["moments", "direction", "tails"])
    m = run(ExperimentConfig.from_dict(d))
    out = tmp_path / "run"
    rep = json.loads((out / "direction_report.json").read_text())
    assert np.linalg.norm(rep["theta"]) == pytest.approx(1.0, abs=1e-12)
    assert rep["N"] == 20_000 and rep["seed"] == 7
    assert (out / "moments.csv").read_text().startswith("q,value,se,trusted\n")
    assert (out / "tails.csv").read_text().startswith("t,tail,exceedances,bound,used\n")
    assert {"moments", "direction_report", "tails", "isotropic_model"} <= set(m.artifacts)
    assert "warnings" in m.flags


def test_run_is_byte_identical(tmp_path):
    d = _config(tmp_path, search={"starts": 2}, checks=["direction", "tails", "quermass"])
    out = tmp_path / "run"

    def snapshot():
        run(ExperimentConfig.from_dict(d))
        return {p.name: p.read_bytes() for p in out.iterdir() if p.name != "timings.json"}

    first = snapshot()
    assert snapshot() == first


def test_run_geom_records(tmp_path):
    d = _config(tmp_path, body={"kind": "cube", "dim": 2}, checks=["quermass", "prop21"])
    m = run(ExperimentConfig.from_dict(d))
    recs = json.loads((tmp_path / "run" / "geom_checks.json").read_text())
    assert recs and all(r["pass"] for r in recs)
    assert all({"check", "inputs_hash", "lhs", "rhs", "gap", "se", "pass"} <= set(r) for r in recs)
    assert "geom_failures" not in m.flags


def test_run_stage_error_names_stage(tmp_path):
    d = _config(tmp_path, N=50, checks=["isotropize"])
    with pytest.raises(StageError) as err:
        run(ExperimentConfig.from_dict(d))
    assert err.value.stage == "isotropize" and isinstance(err.value.cause, ValueError)


def test_run_logconcave(tmp_path):
    d = _config(tmp_path, body=None, logconcave={"family": "product_exponential", "rates": [1.0] * 4})
    run(ExperimentConfig.from_dict(d))
    X = load_cloud(tmp_path / "run" / "cloud.bin").points
    assert abs(X.mean()) < 0.1


# -- CLI --------------------------------------------------------------------------------


def test_cli_body_validate(tmp_path, capsys):
    assert main(["body", "validate", _write(tmp_path / "b.json", {"kind": "simplex", "dim": 3})]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "simplex"
    assert main(["body", "validate", _write(tmp_path / "c.json", {"kind": "blob", "dim": 3})]) == 2


def test_cli_sample_requires_seed(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", _config(tmp_path))
    assert main(["sample", "--config", cfg]) == 2
    assert main(["sample", "--config", cfg, "--seed", "11", "--out", str(tmp_path / "s")]) == 0
    assert load_cloud(tmp_path / "s" / "cloud.bin").seed == 11
    capsys.readouterr()


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["verify", "medium"]) == 2
    assert main(["direction", "--config", str(tmp_path / "missing.json")]) == 2
    bad = _write(tmp_path / "bad.json", {"N": 10, "body": {"kind": "cube", "dim": 2}})
    assert main(["moments", "--config", bad]) == 2
    assert main([]) == 2
    capsys.readouterr()


def test_cli_direction(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", _config(tmp_path, search={"starts": 2}))
    assert main(["direction", "--config", cfg, "--out", str(tmp_path / "d")]) == 0
    manifest = json.loads(capsys.readouterr().out)
    assert manifest["artifacts"]["direction_report"] == "direction_report.json"
    rep = json.loads((tmp_path / "d" / "direction_report.json").read_text())
    assert math.isclose(np.linalg.norm(rep["theta"]), 1.0, abs_tol=1e-12)


def test_cli_numeric_failure(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", _config(tmp_path, N=50))
    assert main(["isotropize", "--config", cfg]) == 3
    assert "isotropize" in capsys.readouterr().err


def test_cli_geom(tmp_path, capsys, monkeypatch):
    cfg = _write(tmp_path / "c.json", _config(tmp_path, body={"kind": "cube", "dim": 2}))
    assert main(["geom", "--config", cfg, "--check", "quermass"]) == 0
    assert main(["geom", "--config", cfg, "--check", "volume"]) == 2

    def failing(name, body=None, seed=0, N=None):
        return [{"check": name, "inputs_hash": "0", "lhs": 1, "rhs": 0, "gap": 1, "se": 0, "pass": False}]

    monkeypatch.setattr(runner, "run_geom_check", failing)
    assert main(["geom", "--config", cfg, "--check", "quermass"]) == 1
    capsys.readouterr()


def test_cli_verify_exit_codes(tmp_path, capsys, monkeypatch):
    rows = [{"criterion": 1, "check": "x", "expected": 1, "observed": 1, "tolerance": 0, "pass": True}]
    monkeypatch.setattr(acceptance, "verify", lambda suite, seed=0: rows)
    assert main(["verify", "fast", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "verify_fast.json").read_text())["all_pass"] is True
    monkeypatch.setattr(acceptance, "verify", lambda suite, seed=0: [{**rows[0], "pass": False}])
    assert main(["verify", "fast"]) == 1
    assert "FAIL" in capsys.readouterr().out
