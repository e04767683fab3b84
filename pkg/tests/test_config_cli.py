import csv
import json

import numpy as np
import pytest
from pydantic import ValidationError

from interplab.cli import _cell, main
from interplab.config import ExperimentConfig, load_config, parse_complex
from interplab.experiments import convergence_study, parallel_map


def _write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


SCALAR = {"experiment": "norm", "z": [0.25, 0.5], "K_list": [4, 8], "params": {"x": [[1]]}}


def test_parse_complex():
    assert parse_complex([0.5, 2]) == 0.5 + 2j
    assert parse_complex("0.3+0.1i") == 0.3 + 0.1j
    assert parse_complex(0.7) == 0.7


@pytest.mark.parametrize("bad", [
    {"experiment": "norm", "z": [1.2]},
    {"experiment": "norm", "K_list": [8, 4]},
    {"experiment": "norm", "unknown": 1},
    {"experiment": "teleport"},
    {"experiment": "norm", "couple": {"dim": 2, "space0": {"weights": [1, 2, 3]}}},
])
def test_schema_rejects(bad):
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(bad)


def test_digest_ignores_output_dir_but_not_seed():
    a = ExperimentConfig.model_validate(SCALAR)
    b = ExperimentConfig.model_validate({**SCALAR, "output_dir": "elsewhere"})
    c = ExperimentConfig.model_validate({**SCALAR, "seed": 5})
    assert a.digest() == b.digest() != c.digest()


def test_infinite_exponent_string():
    cfg = ExperimentConfig.model_validate({"experiment": "norm", "couple": {"space1": {"p": "inf"}}})
    assert np.isinf(cfg.couple_at().couple.space1.p)


def test_cell_formatting():
    assert _cell(0.1) == "0.10000000000000001"
    assert _cell(np.float64(np.nan)) == "nan"
    assert _cell(True) == "true" and _cell(None) == "" and _cell(3) == "3"


def test_run_writes_outputs_deterministically(tmp_path):
    cfg = _write(tmp_path, SCALAR)
    assert main(["norm", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["norm", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    a, b = (tmp_path / d / "results.csv" for d in "ab")
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(a.open()))
    assert len(rows) == 4 and len({r["config_hash"] for r in rows}) == 1
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["passed"] and report["checks"]["closed_form"]["value"] <= 1e-6
    echo = json.loads((tmp_path / "a" / "config-echo.json").read_text())
    assert echo["config_hash"] == rows[0]["config_hash"]


def test_seed_override(tmp_path):
    cfg = _write(tmp_path, SCALAR)
    main(["norm", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path / "s")])
    assert json.loads((tmp_path / "s" / "report.json").read_text())["seed"] == 9


def test_daher_identity_rows(tmp_path):
    data = {"experiment": "daher", "couple": {"dim": 2, "space1": {"p": 4}}, "K": 4, "z": [0.4],
            "w": [0.4], "params": {"pairs": 3}}
    assert main(["daher", "--config", str(_write(tmp_path, data)), "--out", str(tmp_path / "o"),
                 "--strict"]) == 0
    rows = list(csv.DictReader((tmp_path / "o" / "results.csv").open()))
    for r in rows:
        assert float(r["dist_out"]) == pytest.approx(float(r["dist_in"]), abs=1e-8)


def test_strict_mode_fails_on_violation(tmp_path):
    data = {**SCALAR, "params": {"x": [[1]], "tolerances": {"closed_form": 0.0}, "max_runtime": 0.0}}
    cfg = _write(tmp_path, data)
    assert main(["norm", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 0
    assert main(["norm", "--config", str(cfg), "--out", str(tmp_path / "y"), "--strict"]) == 1


def test_bad_config_gives_error_json(tmp_path, capsys):
    cfg = _write(tmp_path, {"experiment": "norm", "z": [2.0]})
    assert main(["norm", "--config", str(cfg), "--out", str(tmp_path / "e")]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "config"
    assert json.loads((tmp_path / "e" / "error.json").read_text())["type"] == "ValidationError"


def test_experiment_mismatch(tmp_path):
    assert main(["james", "--config", str(_write(tmp_path, SCALAR))]) == 2


def test_convergence_study_scalar():
    cfg = ExperimentConfig.model_validate({"experiment": "convergence", "z": [0.4], "w": [0.6],
                                           "params": {"x": [[1]]}})
    res = convergence_study(cfg, K_list=[2, 4, 8])
    assert res.checks["monotone_in_K"]["passed"] and res.checks["closed_form"]["passed"]
    with pytest.raises(ValueError):
        convergence_study(cfg, K_list=[8, 2])


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv("INTERP_LAB_THREADS", "2")
    assert parallel_map(abs, [-3, 1, -2]) == [3, 1, 2]


def test_shipped_configs_validate():
    from pathlib import Path

    for p in sorted(Path(__file__).parent.parent.joinpath("configs").glob("*.json")):
        load_config(p)
