import json
import os
import pathlib
import subprocess
import sys

import pytest

from landau_response import config as config_mod
from landau_response.cli import main

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"
SMALL_GRID = {"t_min": -20.0, "t_max": 20.0, "n_t": 64, "x_min": -20.0, "x_max": 20.0, "n_x": 64}


def load(name):
    return json.loads((CONFIGS / f"{name}.json").read_text())


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    cfg = config_mod.load(str(path))
    assert config_mod.validate(cfg.data) == []
    assert main(["validate", str(path), "--quiet"]) == 0


def test_every_scenario_has_a_config():
    names = {json.loads(p.read_text())["scenario"] for p in CONFIGS.glob("*.json")}
    assert names == set(config_mod.SCENARIOS)


def test_non_power_of_two_grid(tmp_path, capsys):
    data = load("model_problem")
    data["grid"]["n_t"] = 500
    diags = config_mod.validate(data)
    assert len(diags) == 1 and "grid.n_t" in diags[0]
    assert main(["validate", write(tmp_path, data)]) == 2
    assert "grid.n_t" in capsys.readouterr().err


def test_negative_nu_in_sweep(tmp_path):
    data = load("limiting_absorption")
    data["nu_sweep"] = [0.1, -0.01]
    diags = config_mod.validate(data)
    assert len(diags) == 1
    assert "nu_sweep[1]" in diags[0] and "regularized" in diags[0]


def test_unknown_keys_and_missing_keys(tmp_path):
    data = load("causal_solution")
    data["colour"] = "red"
    data["field"]["width"] = 1.0
    del data["nu"]
    diags = config_mod.validate(data)
    assert any("colour" in d for d in diags)
    assert any("field.width" in d for d in diags)
    assert any(d.startswith("nu") and "missing" in d for d in diags)


def test_bad_json_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"scenario": "model-problem",\n  "nu": }')
    assert main(["run", str(p), "--output-dir", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err
    assert not (tmp_path / "o").exists()


def test_unknown_scenario(tmp_path):
    with pytest.raises(config_mod.ConfigError) as exc:
        config_mod.parse_text('{"scenario": "dispersion-roots"}')
    assert "scenario" in exc.value.diagnostics[0]


def test_config_hash_is_canonical():
    a = config_mod.parse_text('{"scenario": "model-problem", "nu": 0.5, '
                              '"source": {}, "grid": %s}' % json.dumps(SMALL_GRID))
    b = config_mod.parse_text('{"grid": %s, "source": {}, "nu": 0.5, '
                              '"scenario": "model-problem"}' % json.dumps(SMALL_GRID))
    assert a.config_hash() == b.config_hash()


def zero_amplitude(name):
    data = load(name)
    if "field" in data:
        data["field"]["amplitude"] = 0.0
    if "source" in data:
        data["source"]["amplitude"] = 0.0
    if "grid" in data:
        data["grid"] = dict(SMALL_GRID)
    return data


@pytest.mark.parametrize("name", ["causal_solution", "limiting_absorption", "multiplier_equivalence",
                                  "remainder_decomposition", "model_problem"])
def test_zero_amplitude_runs_pass_with_zero_artifacts(tmp_path, name):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, zero_amplitude(name)), "--output-dir", str(out),
                 "--quiet"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "pass", report
    assert all(c["status"] == "pass" for c in report["checks"])
    zero_cols = {"residual_h", "residual_h2", "f_nu", "f", "abs_err", "max_abs_err", "j",
                 "j_multiplier", "j_characteristics", "re_multiplier", "im_multiplier",
                 "re_remainder", "im_remainder", "re_total", "im_total"}
    for art in report["artifacts"]:
        lines = (out / art).read_text().splitlines()
        header = lines[0].split(",")
        for line in lines[1:]:
            for col, val in zip(header, line.split(",")):
                if col in zero_cols:
                    assert float(val) == 0.0, (art, col, val)


def test_model_problem_end_to_end(tmp_path, capsys):
    out = tmp_path / "mp"
    code = main(["run", str(CONFIGS / "model_problem.json"), "--output-dir", str(out)])
    report = json.loads((out / "report.json").read_text())
    checks = {c["name"]: c for c in report["checks"]}
    assert code == 0 and report["status"] in ("pass", "warn")
    assert checks["fourier_identity"]["value"] < 1e-6
    assert checks["erf_closed_form"]["value"] < 1e-10
    assert checks["uniqueness_growth"]["value"] < 1e-10
    assert set(report["timings"]) >= {"fourier", "closed_form", "uniqueness", "total"}
    assert len(report["config_hash"]) == 64
    assert "model-problem:" in capsys.readouterr().out


def test_failing_check_gives_exit_1_with_report(tmp_path):
    data = load("model_problem")
    data["grid"] = dict(SMALL_GRID)
    data["tolerances"] = {"fourier": 1e-30}
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, data), "--output-dir", str(out), "--quiet"]) == 1
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "fail"
    assert any(c["name"] == "fourier_identity" and c["status"] == "fail" for c in report["checks"])


def test_deterministic_artifacts(tmp_path):
    data = load("limiting_absorption")
    data["probes"]["n"] = 3
    data["nu_sweep"] = [0.1, 0.01]
    cfg = write(tmp_path, data)
    outs, codes = [], set()
    for i, threads in enumerate(("1", "2", "1")):
        out = tmp_path / f"run{i}"
        codes.add(main(["run", cfg, "--output-dir", str(out), "--threads", threads, "--quiet"]))
        outs.append(out)
    # a two-step sweep stops short of the final threshold; only the bytes matter here
    assert len(codes) == 1
    for art in ("sweep.csv", "sweep_summary.csv"):
        blobs = {(o / art).read_bytes() for o in outs}
        assert len(blobs) == 1


def test_csv_round_trips_floats(tmp_path):
    data = load("model_problem")
    data["grid"] = dict(SMALL_GRID)
    out = tmp_path / "o"
    main(["run", write(tmp_path, data), "--output-dir", str(out), "--quiet"])
    lines = (out / "uniqueness.csv").read_text().splitlines()
    assert lines[0] == "t,difference"
    for line in lines[1:]:
        for tok in line.split(","):
            assert repr(float(tok)) == tok


def test_output_dir_precedence(tmp_path, monkeypatch):
    data = load("model_problem")
    data["grid"] = dict(SMALL_GRID)
    data["output_dir"] = str(tmp_path / "from_config")
    cfg = write(tmp_path, data)
    monkeypatch.setenv("LANDAU_OUTPUT_DIR", str(tmp_path / "from_env"))
    main(["run", cfg, "--quiet"])
    assert (tmp_path / "from_env" / "report.json").exists()
    main(["run", cfg, "--quiet", "--output-dir", str(tmp_path / "from_flag")])
    assert (tmp_path / "from_flag" / "report.json").exists()
    monkeypatch.delenv("LANDAU_OUTPUT_DIR")
    main(["run", cfg, "--quiet"])
    assert (tmp_path / "from_config" / "report.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "landau_response", "validate",
                           str(CONFIGS / "causal_solution.json")],
                          capture_output=True, text=True, env={**os.environ})
    assert proc.returncode == 0
    assert "ok (causal-solution)" in proc.stdout
