"""Config loading, report emission, and CLI exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from dynatomo import ParseError, SchemaError
from dynatomo.cli import config_from_dict, load_config, main
from dynatomo.errors import InvariantError
from dynatomo import presets


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def run_cli(args):
    return subprocess.run(
        [sys.executable, "-m", "dynatomo.cli", *args],
        capture_output=True,
        text=True,
    )


RUD_BUILDER = {
    "protocol": "rud",
    "family": {"builder": "example-4-8"},
    "outcome_index": 6,
    "seed": 5,
    "shots": 0,
}


def test_builder_config_infers_dimension():
    cfg = config_from_dict(dict(RUD_BUILDER))
    assert cfg.dimension == 3
    assert cfg.family.size == 9
    assert cfg.protocol == "rud"


def test_dimension_must_match_family():
    data = dict(RUD_BUILDER)
    data["dimension"] = 2
    with pytest.raises(InvariantError, match="/dimension"):
        config_from_dict(data)


def test_duplicate_grid_instants_fail_schema():
    data = dict(RUD_BUILDER)
    data["grid"] = [0.1, 0.1, 0.2]
    with pytest.raises(SchemaError, match="/grid"):
        config_from_dict(data)


def test_unknown_key_fails_schema():
    data = dict(RUD_BUILDER)
    data["rho0"] = [[1, 0], [0, 0]]
    with pytest.raises(SchemaError, match="rho0"):
        config_from_dict(data)


def test_every_schema_violation_is_listed():
    with pytest.raises(SchemaError) as err:
        config_from_dict({"protocol": "bogus", "shots": -1})
    text = str(err.value)
    assert "/protocol" in text
    assert "/shots" in text


def test_too_few_projectors_for_tomography():
    vecs = [
        [[1, 0], [0, 0]],
        [[0, 0], [1, 0]],
        [[1, 0], [1, 0]],
    ]
    data = {
        "protocol": "rud",
        "family": {"projectors": [[1.0, v] for v in vecs]},
    }
    with pytest.raises(InvariantError, match="d\\^2"):
        config_from_dict(data)


def test_missing_file_is_a_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_config(tmp_path / "nope.json")


def test_malformed_json_is_a_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_config(path)


def test_run_emits_loadable_config_echo(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    cfg_path = write_json(tmp_path / "cfg.json", dict(RUD_BUILDER))
    out = tmp_path / "out"
    assert main(["run", str(cfg_path), "--out-dir", str(out)]) == 0
    echoed = load_config(out / "config.json")
    assert echoed == config_from_dict(dict(RUD_BUILDER))
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["seed"] == 5
    assert report["metrics"]["frobenius_error_vs_truth"] < 1e-8
    state = report["recovered_state"]
    assert len(state) == 9
    assert all(len(entry) == 2 for entry in state)


def test_exact_mode_csv_columns_agree(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    cfg_path = write_json(tmp_path / "cfg.json", dict(RUD_BUILDER))
    out = tmp_path / "out"
    assert main(["run", str(cfg_path), "--out-dir", str(out)]) == 0
    raw = (out / "probabilities.csv").read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().strip().split("\n")
    assert lines[0] == "t,p_exact,p_sampled,shots"
    assert len(lines) == 10
    for line in lines[1:]:
        _, p_exact, p_sampled, shots = line.split(",")
        assert p_exact == p_sampled
        assert shots == "0"


def test_ic_check_writes_header_only_csv(tmp_path):
    cfg_path = write_json(
        tmp_path / "cfg.json",
        {"protocol": "ic-check", "family": {"builder": "example-4-8"}},
    )
    out = tmp_path / "out"
    assert main(["ic-check", str(cfg_path), "--out-dir", str(out)]) == 0
    assert (out / "probabilities.csv").read_text() == "t,p_exact,p_sampled,shots\n"
    report = json.loads((out / "report.json").read_text())
    assert report["ic"]["is_ic"] is True
    assert report["ic"]["rank"] == 9


def test_ic_check_reports_incomplete_families_without_failing(tmp_path):
    vecs = [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
    cfg_path = write_json(
        tmp_path / "cfg.json",
        {"protocol": "ic-check", "family": {"projectors": [[1.0, v] for v in vecs]}},
    )
    out = tmp_path / "out"
    assert main(["ic-check", str(cfg_path), "--out-dir", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["ic"]["is_ic"] is False
    assert report["ic"]["rank"] < 4


def test_json_only_skips_the_csv(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    cfg_path = write_json(tmp_path / "cfg.json", dict(RUD_BUILDER))
    out = tmp_path / "out"
    assert main(["run", str(cfg_path), "--out-dir", str(out), "--json-only"]) == 0
    assert (out / "report.json").exists()
    assert not (out / "probabilities.csv").exists()


def test_seed_resolution_order(tmp_path, monkeypatch):
    data = {"protocol": "rud", "family": {"builder": "example-4-8"}}
    cfg_path = write_json(tmp_path / "cfg.json", data)

    def echoed_seed(args):
        out = tmp_path / "out"
        assert main(["run", str(cfg_path), "--out-dir", str(out), *args]) == 0
        return json.loads((out / "config.json").read_text())["seed"]

    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    assert echoed_seed([]) == 0
    monkeypatch.setenv("DYNATOMO_SEED", "7")
    assert echoed_seed([]) == 7
    assert echoed_seed(["--seed", "3"]) == 3
    write_json(tmp_path / "cfg.json", {**data, "seed": 5})
    assert echoed_seed([]) == 5
    assert echoed_seed(["--seed", "3"]) == 3


def test_bad_env_seed_is_a_config_error(tmp_path, monkeypatch):
    cfg_path = write_json(
        tmp_path / "cfg.json", {"protocol": "rud", "family": {"builder": "example-4-8"}}
    )
    monkeypatch.setenv("DYNATOMO_SEED", "not-a-number")
    assert main(["run", str(cfg_path), "--out-dir", str(tmp_path / "out")]) == 2


def test_shots_flag_overrides_config(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    cfg_path = write_json(tmp_path / "cfg.json", dict(RUD_BUILDER))
    out = tmp_path / "out"
    assert main(
        ["run", str(cfg_path), "--out-dir", str(out), "--shots", "1000"]
    ) == 0
    echo = json.loads((out / "config.json").read_text())
    assert echo["shots"] == 1000
    table = json.loads((out / "report.json").read_text())["probabilities"]
    assert table["shots"] == 1000
    assert table["p_exact"] != table["p_sampled"]


def test_wh_demo_report_contents(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    out = tmp_path / "out"
    assert main(["wh-demo", "--d", "3", "--out-dir", str(out)]) == 0
    wh = json.loads((out / "report.json").read_text())["wh"]
    assert wh["dimension"] == 3
    assert wh["trace_max_abs"] < 1e-12
    assert wh["gram_max_dev"] < 1e-12
    assert wh["commutation_max_dev"] < 1e-12
    assert wh["twirl_max_dev"] < 1e-10
    assert wh["adjoint_index"] == [0, 2, 1, 6, 8, 7, 3, 5, 4]


def test_sic_verify_writes_no_config_echo(tmp_path):
    out = tmp_path / "out"
    assert main(["sic-verify", "--d", "2", "--out-dir", str(out)]) == 0
    assert not (out / "config.json").exists()
    report = json.loads((out / "report.json").read_text())
    assert report["sic_verify"]["is_sic"] is True
    assert report["sic_verify"]["gram_squared_det"] == pytest.approx(
        16 / 27, abs=1e-12
    )


def test_golden_mismatch_exit_code(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    monkeypatch.setattr(presets, "GOLDEN_TOL", 1e-9)
    assert main(["example-4-8", "--out-dir", str(tmp_path / "out")]) == 4


def test_subprocess_exit_codes(tmp_path):
    ok = write_json(tmp_path / "ok.json", dict(RUD_BUILDER))
    res = run_cli(["run", str(ok), "--out-dir", str(tmp_path / "a")])
    assert res.returncode == 0
    assert "report.json" in res.stdout

    singular = write_json(
        tmp_path / "singular.json",
        {**RUD_BUILDER, "grid": {"start": 50, "step": 0.001}},
    )
    res = run_cli(["run", str(singular), "--out-dir", str(tmp_path / "b")])
    assert res.returncode == 3

    short = write_json(
        tmp_path / "short.json",
        {
            "protocol": "rud",
            "family": {
                "projectors": [
                    [1.0, [[1, 0], [float(k), 0], [0, 1]]] for k in range(8)
                ]
            },
        },
    )
    res = run_cli(["run", str(short), "--out-dir", str(tmp_path / "c")])
    assert res.returncode == 2
    assert "d^2" in res.stderr

    non_fiducial = write_json(
        tmp_path / "probe.json",
        {
            "protocol": "sic-simulate",
            "family": {"projectors": [[1.0, [[1, 0], [0, 0]]]]},
        },
    )
    res = run_cli(["run", str(non_fiducial), "--out-dir", str(tmp_path / "d")])
    assert res.returncode == 3


def test_report_json_is_sorted_and_newline_terminated(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNATOMO_SEED", raising=False)
    cfg_path = write_json(tmp_path / "cfg.json", dict(RUD_BUILDER))
    out = tmp_path / "out"
    assert main(["run", str(cfg_path), "--out-dir", str(out)]) == 0
    text = (out / "report.json").read_text()
    assert text.endswith("\n")
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"
