"""Command-line contract: exits, config handling, file outputs, determinism."""

import csv
import json
import os

import pytest

from nmrqip import acceptance
from nmrqip.cli import DEFAULT_CONFIGS, EXPERIMENTS, format_cell, main, run_experiment


@pytest.fixture(autouse=True)
def isolate(tmp_path, monkeypatch):
    # keep relative default out dirs inside the sandbox and drop any ambient
    # override so each test sees a clean environment
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("NMRQIP_OUT_DIR", raising=False)
    return tmp_path


def read_stdout_json(capsys):
    # error and summary documents are single-line; take the last line so
    # any repro table text printed earlier does not confuse the parse
    lines = [l for l in capsys.readouterr().out.strip().splitlines() if l]
    return json.loads(lines[-1])


def read_stdout_doc(capsys):
    # --list pretty-prints one indented document
    return json.loads(capsys.readouterr().out)


def test_usage_exits():
    assert main([]) == 2
    assert main(["--help"]) == 0


def test_experiment_registry_is_fixed():
    assert sorted(EXPERIMENTS) == [
        "certify", "contextuality", "distill", "dqc1", "grape", "ising",
        "qec", "rb", "spectrum", "transfer", "twirl", "weak", "xxz",
    ]
    assert sorted(DEFAULT_CONFIGS) == sorted(EXPERIMENTS)


def test_unknown_experiment_error_json(capsys):
    assert main(["teleport"]) == 2
    doc = read_stdout_json(capsys)
    assert "teleport" in doc["error"]
    assert doc["valid"] == sorted(EXPERIMENTS) + ["repro"]


def test_list_prints_defaults(capsys, tmp_path):
    assert main(["ising", "--list"]) == 0
    doc = read_stdout_doc(capsys)
    assert doc["experiment"] == "ising"
    assert doc["defaults"]["j"] == 1.0
    assert not (tmp_path / "runs").exists()  # --list must not write anything


def test_malformed_config_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["ising", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "cannot load config" in read_stdout_json(capsys)["error"]
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    assert main(["ising", "--config", str(arr), "--out", str(tmp_path / "o")]) == 2
    assert "JSON object" in read_stdout_json(capsys)["error"]


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"coupling": 2.0}))
    assert main(["ising", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    doc = read_stdout_json(capsys)
    assert "coupling" in doc["error"] and "valid keys" in doc["error"]


def test_seed_and_shots_validation(tmp_path, capsys):
    out = str(tmp_path / "o")
    assert run_experiment("ising", seed=-1, out_dir=out) == 2
    assert "seed" in read_stdout_json(capsys)["error"]
    assert run_experiment("ising", seed=2**64, out_dir=out) == 2
    capsys.readouterr()
    assert run_experiment("dqc1", shots=0, out_dir=out) == 2
    assert "shots" in read_stdout_json(capsys)["error"]


def test_ising_run_writes_manifest_and_csv(tmp_path, capsys):
    out = tmp_path / "ising_out"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_points": 13, "locate_steps": False}))
    assert main(["ising", "--config", str(cfg), "--seed", "7",
                 "--out", str(out)]) == 0
    doc = read_stdout_json(capsys)
    assert doc["exit"] == 0 and doc["out_dir"] == str(out)

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "ising"
    assert manifest["seed"] == 7
    assert manifest["config"]["n_points"] == 13
    assert manifest["config_path"] == str(cfg)
    assert "config" in manifest["fixture_hashes"]
    assert manifest["wall_time_s"] >= 0
    assert set(manifest["versions"]) == {"nmrqip", "numpy", "scipy", "python"}
    for fname in manifest["output_paths"]:
        assert (out / fname).is_file()

    with open(out / "ising.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "h" and len(rows) == 1 + 13
    # every float cell round-trips through its own repr at 17 significant digits
    for row in rows[1:]:
        for cell in row:
            assert format_cell(float(cell)) == cell


def test_out_dir_env_override(tmp_path, monkeypatch, capsys):
    env_dir = tmp_path / "env_out"
    monkeypatch.setenv("NMRQIP_OUT_DIR", str(env_dir))
    assert main(["dqc1", "--out", str(tmp_path / "ignored")]) == 0
    doc = read_stdout_json(capsys)
    assert doc["out_dir"] == str(env_dir)
    assert (env_dir / "dqc1.csv").is_file()
    assert not (tmp_path / "ignored").exists()


def test_exact_mode_reruns_are_byte_identical(tmp_path, capsys):
    outs = []
    for d in ("a", "b"):
        out = tmp_path / d
        assert main(["dqc1", "--seed", "123", "--out", str(out)]) == 0
        outs.append((out / "dqc1.csv").read_bytes())
    assert outs[0] == outs[1]
    capsys.readouterr()


def test_twirl_seed_changes_estimate_within_delta(tmp_path, capsys):
    # different seeds must give different estimates, both inside the bound
    doc = {"n_samples": 4000}
    hats = []
    for seed in (1, 2):
        out = str(tmp_path / f"s{seed}")
        assert run_experiment("twirl", seed=seed, out_dir=out,
                              config_doc=doc) == 0
        summary = read_stdout_json(capsys)
        assert summary["within_delta"] is True
        assert abs(summary["pr0_hat"] - summary["pr0_true"]) <= 0.02
        hats.append(summary["pr0_hat"])
    assert hats[0] != hats[1]


def test_grape_nonconvergence_exit_code(tmp_path, capsys):
    doc = {"n_steps": 30, "max_iters": 1}
    code = run_experiment("grape", seed=0, out_dir=str(tmp_path / "g"),
                          config_doc=doc)
    assert code == 3
    summary = read_stdout_json(capsys)
    assert summary["exit"] == 3
    assert summary["converged"] is False


def test_dqc1_shots_flag(tmp_path, capsys):
    out = str(tmp_path / "o")
    assert main(["dqc1", "--seed", "5", "--shots", "20000", "--out", out]) == 0
    summary = read_stdout_json(capsys)
    assert summary["abs_error"] < 0.05  # sampled, so only statistically close


def test_repro_list_matches_criteria(capsys):
    assert main(["repro", "--list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == list(acceptance.CRITERIA)
    assert len(lines) == 15


def test_repro_rejects_unknown_criterion(capsys):
    assert main(["repro", "--only", "bogus"]) == 2
    doc = read_stdout_json(capsys)
    assert "bogus" in doc["error"]
    assert doc["valid"] == list(acceptance.CRITERIA)


def test_repro_single_criterion_writes_csv(tmp_path, capsys):
    out = tmp_path / "repro_out"
    assert main(["repro", "--only", "rf-selection", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "rf-selection" in text and "PASS" in text
    with open(out / "criteria.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["criterion", "passed", "measured", "expected"]
    assert rows[1][0] == "rf-selection" and rows[1][1] == "1"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["criteria"] == {"rf-selection": True}


def test_format_cell_rules():
    assert format_cell(True) == "1" and format_cell(False) == "0"
    assert format_cell(3) == "3"
    assert format_cell(-0.0) == "0"
    assert format_cell(0.1) == "0.10000000000000001"
    assert float(format_cell(1 / 3)) == 1 / 3
