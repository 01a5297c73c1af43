"""Command-line interface: output contract, exit codes, reproducibility."""

import json

import pytest

from gibbslab.cli import main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_exact_fk_marginal_float_and_rational(capsys):
    code, obj = run_json(capsys, [
        "exact", "--model", "fk", "--domain", "edge", "--bc", "free",
        "--p", "1/2", "--q", "2"])
    assert code == 0
    assert obj["command"] == "exact"
    assert obj["version"]
    assert obj["result"]["edge_0_open"] == pytest.approx(1 / 3)
    code, obj = run_json(capsys, [
        "exact", "--model", "fk", "--domain", "edge", "--bc", "free",
        "--p", "1/2", "--q", "2", "--rational"])
    assert code == 0
    assert obj["result"]["edge_0_open"] == "1/3"


def test_exact_full_table_lists_configs(capsys):
    code, obj = run_json(capsys, [
        "exact", "--model", "fk", "--domain", "edge", "--bc", "wired",
        "--p", "1/3", "--q", "2", "--rational", "--full"])
    assert code == 0
    rows = {r["config_hex"]: r["probability"] for r in obj["rows"]}
    assert rows == {"0": "2/3", "1": "1/3"}


def test_check_duality_and_fkg_pass(capsys):
    code, obj = run_json(capsys, ["check", "duality", "--q", "2"])
    assert code == 0 and obj["result"]["passed"]
    code, obj = run_json(capsys, ["check", "fkg", "--edges", "2"])
    assert code == 0 and obj["result"]["passed"]
    assert float(obj["result"]["min_slack"]) >= -1e-12


def test_reruns_are_byte_identical(tmp_path):
    f1 = tmp_path / "a.json"
    f2 = tmp_path / "b.json"
    argv = ["sample", "--model", "fk", "--R", "4", "--p", "0.5",
            "--sweeps", "64", "--burn-in", "8", "--seed", "7"]
    assert main(argv + ["--out", str(f1)]) == 0
    assert main(argv + ["--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_exit_2_on_invalid_parameter(capsys):
    assert main(["sample", "--model", "fk", "--R", "4", "--p", "2",
                 "--sweeps", "16"]) == 2
    assert main(["sample", "--model", "fk", "--R", "4",
                 "--sweeps", "16"]) == 2  # neither --p nor --T
    capsys.readouterr()


def test_exit_3_on_enumeration_cap(capsys):
    code = main(["exact", "--model", "fk", "--domain", "box:3",
                 "--p", "1/2", "--q", "2"])
    assert code == 3
    assert "resource limit" in capsys.readouterr().err


def test_config_file_defaults_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("R=4\nsweeps=64\nburn_in=8\np=0.5\n")
    code, obj = run_json(capsys, [
        "sample", "--config", str(cfg), "--sweeps", "32", "--seed", "1"])
    assert code == 0
    assert obj["parameters"]["R"] == 4
    assert obj["parameters"]["sweeps"] == 32
    assert obj["parameters"]["burn_in"] == 8


def test_env_seed_default(capsys, monkeypatch):
    monkeypatch.setenv("GIBBSLAB_SEED", "123")
    code, obj = run_json(capsys, [
        "sample", "--model", "fk", "--R", "4", "--p", "0.5",
        "--sweeps", "16", "--burn-in", "0"])
    assert code == 0
    assert obj["seed"] == 123


def test_csv_format_structure(capsys):
    code = main(["sample", "--model", "fk", "--R", "4", "--p", "0.5",
                 "--sweeps", "32", "--burn-in", "8", "--seed", "2",
                 "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    header = json.loads(lines[0][2:])
    assert header["command"] == "sample"
    cols = next(ln for ln in lines if not ln.startswith("#"))
    assert cols == "observable,mean,se,batches,count"
    data = [ln for ln in lines if not ln.startswith("#")][1:]
    assert all(ln.split(",")[0] == "edge_density" or "," in ln
               for ln in data)


def test_scan_annulus_smoke(capsys):
    code, obj = run_json(capsys, [
        "scan", "annulus", "--q", "2", "--R", "6", "--n", "2",
        "--samples", "50", "--burn-in", "20", "--seed", "4"])
    assert code == 0
    assert obj["result"]["mean_crossing_clusters"] >= 0
    total = sum(r["occurrences"] for r in obj["rows"])
    assert total == 50
