"""Tests for the command line: artifact layout, overrides, error codes."""

from __future__ import annotations

import csv
import json

import pytest

from blocktutor.cli import build_parser, main, resolve_port
from blocktutor.harness import ConfigError, ExperimentConfig, run_training, save_snapshot


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"episodes": 20, "seed": 3}))
    return path


@pytest.fixture(scope="module")
def snapshot_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("snap")
    session = run_training(ExperimentConfig(episodes=20, seed=3))
    path = out / "snapshot.json"
    save_snapshot(session, path)
    return path


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_run_writes_the_three_artifacts(config_file, tmp_path):
    out = tmp_path / "artifacts"
    assert main(["run", "--config", str(config_file), "--out", str(out)]) == 0
    assert (out / "metrics.jsonl").exists()
    assert (out / "snapshot.json").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["episodes"] == 20
    assert summary["config"]["seed"] == 3


def test_run_seed_flag_overrides_config(config_file, tmp_path):
    out = tmp_path / "artifacts"
    main(["run", "--config", str(config_file), "--seed", "9", "--out", str(out)])
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["seed"] == 9


def test_run_without_an_output_directory_fails(config_file, capsys):
    assert main(["run", "--config", str(config_file)]) == 2
    assert "output directory" in capsys.readouterr().err


def test_run_output_directory_can_come_from_the_config(tmp_path):
    out = tmp_path / "from-config"
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"episodes": 5, "out": str(out)}))
    assert main(["run", "--config", str(path)]) == 0
    assert (out / "summary.json").exists()


@pytest.mark.parametrize(
    "content, needle",
    [
        ('{"episodes": 0}', "episodes"),
        ('{"episodess": 5}', "episodess"),
        ("not json", "JSON"),
    ],
)
def test_run_rejects_bad_configs(tmp_path, capsys, content, needle):
    path = tmp_path / "config.json"
    path.write_text(content)
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert needle in capsys.readouterr().err


def test_run_missing_config_file(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["run", "--config", str(missing), "--out", str(tmp_path)]) == 2
    assert "not found" in capsys.readouterr().err


def test_eval_appends_one_row_per_invocation(snapshot_file, tmp_path):
    base = ["eval", "--snapshot", str(snapshot_file), "--out", str(tmp_path)]
    assert main(base + ["--setup", "transition", "--attempts", "1"]) == 0
    assert main(base + ["--setup", "sequence", "--attempts", "5"]) == 0
    assert main(base + ["--setup", "transition", "--attempts", "1"]) == 0
    with (tmp_path / "eval.csv").open() as handle:
        rows = list(csv.DictReader(handle))
    assert [(r["setup"], r["attempts"]) for r in rows] == [
        ("transition", "1"), ("sequence", "5"), ("transition", "1"),
    ]
    assert rows[0] == rows[2]  # same snapshot + seed, identical result
    assert 0.0 <= float(rows[0]["rate"]) <= 1.0
    assert 0.0 <= float(rows[1]["rate"]) <= 20.0


def test_eval_expression_setup(snapshot_file, tmp_path):
    args = [
        "eval", "--setup", "expression", "--snapshot", str(snapshot_file),
        "--attempts", "5", "--out", str(tmp_path),
    ]
    assert main(args) == 0
    with (tmp_path / "eval.csv").open() as handle:
        (row,) = list(csv.DictReader(handle))
    assert row["setup"] == "expression"
    assert 0.0 <= float(row["stderr"]) <= 0.5


def test_sweep_beta_prints_and_writes(tmp_path, capsys):
    args = [
        "sweep-beta", "--betas", "1.0", "--seeds", "1",
        "--episodes", "60", "--out", str(tmp_path),
    ]
    assert main(args) == 0
    assert "beta=1" in capsys.readouterr().out
    payload = json.loads((tmp_path / "sweep.json").read_text())
    assert payload["summary"]["1.0"]["runs"] == 1
    assert payload["points"][0]["beta"] == 1.0


@pytest.mark.parametrize("raw", ["abc", "", "2.0", "0.1,,oops"])
def test_sweep_beta_rejects_bad_grids(raw, capsys):
    assert main(["sweep-beta", "--betas", raw, "--seeds", "1"]) == 2
    assert "betas" in capsys.readouterr().err


def test_ablate_scene_reports_a_sign_test(tmp_path, capsys):
    args = ["ablate-scene", "--seeds", "2", "--episodes", "30", "--out", str(tmp_path)]
    assert main(args) == 0
    assert "sign test" in capsys.readouterr().out
    payload = json.loads((tmp_path / "ablation.json").read_text())
    assert 0.0 <= payload["sign_test_p"] <= 1.0
    assert len(payload["points"]) == 4  # 2 strategies x 2 seeds


def test_resolve_port_precedence():
    assert resolve_port(9999, {"TAA_PORT": "7777"}) == 9999
    assert resolve_port(None, {"TAA_PORT": "7777"}) == 7777
    assert resolve_port(None, {}) == 8000
    with pytest.raises(ConfigError, match="TAA_PORT"):
        resolve_port(None, {"TAA_PORT": "soon"})
