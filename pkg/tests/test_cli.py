"""Tests for the acs command-line entry point."""

import importlib.util
import json
from pathlib import Path

import pytest

from src.experiment import save_run_config
from src.selection import Coreset, write_coreset

SCRIPT = Path(__file__).resolve().parents[1] / "scripts" / "acs.py"


@pytest.fixture(scope="module")
def cli():
    spec = importlib.util.spec_from_file_location("acs_cli", SCRIPT)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def _coreset(ids):
    return Coreset(epoch_created=0, member_ids=tuple(ids), fraction=0.5, strategy="acs")


def test_overlap(cli, tmp_path, capsys):
    a = write_coreset(tmp_path / "a.txt", _coreset([1, 2, 3, 4]))
    b = write_coreset(tmp_path / "b.txt", _coreset([3, 4, 5, 6]))
    assert cli.main(["overlap", str(a), str(b)]) == 0
    assert capsys.readouterr().out.strip() == "50.00"


def test_domain_errors_exit_with_code_two(cli, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("not a coreset\n")
    assert cli.main(["overlap", str(bad), str(bad)]) == 2
    assert capsys.readouterr().err.startswith("error=FormatError message=")


def test_unexpected_errors_exit_with_code_one(cli, tmp_path, capsys):
    missing = tmp_path / "missing.txt"
    assert cli.main(["overlap", str(missing), str(missing)]) == 1
    assert capsys.readouterr().err.startswith("error=FileNotFoundError")


def test_run_and_histogram(cli, tmp_path, small_config):
    config = save_run_config(small_config, tmp_path / "config.json")
    out = tmp_path / "out"
    assert cli.main(["run", "--config", str(config), "--out", str(out), "--fraction", "0.25"]) == 0
    assert (out / "metrics.csv").exists()
    assert (out / "scores_epoch2.csv").exists()

    hist = tmp_path / "hist.csv"
    argv = ["histogram", "--scores", str(out / "scores_epoch2.csv"), "--epoch", "2"]
    code = cli.main([*argv, "--bins", "5", "--out", str(hist)])
    assert code == 0 and hist.exists()


def test_train_teacher(cli, tmp_path, small_config):
    config = save_run_config(small_config, tmp_path / "config.json")
    out = tmp_path / "teacher"
    assert cli.main(["train-teacher", "--config", str(config), "--out", str(out)]) == 0
    assert (out / "teacher.npz").exists()


def test_invalid_override_is_a_configuration_error(cli, tmp_path, small_config, capsys):
    config = save_run_config(small_config, tmp_path / "config.json")
    assert cli.main(["run", "--config", str(config), "--interval", "50"]) == 2
    assert "ConfigurationError" in capsys.readouterr().err


def test_duplicate_ids_in_imported_coreset_exit_with_code_two(cli, tmp_path, capsys):
    path = tmp_path / "dup.txt"
    path.write_text("#coreset v1 strategy=acs S=0.5 epoch=0 seed=0\n1\n2\n1\n")
    good = write_coreset(tmp_path / "good.txt", _coreset([1, 2, 3]))
    assert cli.main(["overlap", str(path), str(good)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error=FormatError message=duplicate sample id 1")
    assert err.count("\n") == 1


def test_recalibrate_every_override(cli, tmp_path, small_config):
    config = save_run_config(small_config, tmp_path / "config.json")
    args = cli.build_parser().parse_args(
        ["run", "--config", str(config), "--recalibrate-every", "2", "--out", str(tmp_path)]
    )
    assert cli._config_from_args(args).recalibrate_every == 2
    args = cli.build_parser().parse_args(["run", "--config", str(config)])
    assert cli._config_from_args(args).recalibrate_every is None


def test_run_with_recalibration(cli, tmp_path, small_config):
    config = save_run_config(small_config, tmp_path / "config.json")
    out = tmp_path / "out"
    argv = ["run", "--config", str(config), "--out", str(out), "--recalibrate-every", "3"]
    assert cli.main(argv) == 0
    assert json.loads((out / "config.json").read_text())["recalibrate_every"] == 3
