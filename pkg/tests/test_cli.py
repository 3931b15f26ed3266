# tests/test_cli.py
# -------------------------------
# End-to-end runs of the command-line app through click's CliRunner:
# config files in tmp_path, reports written with --out, exit codes checked.
# -------------------------------

import json

import pytest
from click.testing import CliRunner

from app import EXIT_CAPACITY, EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, create_app
from config import Config

PARITY_LOSS = {"numerators": [[0, 1], [1, 0]], "denominator": 1}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def cli():
    return create_app()


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return _write


def _reports(path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)["reports"]


def test_help_lists_every_analysis(runner, cli):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for name in ("mi", "bound", "risk", "gibbs", "noisy-erm", "two-stage", "compose", "monitor", "sweep"):
        assert name in result.output


def test_independent_kernel_has_zero_information(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.5, 0.5], "n": 2, "loss": PARITY_LOSS},
        "algorithm": {"kind": "independent", "rows": [[0.3, 0.7]]},
        "analysis": {"bounds": ["thm1"]},
    })
    out = tmp_path / "mi.json"
    result = runner.invoke(cli, ["mi", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    exact, bound = _reports(out)
    assert exact["kind"] == "risk"
    assert exact["gen_error"] == pytest.approx(0.0, abs=1e-12)
    assert bound["name"] == "mi_gen"
    assert bound["inputs"]["mi"] == pytest.approx(0.0, abs=1e-12)
    assert bound["bound_value"] == pytest.approx(0.0, abs=1e-6)
    assert bound["satisfied"] is True


def test_noisy_erm_worked_example_through_bound(runner, cli, write_config, tmp_path):
    config = write_config({
        "analysis": {"bounds": ["noisy_erm_eq25"], "params": {"i_o": 1, "n": 1000}},
    })
    out = tmp_path / "bound.json"
    result = runner.invoke(cli, ["bound", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    (report,) = _reports(out)
    assert report["bound_value"] == pytest.approx(0.4, abs=1e-12)
    assert report["satisfied"] is None


def test_malformed_json_is_config_error(runner, cli, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"analysis": {"seed": 1,,}}', encoding="utf-8")
    result = runner.invoke(cli, ["mi", "--config", str(path)])
    assert result.exit_code == EXIT_CONFIG
    assert "line 1, column" in result.output


def test_schema_error_names_the_field(runner, cli, write_config):
    config = write_config({"problem": {"mu": [0.5, 0.5], "n": 0}})
    result = runner.invoke(cli, ["mi", "--config", config])
    assert result.exit_code == EXIT_CONFIG
    assert "problem.n" in result.output


def test_capacity_error_exit_code(runner, cli, write_config, monkeypatch):
    monkeypatch.setattr(Config, "MAX_ENUMERATION", 10)
    config = write_config({
        "problem": {"mu": [0.5, 0.5], "n": 4, "loss": PARITY_LOSS},
        "algorithm": {"kind": "erm"},
    })
    result = runner.invoke(cli, ["mi", "--config", config])
    assert result.exit_code == EXIT_CAPACITY
    assert "Monte Carlo" in result.output


def test_violated_check_exit_code(runner, cli, write_config, tmp_path):
    # sigma = 0 claims a zero bound while ERM overfits by 1/2
    config = write_config({
        "problem": {"mu": [0.5, 0.5], "n": 1, "loss": PARITY_LOSS},
        "algorithm": {"kind": "erm"},
        "analysis": {"bounds": ["mi_gen"], "sigma": 0.0},
    })
    out = tmp_path / "violation.json"
    result = runner.invoke(cli, ["mi", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_VIOLATION
    exact, bound = _reports(out)
    assert exact["gen_error"] == pytest.approx(0.5)
    assert bound["satisfied"] is False


def test_seeded_runs_are_byte_identical(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.2, 0.8], "n": 3, "loss": {"numerators": [[1, 3], [2, 0]], "denominator": 4}},
        "algorithm": {"kind": "gibbs", "beta": 2.0},
        "analysis": {"alphas": [0.1, 0.25]},
    })
    outputs = []
    for run, workers in enumerate(("1", "3")):
        out = tmp_path / f"risk{run}.csv"
        result = runner.invoke(cli, ["--workers", workers, "risk", "--config", config,
                                     "--seed", "7", "--trials", "5000", "--format", "csv",
                                     "--no-timestamp", "--out", str(out)])
        assert result.exit_code == EXIT_OK, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert b"tail@0.25" in outputs[0]


def test_gibbs_checks_pass(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.3, 0.7], "n": 2, "loss": {"numerators": [[0, 2], [1, 1], [2, 0]], "denominator": 2}},
        "algorithm": {"kind": "gibbs", "beta": 2.0, "q": "zipf"},
    })
    out = tmp_path / "gibbs.json"
    result = runner.invoke(cli, ["gibbs", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    names = [r["name"] for r in _reports(out) if r["kind"] == "bound"]
    assert names == ["gibbs_gen_eq20", "gibbs_mi_2beta", "gibbs_risk_cor2"]


def test_noisy_erm_checks_pass(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.4, 0.6], "n": 2, "loss": {"numerators": [[0, 3], [3, 0], [1, 2]], "denominator": 3}},
        "algorithm": {"kind": "noisy_erm", "noise_means": "harmonic"},
    })
    out = tmp_path / "noisy.json"
    result = runner.invoke(cli, ["noisy-erm", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    names = [r["name"] for r in _reports(out) if r["kind"] == "bound"]
    assert "noisy_erm_eq25" in names and "noisy_erm_channel" in names


def test_two_stage_checks_pass(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.05, 0.2, 0.15, 0.1, 0.1, 0.15, 0.2, 0.05]},
        "algorithm": {"kind": "two_stage", "split": {"n1": 2, "n2": 2}},
    })
    out = tmp_path / "two_stage.json"
    result = runner.invoke(cli, ["two-stage", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    assert [r["name"] for r in _reports(out)] == ["two_stage", "prefix_mi", "prefix_entropy", "prefix_patterns"]


def test_compose_checks_pass(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.5, 0.5], "n": 1, "loss": PARITY_LOSS},
        "algorithm": {"kind": "compose", "stages": [
            [[0.9, 0.1], [0.2, 0.8]],
            [[0.7, 0.3], [0.4, 0.6], [0.5, 0.5], [0.1, 0.9]],
        ]},
    })
    out = tmp_path / "compose.json"
    result = runner.invoke(cli, ["compose", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    names = [r.get("name") for r in _reports(out)]
    assert names[:2] == ["chain_rule", "composition_last"]
    assert "mi_gen" in names


def test_monitor_checks_pass(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.5, 0.5], "n": 2, "loss": PARITY_LOSS},
        "algorithm": {"kind": "erm"},
        "analysis": {"m": 3, "trials": 3000, "seed": 2},
    })
    out = tmp_path / "monitor.json"
    result = runner.invoke(cli, ["monitor", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    names = [r.get("name") for r in _reports(out)]
    assert {"monitor", "monitor_additivity"} <= set(names)
    assert "monitor_signed" not in names
    assert "signed_gap" in [r.get("label") for r in _reports(out)]


def test_small_sweep_passes(runner, cli, write_config, tmp_path):
    config = write_config({"analysis": {"problems": 25, "seed": 3}})
    out = tmp_path / "sweep.csv"
    result = runner.invoke(cli, ["sweep", "--config", config, "--format", "csv", "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    assert out.read_bytes().count(b"\r\n") == 5


def test_ragged_kernel_rows_are_config_errors(runner, cli, write_config):
    config = write_config({
        "problem": {"mu": [0.5, 0.5], "n": 1, "loss": PARITY_LOSS},
        "algorithm": {"kind": "kernel", "rows": [[1.0, 0.0], [1.0]]},
    })
    result = runner.invoke(cli, ["mi", "--config", config])
    assert result.exit_code == EXIT_CONFIG
    assert "algorithm.rows" in result.output


def test_gibbs_checks_skipped_for_losses_above_one(runner, cli, write_config, tmp_path):
    config = write_config({
        "problem": {"mu": [0.5, 0.5], "n": 2,
                    "loss": {"numerators": [[0, 2], [2, 0]], "denominator": 1, "bounds": [0, 2]}},
        "algorithm": {"kind": "gibbs", "beta": 1.0},
    })
    out = tmp_path / "gibbs_wide.json"
    result = runner.invoke(cli, ["gibbs", "--config", config, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    assert [r["kind"] for r in _reports(out)] == ["risk"]
