import pandas as pd
import pydantic
import pytest
from click.testing import CliRunner

from revs.app.main import cli, exit_code
from revs.coordination import run_admm
from revs.errors import (
    DataError,
    DimensionError,
    InfeasibleScheduleError,
    InstanceTooLargeError,
    ModelBlowUpError,
    RevsError,
    SolverError,
    StructuralError,
)
from revs.models.residence import EvSpec
from revs.scenarios import ResultStore

from tests.conftest import load_test_data, write_bundle


# --- Test data

# error, exit code
EXIT_CODE_TESTS = [
    ( DataError("x"), 3 ),
    ( StructuralError("x"), 3 ),
    ( InfeasibleScheduleError("x"), 3 ),
    ( DimensionError("x"), 3 ),
    ( InstanceTooLargeError("x"), 3 ),
    ( SolverError("x"), 4 ),
    ( ModelBlowUpError("x"), 4 ),
    ( RevsError("x"), 4 ),
    ( RuntimeError("x"), 1 ),
]


@pytest.fixture
def runner(tmp_path, monkeypatch):
    monkeypatch.delenv("REVS_CONFIG", raising = False)
    monkeypatch.delenv("REVS_LOG_LEVEL", raising = False)
    monkeypatch.chdir(tmp_path)
    return CliRunner()


@pytest.fixture
def bundle(tmp_path):
    return write_bundle(tmp_path / "bundle")


# --- Test cases

@pytest.mark.parametrize("error,code", EXIT_CODE_TESTS)
def test_exit_code(error, code):
    assert exit_code(error) == code


def test_exit_code_validation_error():
    with pytest.raises(pydantic.ValidationError) as info:
        EvSpec(window_start = 3, window_end = 1)
    assert exit_code(info.value) == 3


def test_help(runner):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for name in ("generate", "run", "compare", "trace", "validate"):
        assert name in result.output


def test_generate(runner, tmp_path):
    out = tmp_path / "generated"
    result = runner.invoke(cli, ["generate", "--homes", "6", "--seed", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "residences: 6" in result.output
    for name in ("network.csv", "profiles.csv", "communities.csv", "scenario.yaml"):
        assert (out / name).exists()


def test_generate_requires_seed(runner):
    result = runner.invoke(cli, ["generate"])
    assert result.exit_code == 2


def test_generate_rejects_zero_homes(runner):
    result = runner.invoke(cli, ["generate", "--homes", "0", "--seed", "1"])
    assert result.exit_code == 2


def test_generate_then_run(runner, tmp_path):
    out = tmp_path / "generated"
    runner.invoke(cli, ["generate", "--homes", "6", "--seed", "3", "--out", str(out)])
    report = tmp_path / "report"
    result = runner.invoke(cli, [
        "run", "--config", str(out / "scenario.yaml"), "--mode", "individual",
        "--out", str(report),
    ])
    assert result.exit_code == 0, result.output
    assert "run id:" in result.output
    bands = pd.read_csv(report / "bands.csv")
    assert "count_seed_3" in bands.columns
    assert sorted(set(bands["adoption"])) == [0.3, 0.6, 0.9]


def test_run_both_modes(runner, bundle, tmp_path):
    report = tmp_path / "report"
    result = runner.invoke(cli, [
        "run", "--config", str(bundle), "--adoption", "0.5", "--adoption", "1.0",
        "--seed", "10", "--seeds", "2", "--out", str(report),
    ])
    assert result.exit_code == 0, result.output
    costs = pd.read_csv(report / "costs.csv")
    assert sorted(set(costs["seed"])) == [10, 11]
    assert sorted(set(costs["mode"])) == ["distributed", "individual"]


def test_run_same_config_same_id(runner, bundle, tmp_path):
    first = runner.invoke(cli, ["run", "--config", str(bundle), "--out", str(tmp_path / "a")])
    second = runner.invoke(cli, ["run", "--config", str(bundle), "--out", str(tmp_path / "b")])
    ids = [line for line in first.output.splitlines() if line.startswith("run id:")]
    assert ids and ids[0] in second.output
    assert (tmp_path / "a" / "bands.csv").read_bytes() == (tmp_path / "b" / "bands.csv").read_bytes()


def test_run_missing_tariff(runner, tmp_path):
    path = write_bundle(tmp_path / "bundle", tariff = "missing.csv")
    result = runner.invoke(cli, ["run", "--config", str(path)])
    assert result.exit_code == 3
    assert "error:" in result.output
    assert "missing.csv" in result.output


def test_run_without_config(runner):
    result = runner.invoke(cli, ["run"])
    assert result.exit_code == 2
    assert "REVS_CONFIG" in result.output


def test_run_seeds_without_seed(runner, bundle):
    result = runner.invoke(cli, ["run", "--config", str(bundle), "--seeds", "3"])
    assert result.exit_code == 2


def test_run_reports_failed_seeds(runner, bundle, tmp_path, mocker):
    mocker.patch("revs.scenarios.runner.run_admm", side_effect = SolverError("stalled"))
    result = runner.invoke(cli, ["run", "--config", str(bundle), "--out", str(tmp_path / "r")])
    assert result.exit_code == 4
    assert "FAILED adoption 0.5 seed 1 distributed: stalled" in result.output
    assert (tmp_path / "r" / "summary.json").exists()


def test_trace(runner, bundle, tmp_path):
    out = tmp_path / "trace.csv"
    result = runner.invoke(cli, [
        "trace", "--config", str(bundle), "--adoption", "0", "--seed", "1", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert "adopters: 0" in result.output
    assert "converged: yes" in result.output
    assert out.read_text().splitlines()[0] == "iter,primal_residual,dual_residual,total_cost"


def test_trace_solver_error(runner, bundle, tmp_path, mocker):
    mocker.patch(
        "revs.app.commands.trace.run_admm",
        side_effect = SolverError("operator QP did not converge", residuals = {"primal": 0.5}),
    )
    result = runner.invoke(cli, [
        "trace", "--config", str(bundle), "--seed", "1", "--out", str(tmp_path / "t.csv"),
    ])
    assert result.exit_code == 4
    assert "error: operator QP did not converge (primal=5.000e-01)" in result.output


def test_trace_from_environment(runner, bundle, tmp_path, monkeypatch):
    monkeypatch.setenv("REVS_CONFIG", str(bundle))
    result = runner.invoke(cli, ["trace", "--seed", "1", "--out", str(tmp_path / "t.csv")])
    assert result.exit_code == 0, result.output


def test_validate(runner, bundle):
    result = runner.invoke(cli, ["validate", "--config", str(bundle)])
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert len(lines) == 5
    assert all(line.startswith("PASS") for line in lines)


def test_validate_cyclic_network(runner, bundle, tmp_path):
    network = tmp_path / "cyclic.csv"
    network.write_text(load_test_data("networks", "cyclic.csv"))
    result = runner.invoke(cli, ["validate", "--config", str(bundle), "--network", str(network)])
    assert result.exit_code == 3
    assert "FAIL tree rooted at substation" in result.output
    assert "PASS network file" in result.output


def test_validate_missing_profile(runner, tmp_path):
    network = tmp_path / "star.csv"
    network.write_text(load_test_data("networks", "star.csv"))
    profiles = tmp_path / "profiles.csv"
    profiles.write_text(load_test_data("profiles", "star_missing.csv"))
    result = runner.invoke(cli, [
        "validate", "--network", str(network), "--profiles", str(profiles),
    ])
    assert result.exit_code == 3
    assert "FAIL profile coverage" in result.output
    assert "PASS tariff" in result.output


def test_validate_unreadable_network(runner, tmp_path):
    result = runner.invoke(cli, [
        "validate", "--network", str(tmp_path / "absent.csv"),
        "--profiles", str(tmp_path / "absent_profiles.csv"),
    ])
    assert result.exit_code == 3
    assert "FAIL network file" in result.output
    assert "SKIP tree rooted at substation" in result.output
    assert "SKIP profile coverage" in result.output


def test_compare(runner, tmp_path, mocker):
    table = pd.DataFrame({
        "instance": [0, 0, 1, 1],
        "seed": [5, 5, 6, 6],
        "node": [2, 3, 2, 3],
        "distributed_usd": [1.0, 1.0, 1.0, 1.3],
        "centralized_usd": [1.0, 1.0, 1.0, 1.0],
        "deviation_pct": [0.0, 2.0, 4.0, 30.0],
        "converged": [True, True, True, False],
        "iterations": [3, 3, 500, 500],
    })
    study = mocker.patch("revs.app.commands.compare.run_deviation_study", return_value = table)
    out = tmp_path / "deviation.csv"
    result = runner.invoke(cli, ["compare", "--instances", "2", "--seed", "5", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "instances compared: 2" in result.output
    assert "residences within 5%: 75.0%" in result.output
    assert "instance 1 node 3: 30.00% FLAG" in result.output
    assert study.call_args.args == (2, 5)
    assert study.call_args.kwargs["homes_per_feeder"] == 2
    assert len(pd.read_csv(out)) == 4


def test_compare_no_feasible_instance(runner, mocker):
    mocker.patch(
        "revs.app.commands.compare.run_deviation_study",
        return_value = pd.DataFrame(columns = ["instance", "deviation_pct"]),
    )
    result = runner.invoke(cli, ["compare", "--seed", "1"])
    assert result.exit_code == 0
    assert "no instance had a feasible centralized schedule" in result.output


def test_run_jobs_parallelizes_admm(runner, bundle, tmp_path, mocker):
    admm = mocker.patch("revs.scenarios.runner.run_admm", wraps = run_admm)
    result = runner.invoke(cli, [
        "run", "--config", str(bundle), "--mode", "distributed", "--jobs", "2",
        "--out", str(tmp_path / "r"),
    ])
    assert result.exit_code == 0, result.output
    assert admm.call_count == 1
    config = admm.call_args.kwargs["config"]
    assert config.parallel
    assert config.jobs == 2


def test_run_report_reads_store(runner, bundle, tmp_path, mocker):
    filled = mocker.spy(ResultStore, "from_reports")
    entries = mocker.spy(ResultStore, "entries")
    result = runner.invoke(cli, ["run", "--config", str(bundle), "--out", str(tmp_path / "r")])
    assert result.exit_code == 0, result.output
    assert filled.call_count == 0
    assert entries.call_count == 4
