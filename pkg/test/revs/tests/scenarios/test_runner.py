import numpy as np
import pytest

from revs.errors import InfeasibleScheduleError, SolverError
from revs.models.enumerations import RunMode, VoltageBand
from revs.models.residence import EvSpec
from revs.models.scenario import EvDefaults, GeneratorParams, Scenario
from revs.residence import load_tariff
from revs.scenarios import (
    ResultStore,
    generate_network,
    load_config,
    load_scenario,
    run_comparison,
    run_sweep,
)

from tests.conftest import write_bundle


# --- Test data

# Horizon starts at 16:00; 8..12 are 00:00-05:00.
NIGHT = slice(8, 13)

STRESSED_PARAMS = GeneratorParams(
    feeders = 1,
    homes_per_feeder = 10,
    homes_per_transformer = 5,
    depth = 4,
    trunk_resistance = (0.03, 0.045),
    transformer_resistance = (0.004, 0.006),
    service_resistance = (0.008, 0.012),
    headroom = 2.5,
    seed = 7,
)

STRESSED_SEEDS = [1, 2, 3, 4, 5]

STRESSED_ADOPTION = [0.3, 0.6, 0.9]


@pytest.fixture
def star_scenario(tmp_path):
    config = load_config(write_bundle(tmp_path, seeds = [1, 2]))
    return load_scenario(config)


@pytest.fixture(scope = "module")
def stressed_scenario():
    generated = generate_network(STRESSED_PARAMS)
    return Scenario(
        network = generated.network,
        profiles = [profile.rotated(16) for profile in generated.profiles],
        tariff = load_tariff().rotated(16),
        community = generated.network.residences(),
        adoption_fraction = 0.9,
        seeds = STRESSED_SEEDS,
        ev = EvDefaults().to_spec(),
    )


@pytest.fixture(scope = "module")
def stressed_sweep(stressed_scenario):
    return run_sweep(stressed_scenario, STRESSED_ADOPTION, jobs = len(STRESSED_SEEDS))


# --- Test cases

def test_comparison_both_modes(star_scenario):
    report = run_comparison(star_scenario)
    assert report.adoption_fraction == 0.5
    assert report.seeds == [1, 2]
    assert [(run.mode, run.seed) for run in report.runs] == [
        (RunMode.INDIVIDUAL, 1), (RunMode.DISTRIBUTED, 1),
        (RunMode.INDIVIDUAL, 2), (RunMode.DISTRIBUTED, 2),
    ]
    assert report.failures() == []
    for run in report.runs:
        # Half of three residences rounds up to two.
        assert len(run.adopters) == 2
        assert run.voltages.shape == (4, 24)
        assert run.flows.percent.shape == (4, 24)
        assert sorted(run.costs) == [2, 3, 4]
        assert run.bands.residences == 3
    individual = report.runs_for(RunMode.INDIVIDUAL)
    distributed = report.runs_for(RunMode.DISTRIBUTED)
    assert all(run.converged is None for run in individual)
    assert all(run.converged for run in distributed)
    # Nothing binds on the star network, so both modes agree.
    for alone, together in zip(individual, distributed):
        assert together.voltages == pytest.approx(alone.voltages, abs = 1e-9)
    assert set(report.aggregates) == {RunMode.INDIVIDUAL, RunMode.DISTRIBUTED}
    assert report.aggregates[RunMode.INDIVIDUAL].seeds == [1, 2]


def test_comparison_store(star_scenario):
    store = ResultStore()
    run_comparison(star_scenario.copy(update = {"mode": RunMode.INDIVIDUAL}), store = store)
    assert store.keys() == {"individual/0.5/1", "individual/0.5/2"}
    assert [run.seed for run in store.values()] == [1, 2]


def test_comparison_parallel_seeds(star_scenario):
    sequential = run_comparison(star_scenario)
    parallel = run_comparison(star_scenario, jobs = 2)
    for first, second in zip(sequential.runs, parallel.runs):
        assert (first.mode, first.seed, first.adopters) == (second.mode, second.seed, second.adopters)
        assert np.array_equal(first.voltages, second.voltages)


def test_seed_failure_is_recorded(star_scenario, mocker):
    mocker.patch(
        "revs.scenarios.runner.run_admm",
        side_effect = SolverError("operator QP stalled", residuals = {"primal": 1.0}),
    )
    report = run_comparison(star_scenario)
    failures = report.failures()
    assert [(run.mode, run.seed) for run in failures] == [
        (RunMode.DISTRIBUTED, 1), (RunMode.DISTRIBUTED, 2),
    ]
    assert failures[0].error_type == "SolverError"
    assert "operator QP stalled" in failures[0].error
    assert all(run.ok for run in report.runs_for(RunMode.INDIVIDUAL))
    assert report.aggregates[RunMode.DISTRIBUTED].seeds == []


def test_infeasible_spec(star_scenario):
    scenario = star_scenario.copy(update = {"ev": EvSpec(window_start = 0, window_end = 1)})
    with pytest.raises(InfeasibleScheduleError):
        run_comparison(scenario)


def test_sweep(star_scenario):
    scenario = star_scenario.copy(update = {"mode": RunMode.INDIVIDUAL})
    store = ResultStore()
    reports = run_sweep(scenario, [0.0, 1.0], store = store)
    assert [report.adoption_fraction for report in reports] == [0.0, 1.0]
    assert [len(run.adopters) for run in reports[0].runs] == [0, 0]
    assert [len(run.adopters) for run in reports[1].runs] == [3, 3]
    assert len(store.keys()) == 4
    # More chargers only lower the residence voltages.
    assert (reports[1].runs[0].voltages <= reports[0].runs[0].voltages + 1e-12).all()


def test_stressed_individual_violates(stressed_sweep):
    at_90 = stressed_sweep[-1]
    assert at_90.adoption_fraction == 0.9
    below = [
        run.bands.below(VoltageBand.FROM_095_TO_098)[NIGHT]
        for run in at_90.runs_for(RunMode.INDIVIDUAL)
    ]
    assert max(int(counts.max()) for counts in below) > 0


def test_stressed_distributed_repairs(stressed_sweep):
    for report in stressed_sweep:
        assert report.failures() == []
        individual = {run.seed: run for run in report.runs_for(RunMode.INDIVIDUAL)}
        distributed = report.runs_for(RunMode.DISTRIBUTED)
        assert [run.seed for run in distributed] == STRESSED_SEEDS
        for run in distributed:
            below = run.bands.below(VoltageBand.FROM_095_TO_098)
            alone = individual[run.seed].bands.below(VoltageBand.FROM_095_TO_098)
            # Per interval, not just over the day.
            assert (below <= alone).all()
            if run.converged:
                assert below.tolist() == [0] * 24


def test_stressed_flows_within_capacity(stressed_sweep):
    for report in stressed_sweep:
        for run in report.runs:
            assert (run.flows.percent <= 100.0).all()
