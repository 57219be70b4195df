"""Individual versus distributed scheduling across seeds and adoption levels."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

from revs.coordination import individual_injections, run_admm
from revs.errors import RevsError
from revs.models.enumerations import RunMode
from revs.models.grid import SensitivityMatrix
from revs.models.scenario import ComparisonReport, Scenario, SeedRun
from revs.network import build_sensitivity, check_tree, edge_flows, stack_injections, voltages
from revs.residence import check_spec

from .metrics import aggregate_bands, band_voltages, sample_adopters
from .store import ResultStore


logger = logging.getLogger(__name__)


def _individual(scenario, sensitivity, adopters, seed) -> SeedRun:
    specs = {node: scenario.ev for node in adopters}
    solutions = individual_injections(scenario.profiles, specs, scenario.tariff)
    injections = {node: solution.p for node, solution in solutions.items()}
    p = stack_injections(scenario.network, injections, scenario.tariff.intervals)
    p_unit = p / scenario.network.base_power
    v = voltages(sensitivity, p_unit)
    return SeedRun(
        seed = seed,
        mode = RunMode.INDIVIDUAL,
        adopters = adopters,
        voltages = v,
        flows = edge_flows(scenario.network, p_unit),
        bands = band_voltages(v, scenario.network.residences()),
        costs = {node: solution.energy_cost for node, solution in solutions.items()},
    )


def _distributed(scenario, sensitivity, adopters, seed) -> SeedRun:
    specs = {node: scenario.ev for node in adopters}
    result = run_admm(
        scenario.network,
        scenario.profiles,
        specs,
        scenario.tariff,
        config = scenario.admm,
        limits = scenario.limits,
        sensitivity = sensitivity,
    )
    injections = dict(zip(result.nodes, result.p_final))
    p = stack_injections(scenario.network, injections, scenario.tariff.intervals)
    return SeedRun(
        seed = seed,
        mode = RunMode.DISTRIBUTED,
        adopters = adopters,
        voltages = result.voltages,
        flows = edge_flows(scenario.network, p / scenario.network.base_power),
        bands = band_voltages(result.voltages, scenario.network.residences()),
        costs = result.costs,
        converged = result.converged,
        iterations = result.iterations,
        trace = result.trace,
    )


_SOLVERS = {
    RunMode.INDIVIDUAL: _individual,
    RunMode.DISTRIBUTED: _distributed,
}


def _run_seed(scenario, sensitivity, seed) -> List[SeedRun]:
    adopters = sample_adopters(scenario.community, scenario.adoption_fraction, seed)
    runs = []
    for mode in scenario.mode.modes():
        try:
            run = _SOLVERS[mode](scenario, sensitivity, adopters, seed)
        except RevsError as ex:
            logger.warning(
                "Adoption %g, seed %d, %s mode failed: %s",
                scenario.adoption_fraction, seed, mode.value, ex,
            )
            run = SeedRun(
                seed = seed,
                mode = mode,
                adopters = adopters,
                error = str(ex),
                error_type = type(ex).__name__,
            )
        runs.append(run)
    return runs


def run_comparison(
    scenario: Scenario,
    store: Optional[ResultStore] = None,
    jobs: Optional[int] = None,
    sensitivity: Optional[SensitivityMatrix] = None,
) -> ComparisonReport:
    """Run every seed of a scenario in each of its modes.

    Errors of a single seed are recorded in its run and the remaining seeds
    still run. Runs are also inserted into 'store' when given.

    Arguments:
        jobs: Run up to this many seeds concurrently.

    Raises:
        InfeasibleScheduleError: The scenario's EV spec admits no schedule.
        StructuralError: The network is not a tree.
    """
    check_spec(scenario.ev, scenario.tariff.intervals)
    if sensitivity is None:
        check_tree(scenario.network)
        sensitivity = build_sensitivity(scenario.network)
    logger.info(
        "Adoption %g: %d seeds, mode %s",
        scenario.adoption_fraction, len(scenario.seeds), scenario.mode.value,
    )
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers = jobs) as pool:
            per_seed = list(pool.map(
                lambda seed: _run_seed(scenario, sensitivity, seed), scenario.seeds,
            ))
    else:
        per_seed = [_run_seed(scenario, sensitivity, seed) for seed in scenario.seeds]
    runs = [run for seed_runs in per_seed for run in seed_runs]
    if store is not None:
        for run in runs:
            store.insert(ResultStore.key(run.mode, scenario.adoption_fraction, run.seed), run)
    aggregates = {}
    for mode in scenario.mode.modes():
        succeeded = [run for run in runs if run.mode is mode and run.ok]
        aggregates[mode] = aggregate_bands(
            [run.bands for run in succeeded], [run.seed for run in succeeded],
        )
    return ComparisonReport(
        adoption_fraction = scenario.adoption_fraction,
        seeds = list(scenario.seeds),
        runs = runs,
        aggregates = aggregates,
    )


def run_sweep(
    scenario: Scenario,
    fractions: Sequence[float],
    store: Optional[ResultStore] = None,
    jobs: Optional[int] = None,
) -> List[ComparisonReport]:
    """run_comparison at each adoption fraction, sharing one sensitivity matrix."""
    check_tree(scenario.network)
    sensitivity = build_sensitivity(scenario.network)
    return [
        run_comparison(
            scenario.copy(update = {"adoption_fraction": fraction}),
            store = store,
            jobs = jobs,
            sensitivity = sensitivity,
        )
        for fraction in fractions
    ]
