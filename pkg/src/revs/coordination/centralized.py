"""Exhaustive centralized reference for desk-scale instances.

Searches every joint combination of feasible adopter schedules for the
cheapest one that keeps all voltages inside the band. Only usable when the
product of per-adopter schedule counts is small.
"""

import itertools
import logging
from math import comb, prod
from typing import Mapping, Optional, Sequence

import numpy as np

from revs.errors import DataError, InstanceTooLargeError
from revs.models.coordination import CentralizedResult, ConsensusResult, CostDeviation
from revs.models.grid import DistributionNetwork, SensitivityMatrix, VoltageLimits
from revs.models.residence import INTERVAL_HOURS, BaseLoadProfile, EvSpec, Tariff
from revs.network import build_sensitivity, check_tree, stack_injections
from revs.residence import charge_count_bounds, check_spec, soc_trajectory


logger = logging.getLogger(__name__)


MAX_COMBINATIONS = 10 ** 7

_VOLTAGE_TOLERANCE = 1e-12


def schedule_count(spec: EvSpec) -> int:
    """Number of feasible on/off schedules of one EV."""
    n_min, n_max = charge_count_bounds(spec)
    return sum(comb(spec.window_length, n) for n in range(n_min, n_max + 1))


def _candidates(spec: EvSpec, intervals: int) -> np.ndarray:
    """All feasible schedules z (K x T), in order of on-count then interval."""
    n_min, n_max = charge_count_bounds(spec)
    rows = []
    for count in range(n_min, n_max + 1):
        for chosen in itertools.combinations(spec.window(), count):
            z = np.zeros(intervals, dtype = int)
            z[list(chosen)] = 1
            rows.append(z)
    return np.array(rows, dtype = int).reshape(len(rows), intervals)


def centralized_oracle(
    network: DistributionNetwork,
    profiles: Sequence[BaseLoadProfile],
    specs: Mapping[int, EvSpec],
    tariff: Tariff,
    limits: VoltageLimits = VoltageLimits(),
    sensitivity: Optional[SensitivityMatrix] = None,
    max_combinations: int = MAX_COMBINATIONS,
) -> CentralizedResult:
    """Cheapest joint schedule satisfying the voltage band at every node and interval.

    The total cost is the sum of all residence bills, base load included.
    Among equally cheap combinations the first in enumeration order wins.

    Raises:
        InstanceTooLargeError: More than 'max_combinations' joint schedules.
        InfeasibleScheduleError: An adopter's spec admits no schedule.
    """
    if sensitivity is None:
        check_tree(network)
        sensitivity = build_sensitivity(network)
    intervals = tariff.intervals
    by_node = {profile.node: profile for profile in profiles}
    if sorted(by_node) != network.residences():
        raise DataError("profiles must cover exactly the residences of the network")
    adopters = sorted(specs)
    for node in adopters:
        if node not in by_node:
            raise DataError(f"EV spec for node {node}, which is not a residence")
        check_spec(specs[node], intervals)
    combinations = prod(schedule_count(specs[node]) for node in adopters)
    if combinations > max_combinations:
        raise InstanceTooLargeError(
            f"{combinations} joint schedules exceed the limit of {max_combinations}"
        )

    rates = tariff.as_array()
    base = stack_injections(
        network, {node: profile.as_array() for node, profile in by_node.items()}, intervals,
    )
    base_bills = {
        node: float((profile.as_array() * rates).sum() * INTERVAL_HOURS)
        for node, profile in by_node.items()
    }
    scale = 2.0 / network.base_power
    v_base = 1.0 - scale * sensitivity.matrix @ base

    # Per adopter: schedules, their EV cost, and the squared-voltage drop they cause.
    options = []
    for node in adopters:
        spec = specs[node]
        z = _candidates(spec, intervals)
        ev_kw = z * spec.charger_kw
        cost = (ev_kw * rates).sum(axis = 1) * INTERVAL_HOURS
        column = sensitivity.matrix[:, node - 1]
        drop = scale * column[None, :, None] * ev_kw[:, None, :]
        options.append((z, cost, drop))

    best_cost, best_choice = np.inf, None
    if not adopters:
        if _within(v_base, limits):
            best_cost, best_choice = 0.0, ()
    else:
        *outer, (_, last_cost, last_drop) = options
        cheapest_last = float(last_cost.min())
        for choice in itertools.product(*(range(len(o[0])) for o in outer)):
            partial = sum(float(o[1][k]) for o, k in zip(outer, choice))
            if partial + cheapest_last >= best_cost:
                continue
            v = v_base - sum((o[2][k] for o, k in zip(outer, choice)), np.zeros_like(v_base))
            totals = partial + last_cost
            ok = _within(v[None, :, :] - last_drop, limits, axis = (1, 2))
            totals = np.where(ok & (totals < best_cost), totals, np.inf)
            k = int(np.argmin(totals))
            if totals[k] < best_cost:
                best_cost, best_choice = float(totals[k]), choice + (k,)

    if best_choice is None:
        logger.info("Centralized search: no voltage-feasible combination among %d", combinations)
        return CentralizedResult(feasible = False, combinations = combinations)
    schedules, costs = {}, dict(base_bills)
    for node, (z, cost, _), k in zip(adopters, options, best_choice):
        schedules[node] = soc_trajectory(specs[node], z[k])
        costs[node] += float(cost[k])
    return CentralizedResult(
        feasible = True,
        schedules = schedules,
        costs = costs,
        total_cost = float(sum(costs.values())),
        combinations = combinations,
    )


def _within(v, limits, axis = None):
    return (
        (v >= limits.alpha - _VOLTAGE_TOLERANCE).all(axis = axis) &
        (v <= limits.beta + _VOLTAGE_TOLERANCE).all(axis = axis)
    )


def cost_deviation(
    consensus: ConsensusResult,
    centralized: CentralizedResult,
    nodes: Optional[Sequence[int]] = None,
) -> CostDeviation:
    """Percent deviation of each distributed bill from the centralized optimum.

    Arguments:
        nodes: Residences to compare; defaults to those with a centralized
            schedule (the adopters).
    """
    if not centralized.feasible:
        raise DataError("centralized reference is infeasible, no costs to compare")
    if nodes is None:
        nodes = sorted(centralized.schedules)
    deviation = {}
    for node in nodes:
        reference, actual = centralized.costs[node], consensus.costs[node]
        if reference == 0.0:
            deviation[node] = 0.0 if actual == 0.0 else float("inf")
        else:
            deviation[node] = 100.0 * abs(actual - reference) / abs(reference)
    above_5 = [node for node, value in deviation.items() if value > 5.0]
    above_20 = [node for node, value in deviation.items() if value > 20.0]
    for node in above_5:
        logger.warning(
            "Node %d: distributed cost deviates %.1f%% from centralized", node, deviation[node],
        )
    return CostDeviation(deviation = deviation, above_5 = above_5, above_20 = above_20)
