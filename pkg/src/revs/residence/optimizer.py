"""Exact residence-side optimization.

Both the individual cost minimization and the ADMM residence step have an
objective that is a sum of per-interval terms in p^t = p0^t + z^t P. The EV
constraints of a single continuous window only bound the number of
on-intervals, so for every admissible count n the best schedule switches on
the n intervals with the smallest on/off objective difference. Trying every
admissible n gives the exact optimum in O(T log T).
"""

import logging
from typing import Optional

import numpy as np

from revs.errors import InfeasibleScheduleError, InstanceTooLargeError
from revs.models.residence import (
    INTERVAL_HOURS,
    BaseLoadProfile,
    EvSpec,
    ResidenceAdmmState,
    ResidenceSolution,
    Tariff,
)

from .loads import charge_count_bounds, check_spec, soc_trajectory


logger = logging.getLogger(__name__)


ORACLE_MAX_WINDOW = 20

_ORACLE_CHUNK = 1 << 14

_SOC_TOLERANCE = 1e-9

# Relative to the largest on-delta in the window.
TIE_TOLERANCE = 1e-12


def _linear_coefficient(state: Optional[ResidenceAdmmState], intervals: int) -> np.ndarray:
    """b^t = gamma^t + kappa/2 (p~^t[l] + p^t[l]), zero without ADMM state."""
    if state is None:
        return np.zeros(intervals)
    return state.gamma + 0.5 * state.kappa * (state.p_operator + state.p_local)


def _objective(p, rates, state) -> np.ndarray:
    """Objective of trajectories 'p' (T, or K x T), constant terms included."""
    value = (p * rates).sum(axis = -1) * INTERVAL_HOURS
    if state is not None:
        b = _linear_coefficient(state, p.shape[-1])
        value = value + (0.5 * state.kappa * p ** 2 - p * b).sum(axis = -1)
    return value


def _on_deltas(p0, spec, rates, state) -> np.ndarray:
    """Objective change from switching the charger on, per interval.

    With ADMM state this is c P + kappa/2 P^2 + P (kappa p0 - b), the
    expanded form of kappa/2 ((p0 + P)^2 - p0^2) - P b.
    """
    power = spec.charger_kw
    deltas = rates * power * INTERVAL_HOURS
    if state is not None:
        b = _linear_coefficient(state, len(p0))
        deltas = deltas + 0.5 * state.kappa * power ** 2 + power * (state.kappa * p0 - b)
    return deltas


def _tie_tolerance(deltas) -> float:
    scale = float(np.abs(deltas).max()) if len(deltas) else 0.0
    return TIE_TOLERANCE * max(1.0, scale)


def _rank(window, deltas, tolerance) -> np.ndarray:
    """Window positions by ascending delta.

    Deltas within 'tolerance' of their sorted neighbour are ties and keep
    window order, earliest interval first.
    """
    order = np.argsort(deltas, kind = "stable")
    gaps = np.diff(deltas[order]) > tolerance
    clusters = np.concatenate(([0], np.cumsum(gaps)))
    return order[np.lexsort((window[order], clusters))]


def _check_inputs(profile, tariff, state):
    if tariff.intervals != profile.intervals:
        raise InfeasibleScheduleError(
            f"tariff has {tariff.intervals} intervals, profile has {profile.intervals}"
        )
    if state is not None and len(state.gamma) != profile.intervals:
        raise InfeasibleScheduleError(
            f"ADMM state has {len(state.gamma)} intervals, profile has {profile.intervals}"
        )


def _solution(profile, spec, rates, state, z) -> ResidenceSolution:
    p0 = profile.as_array()
    p = p0 + z * spec.charger_kw
    return ResidenceSolution(
        node = profile.node,
        schedule = soc_trajectory(spec, z),
        p = p,
        objective = float(_objective(p, rates, state)),
        energy_cost = float((p * rates).sum() * INTERVAL_HOURS),
        ev_cost = float((z * spec.charger_kw * rates).sum() * INTERVAL_HOURS),
    )


def _select(profile, spec, tariff, state) -> ResidenceSolution:
    _check_inputs(profile, tariff, state)
    check_spec(spec, profile.intervals)
    rates = tariff.as_array()
    p0 = profile.as_array()
    n_min, n_max = charge_count_bounds(spec)
    window = np.arange(spec.window_start, spec.window_end + 1)
    deltas = _on_deltas(p0, spec, rates, state)[window]
    tolerance = _tie_tolerance(deltas)
    ranked = _rank(window, deltas, tolerance)
    partial = np.concatenate(([0.0], np.cumsum(deltas[ranked])))[n_min:n_max + 1]
    # Fewest charging intervals among totals equal to within the tie tolerance.
    slack = tolerance * (n_max + 1)
    count = n_min + int(np.flatnonzero(partial <= partial.min() + slack)[0])
    z = np.zeros(profile.intervals, dtype = int)
    z[window[ranked[:count]]] = 1
    return _solution(profile, spec, rates, state, z)


def solve_individual(
    profile: BaseLoadProfile,
    spec: EvSpec,
    tariff: Tariff,
) -> ResidenceSolution:
    """Minimize the residence's energy bill subject to the EV model.

    Raises:
        InfeasibleScheduleError: The spec admits no schedule.
    """
    return _select(profile, spec, tariff, None)


def solve_admm_step(
    profile: BaseLoadProfile,
    spec: EvSpec,
    tariff: Tariff,
    state: ResidenceAdmmState,
) -> ResidenceSolution:
    """Residence update of one ADMM iteration.

    Minimizes sum_t c^t p^t + kappa/2 (p^t)^2 - p^t (gamma^t + kappa/2 p~^t[l]
    + kappa/2 p^t[l]) subject to the EV model.

    Raises:
        InfeasibleScheduleError: The spec admits no schedule.
    """
    return _select(profile, spec, tariff, state)


def brute_force_oracle(
    profile: BaseLoadProfile,
    spec: EvSpec,
    tariff: Tariff,
    state: Optional[ResidenceAdmmState] = None,
) -> ResidenceSolution:
    """Exhaustive search over every on/off pattern inside the window.

    Feasibility is judged from the SOC each pattern reaches, not from count
    bounds. Among equal objectives the first pattern in enumeration order
    (bit j of the pattern number is window interval j) wins.

    Raises:
        InstanceTooLargeError: Window longer than ORACLE_MAX_WINDOW.
        InfeasibleScheduleError: No pattern satisfies the EV model.
    """
    _check_inputs(profile, tariff, state)
    width = spec.window_length
    if width > ORACLE_MAX_WINDOW:
        raise InstanceTooLargeError(
            f"window of {width} intervals exceeds the oracle limit of {ORACLE_MAX_WINDOW}"
        )
    if spec.window_end >= profile.intervals:
        raise InfeasibleScheduleError("charging window ends past the horizon")
    rates = tariff.as_array()
    p0 = profile.as_array()
    bits = np.arange(width)
    best_value, best_z = np.inf, None
    for first in range(0, 1 << width, _ORACLE_CHUNK):
        patterns = np.arange(first, min(first + _ORACLE_CHUNK, 1 << width))
        masks = (patterns[:, None] >> bits) & 1
        final_soc = spec.soc_init + masks.sum(axis = 1) * spec.soc_per_interval
        feasible = (
            (final_soc <= 1.0 + _SOC_TOLERANCE) &
            (final_soc >= spec.soc_final - _SOC_TOLERANCE)
        )
        if not feasible.any():
            continue
        z = np.zeros((len(patterns), profile.intervals), dtype = int)
        z[:, spec.window_start:spec.window_end + 1] = masks
        values = _objective(p0 + z * spec.charger_kw, rates, state)
        values[~feasible] = np.inf
        index = int(np.argmin(values))
        if values[index] < best_value:
            best_value, best_z = values[index], z[index]
    if best_z is None:
        raise InfeasibleScheduleError("no charging pattern satisfies the EV model")
    return _solution(profile, spec, rates, state, best_z)
