"""Consensus ADMM between the network operator and the residences.

Every iteration l runs the operator step (S1a) and all residence steps (S1b)
against iteration-l data, exchanges the new trajectories as messages, then
updates the duals (S2). The operator never sees loads or EV data and the
residences never see the network: only trajectories cross the boundary.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from revs.errors import DataError, DimensionError
from revs.grid_operator import build_operator_problem, solve_operator_step
from revs.models.coordination import (
    AdmmConfig,
    AdmmTrace,
    ConsensusResult,
    IterationRecord,
    OperatorMessage,
    ResidenceMessage,
)
from revs.models.grid import DistributionNetwork, SensitivityMatrix, VoltageLimits
from revs.models.residence import (
    INTERVAL_HOURS,
    BaseLoadProfile,
    ChargeSchedule,
    EvSpec,
    ResidenceAdmmState,
    ResidenceSolution,
    Tariff,
)
from revs.network import build_sensitivity, check_limits, check_tree, stack_injections, voltages
from revs.residence import soc_trajectory, solve_admm_step, solve_individual


logger = logging.getLogger(__name__)


# Squared-voltage slack when judging the residence-side iterate.
VOLTAGE_TOLERANCE = 1e-6


def dual_update(
    gamma: np.ndarray,
    p_tilde_next: np.ndarray,
    p_next: np.ndarray,
    kappa: float,
) -> np.ndarray:
    """gamma' = gamma + kappa/2 (p~ - p)."""
    gamma, p_tilde_next, p_next = (
        np.asarray(array, dtype = float) for array in (gamma, p_tilde_next, p_next)
    )
    if not gamma.shape == p_tilde_next.shape == p_next.shape:
        raise DimensionError(
            f"shapes differ: gamma {gamma.shape}, p~ {p_tilde_next.shape}, p {p_next.shape}"
        )
    return gamma + 0.5 * kappa * (p_tilde_next - p_next)


# --- Residences

class _Residence:

    """A residence's private data; adopters own an EV spec."""

    def __init__(self, profile: BaseLoadProfile, spec: Optional[EvSpec], tariff: Tariff):
        self.node = profile.node
        self.profile = profile
        self.spec = spec
        self.tariff = tariff


    def _fixed(self, state) -> ResidenceSolution:
        p = self.profile.as_array()
        rates = self.tariff.as_array()
        objective = float((p * rates).sum() * INTERVAL_HOURS)
        if state is not None:
            b = state.gamma + 0.5 * state.kappa * (state.p_operator + state.p_local)
            objective += float((0.5 * state.kappa * p ** 2 - p * b).sum())
        z = np.zeros(self.profile.intervals, dtype = int)
        return ResidenceSolution(
            node = self.node,
            schedule = ChargeSchedule(z = z, soc = np.zeros(len(z) + 1)),
            p = p,
            objective = objective,
            energy_cost = float((p * rates).sum() * INTERVAL_HOURS),
        )


    def initial(self) -> ResidenceSolution:
        if self.spec is None:
            return self._fixed(None)
        return solve_individual(self.profile, self.spec, self.tariff)


    def step(self, state: ResidenceAdmmState) -> ResidenceSolution:
        if self.spec is None:
            return self._fixed(state)
        return solve_admm_step(self.profile, self.spec, self.tariff, state)


def _residences(network, profiles, specs, tariff) -> List[_Residence]:
    by_node = {profile.node: profile for profile in profiles}
    expected = network.residences()
    if not expected:
        raise DataError("network has no residences")
    if sorted(by_node) != expected:
        raise DataError("profiles must cover exactly the residences of the network")
    unknown = sorted(set(specs) - set(expected))
    if unknown:
        raise DataError(f"EV specs for nodes that are not residences: {unknown}")
    for profile in profiles:
        if profile.intervals != tariff.intervals:
            raise DimensionError(
                f"profile of node {profile.node} has {profile.intervals} intervals, "
                f"tariff has {tariff.intervals}"
            )
    return [_Residence(by_node[node], specs.get(node), tariff) for node in expected]


# --- Message exchange

def _exchange(iteration, residences, p_next, p_tilde_next):
    """Messages carrying the new iterates, and the trajectories they deliver."""
    to_operator = [
        ResidenceMessage(iteration = iteration, node = home.node, p = row.tolist())
        for home, row in zip(residences, p_next)
    ]
    to_residences = [
        OperatorMessage(iteration = iteration, node = home.node, p_tilde = row.tolist())
        for home, row in zip(residences, p_tilde_next)
    ]
    received_p = np.array([message.p for message in to_operator])
    received_p_tilde = np.array([message.p_tilde for message in to_residences])
    return to_operator, to_residences, received_p, received_p_tilde


# --- Coordinator

class _Coordinator:

    def __init__(self, network, sensitivity, residences, config, limits):
        self.network = network
        self.sensitivity = sensitivity
        self.residences = residences
        self.nodes = [home.node for home in residences]
        self.config = config
        self.limits = limits
        self.intervals = residences[0].profile.intervals if residences else 0


    def operator_step(self, gamma, p_tilde, p, warm_duals):
        config = self.config
        problem = build_operator_problem(
            self.sensitivity,
            self.nodes,
            self.network.base_power,
            config.kappa,
            gamma,
            p_tilde,
            p,
            limits = self.limits,
            constrain_all_nodes = config.constrain_all_nodes,
            warm_duals = warm_duals,
            max_inner_iters = config.max_inner_iters,
            tol_primal = config.inner_tol_primal,
            tol_dual = config.inner_tol_dual,
        )
        return solve_operator_step(problem, jobs = None if config.parallel else config.jobs)


    def residence_steps(self, gamma, p_tilde, p, pool = None):
        states = [
            ResidenceAdmmState(
                p_local = p[row],
                p_operator = p_tilde[row],
                gamma = gamma[row],
                kappa = self.config.kappa,
            )
            for row in range(len(self.residences))
        ]
        if pool is None:
            return [home.step(state) for home, state in zip(self.residences, states)]
        return list(pool.map(lambda pair: pair[0].step(pair[1]), zip(self.residences, states)))


    def iterate(self, gamma, p_tilde, p, warm_duals, pool):
        """S1a and S1b on iteration-l data, concurrently when a pool is given."""
        if pool is None:
            operator = self.operator_step(gamma, p_tilde, p, warm_duals)
            solutions = self.residence_steps(gamma, p_tilde, p)
        else:
            pending = pool.submit(self.operator_step, gamma, p_tilde, p, warm_duals)
            solutions = self.residence_steps(gamma, p_tilde, p, pool)
            operator = pending.result()
        return operator, solutions


    def network_voltages(self, p) -> np.ndarray:
        injections = dict(zip(self.nodes, p))
        stacked = stack_injections(self.network, injections, self.intervals)
        return voltages(self.sensitivity, stacked / self.network.base_power)


    def feasible(self, v) -> bool:
        return check_limits(v, self.limits).worst <= VOLTAGE_TOLERANCE


def run_admm(
    network: DistributionNetwork,
    profiles: Sequence[BaseLoadProfile],
    specs: Mapping[int, EvSpec],
    tariff: Tariff,
    config: AdmmConfig = AdmmConfig(),
    limits: VoltageLimits = VoltageLimits(),
    sensitivity: Optional[SensitivityMatrix] = None,
) -> ConsensusResult:
    """Coordinate residences and operator until their trajectories agree.

    Arguments:
        network: The distribution network.
        profiles: Base load of every residence.
        specs: EV specs keyed by node, for the adopters only. Other residences
            take part with their base load as a fixed trajectory.
        tariff: Rates over the horizon.
        config: Penalty, tolerances, iteration caps and concurrency.
        limits: Squared-voltage band enforced by the operator.
        sensitivity: Precomputed sensitivity matrix of 'network'.

    Returns:
        The residence-side iterate at convergence. Without convergence, the
        voltage-feasible iterate with the smallest primal residual, or the
        last one if none is feasible, with 'converged' false.

    Raises:
        DataError: Profiles or specs do not match the network.
        InfeasibleScheduleError: An adopter's EV spec admits no schedule.
        SolverError: The operator QP did not converge.
    """
    if sensitivity is None:
        check_tree(network)
        sensitivity = build_sensitivity(network)
    residences = _residences(network, profiles, specs, tariff)
    coordinator = _Coordinator(network, sensitivity, residences, config, limits)
    logger.info(
        "ADMM: %d residences (%d adopters), kappa %g",
        len(residences), len(specs), config.kappa,
    )

    solutions = [home.initial() for home in residences]
    p = np.array([solution.p for solution in solutions]).reshape(len(residences), -1)
    p_tilde = p.copy()
    gamma = np.zeros_like(p)
    warm_duals = None
    trace: List[IterationRecord] = []
    best = None
    selected = (0, solutions, p_tilde, gamma)
    converged = False

    jobs = config.jobs if config.parallel else None
    pool = ThreadPoolExecutor(max_workers = jobs) if config.parallel else None
    try:
        for iteration in range(1, config.max_iters + 1):
            operator, solutions = coordinator.iterate(gamma, p_tilde, p, warm_duals, pool)
            p_next = np.array([solution.p for solution in solutions]).reshape(p.shape)
            to_operator, to_residences, p_next, p_tilde_next = _exchange(
                iteration, residences, p_next, operator.p_tilde.reshape(p.shape),
            )
            gamma = dual_update(gamma, p_tilde_next, p_next, config.kappa)
            primal = float(np.max(np.abs(p_tilde_next - p_next), initial = 0.0))
            dual = float(np.max(np.abs(p_next - p), initial = 0.0))
            p, p_tilde, warm_duals = p_next, p_tilde_next, operator.duals
            trace.append(IterationRecord(
                iteration = iteration,
                primal_residual = primal,
                dual_residual = dual,
                total_cost = float(sum(solution.energy_cost for solution in solutions)),
                objectives = {solution.node: solution.objective for solution in solutions},
                payload_to_operator = sum(message.payload_size for message in to_operator),
                payload_to_residences = sum(message.payload_size for message in to_residences),
                inner_iterations = operator.iterations,
                p = p if config.keep_iterates else None,
                p_tilde = p_tilde if config.keep_iterates else None,
                gamma = gamma if config.keep_iterates else None,
            ))
            logger.debug(
                "ADMM iteration %d: primal %.3e, dual %.3e, %d inner iterations",
                iteration, primal, dual, operator.iterations,
            )
            selected = (iteration, solutions, p_tilde, gamma)
            if primal <= config.tol_primal and dual <= config.tol_dual:
                converged = True
                break
            if coordinator.feasible(coordinator.network_voltages(p)):
                if best is None or primal < best[0]:
                    best = (primal, iteration, solutions, p_tilde, gamma)
    finally:
        if pool is not None:
            pool.shutdown()

    if converged:
        logger.info("ADMM converged after %d iterations", len(trace))
    else:
        logger.warning(
            "ADMM did not converge in %d iterations (primal %.3e, dual %.3e)",
            len(trace),
            trace[-1].primal_residual if trace else 0.0,
            trace[-1].dual_residual if trace else 0.0,
        )
        if best is not None:
            selected = best[1:]
    return _result(coordinator, selected, converged, trace)


def _result(coordinator, selected, converged, records) -> ConsensusResult:
    iteration, solutions, p_tilde, gamma = selected
    p_final = np.array([solution.p for solution in solutions]).reshape(p_tilde.shape)
    v = coordinator.network_voltages(p_final)
    schedules = {
        home.node: soc_trajectory(home.spec, solution.schedule.z)
        for home, solution in zip(coordinator.residences, solutions)
        if home.spec is not None
    }
    return ConsensusResult(
        nodes = coordinator.nodes,
        p_final = p_final,
        p_tilde = p_tilde,
        gamma = gamma,
        schedules = schedules,
        costs = {solution.node: solution.energy_cost for solution in solutions},
        converged = converged,
        iterations = len(records),
        selected_iteration = iteration,
        voltages = v,
        voltage_ok = coordinator.feasible(v),
        trace = AdmmTrace(records = records),
    )


def individual_injections(
    profiles: Sequence[BaseLoadProfile],
    specs: Mapping[int, EvSpec],
    tariff: Tariff,
) -> Dict[int, ResidenceSolution]:
    """Cost-minimizing trajectories of all residences acting alone."""
    return {
        profile.node: _Residence(profile, specs.get(profile.node), tariff).initial()
        for profile in profiles
    }
