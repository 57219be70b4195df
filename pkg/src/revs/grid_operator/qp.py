"""Operator step of the ADMM coordination.

For every interval t the operator solves

    min  a/2 |x|^2 + q^T x
    s.t. alpha <= 1 - 2 A x <= beta

with x the residence trajectories at t (kW), A the sensitivity rows of the
constrained nodes scaled to kW, a = kappa (+ the optional operator cost
weight) and q the ADMM linear terms. Intervals share nothing, so each is its
own small strongly convex QP.

Writing the band as G x <= h with G = [2A; -2A] and h = [1 - alpha; beta - 1],
the dual function is concave with gradient G x(lambda) - h and
x(lambda) = -(q + G^T lambda) / a. It is maximized by projected gradient ascent
with Nesterov momentum and gradient restart, step 1 / L with
L = |G|^2 / a = 8 sigma_max(A)^2 / a.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from revs.errors import DimensionError, SolverError
from revs.models.coordination import OperatorProblem, OperatorSolution
from revs.models.grid import SensitivityMatrix, VoltageLimits


logger = logging.getLogger(__name__)


_POWER_ITERATIONS = 200

# Power iteration approaches sigma_max from below.
_LIPSCHITZ_MARGIN = 1.05


def largest_eigenvalue(matrix: np.ndarray, iterations: int = _POWER_ITERATIONS) -> float:
    """Largest eigenvalue of a symmetric positive semidefinite matrix."""
    vector = np.ones(matrix.shape[0])
    value = 0.0
    for _ in range(iterations):
        image = matrix @ vector
        norm = np.linalg.norm(image)
        if norm == 0.0:
            return 0.0
        vector = image / norm
        estimate = float(vector @ matrix @ vector)
        if abs(estimate - value) <= 1e-12 * max(estimate, 1.0):
            return estimate
        value = estimate
    return value


def build_operator_problem(
    sensitivity: SensitivityMatrix,
    residences: Sequence[int],
    base_power: float,
    kappa: float,
    gamma: np.ndarray,
    p_tilde: np.ndarray,
    p: np.ndarray,
    limits: VoltageLimits = VoltageLimits(),
    constrain_all_nodes: bool = True,
    warm_duals: Optional[np.ndarray] = None,
    **opts,
) -> OperatorProblem:
    """Operator problem for iteration l from gamma[l], p~[l] and p[l] (|H| x T, kW)."""
    if not gamma.shape == p_tilde.shape == p.shape:
        raise DimensionError("gamma, p~ and p must have the same shape")
    columns = np.asarray(residences) - 1
    if constrain_all_nodes:
        rows = sensitivity.matrix[:, columns]
    else:
        rows = sensitivity.matrix[np.ix_(columns, columns)]
    linear_terms = gamma - 0.5 * kappa * p_tilde - 0.5 * kappa * p
    return OperatorProblem(
        sensitivity = rows,
        base_power = base_power,
        limits = limits,
        kappa = kappa,
        linear_terms = linear_terms,
        warm_duals = warm_duals,
        **opts,
    )


class _IntervalQP:

    """Shared data of the per-interval problems of one operator step."""

    def __init__(self, problem: OperatorProblem):
        self.problem = problem
        self.a = problem.kappa + problem.quadratic_cost
        # Rows map kW to squared-voltage drop halves: v = 1 - 2 A x.
        self.A = problem.sensitivity / problem.base_power
        rows = self.A.shape[0]
        self.h = np.concatenate((
            np.full(rows, 1.0 - problem.limits.alpha),
            np.full(rows, problem.limits.beta - 1.0),
        ))
        self.lipschitz = (
            8.0 * largest_eigenvalue(self.A.T @ self.A) / self.a * _LIPSCHITZ_MARGIN
        )


    def G(self, x):
        drop = 2.0 * self.A @ x
        return np.concatenate((drop, -drop))


    def GT(self, duals):
        rows = self.A.shape[0]
        return 2.0 * self.A.T @ (duals[:rows] - duals[rows:])


    def primal(self, q, duals):
        return -(q + self.GT(duals)) / self.a


    def residuals(self, x, q, duals):
        """(stationarity, primal infeasibility, dual infeasibility, complementarity)."""
        slack = self.G(x) - self.h
        return (
            float(np.max(np.abs(self.a * x + q + self.GT(duals)), initial = 0.0)),
            float(np.max(slack, initial = 0.0)),
            float(np.max(-duals, initial = 0.0)),
            float(np.max(np.abs(duals * slack), initial = 0.0)),
        )


    def converged(self, x, duals):
        slack = self.G(x) - self.h
        return (
            np.max(slack, initial = 0.0) < self.problem.tol_primal and
            np.max(np.abs(duals * slack), initial = 0.0) < self.problem.tol_dual
        )


    def solve(self, t):
        """Solve interval t, returning (x, duals, iterations)."""
        problem = self.problem
        q = problem.linear_terms[:, t]
        zero = np.zeros(len(self.h))
        x = -q / self.a
        if np.max(self.G(x) - self.h, initial = 0.0) < problem.tol_primal:
            return x, zero, 0
        duals = zero if problem.warm_duals is None else problem.warm_duals[:, t].copy()
        if self.lipschitz == 0.0:
            raise SolverError(f"interval {t}: voltage band infeasible without sensitivity")
        step = 1.0 / self.lipschitz
        momentum, extrapolated = 1.0, duals.copy()
        for iteration in range(1, problem.max_inner_iters + 1):
            x = self.primal(q, extrapolated)
            updated = np.maximum(0.0, extrapolated + step * (self.G(x) - self.h))
            next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum ** 2))
            if np.dot(extrapolated - updated, updated - duals) > 0.0:
                # Gradient restart
                next_momentum = 1.0
                extrapolated = updated
            else:
                extrapolated = updated + ((momentum - 1.0) / next_momentum) * (updated - duals)
            duals, momentum = updated, next_momentum
            x = self.primal(q, duals)
            if self.converged(x, duals):
                return x, duals, iteration
        stationarity, primal, dual, complementarity = self.residuals(x, q, duals)
        raise SolverError(
            f"operator QP for interval {t} did not converge "
            f"in {problem.max_inner_iters} iterations",
            residuals = {
                "primal": primal,
                "dual": dual,
                "complementarity": complementarity,
                "stationarity": stationarity,
            },
        )


def solve_operator_step(problem: OperatorProblem, jobs: Optional[int] = None) -> OperatorSolution:
    """Update the operator's copy p~ of all residence trajectories.

    Arguments:
        problem: The per-iteration QP data.
        jobs: Solve up to this many intervals concurrently. Sequential if None.

    Raises:
        SolverError: An interval QP did not reach its tolerances.
    """
    qp = _IntervalQP(problem)
    intervals = range(problem.intervals)
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers = jobs) as pool:
            results = list(pool.map(qp.solve, intervals))
    else:
        results = [qp.solve(t) for t in intervals]
    p_tilde = np.column_stack([x for x, _, _ in results])
    duals = np.column_stack([d for _, d, _ in results])
    iterations = sum(count for _, _, count in results)
    solution = OperatorSolution(
        p_tilde = p_tilde,
        duals = duals,
        iterations = iterations,
        kkt_residual = 0.0,
    )
    residual = verify_kkt(problem, solution)
    logger.debug("Operator step: %d inner iterations, KKT residual %.2e", iterations, residual)
    return solution.copy(update = {"kkt_residual": residual})


def verify_kkt(problem: OperatorProblem, solution: OperatorSolution) -> float:
    """Largest KKT residual (stationarity, feasibility, complementarity) over intervals."""
    expected = (problem.residences, problem.intervals)
    if solution.p_tilde.shape != expected:
        raise DimensionError(f"p~ has shape {solution.p_tilde.shape}, expected {expected}")
    qp = _IntervalQP(problem)
    worst = 0.0
    for t in range(problem.intervals):
        residuals = qp.residuals(
            solution.p_tilde[:, t],
            problem.linear_terms[:, t],
            solution.duals[:, t],
        )
        worst = max(worst, *residuals)
    return worst


def operator_objective(problem: OperatorProblem, p_tilde: np.ndarray) -> float:
    """Objective value of the operator step at p~ (kW, |H| x T)."""
    a = problem.kappa + problem.quadratic_cost
    return float((0.5 * a * p_tilde ** 2 + p_tilde * problem.linear_terms).sum())
