"""Value types exchanged and produced by the ADMM coordination.

Trajectory matrices are |H| x T in kW, rows ordered like the 'nodes' field of
the owning model (residence node ids, increasing).
"""

from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import Field, root_validator

from .base import RevsModel
from .grid import VoltageLimits
from .residence import ChargeSchedule


class AdmmConfig(RevsModel):

    kappa: float = Field(1.0, gt = 0.0)
    max_iters: int = Field(500, ge = 1)
    # kW
    tol_primal: float = Field(1e-3, gt = 0.0)
    tol_dual: float = Field(1e-3, gt = 0.0)
    # Run the operator and residence solves of an iteration concurrently.
    parallel: bool = False
    jobs: Optional[int] = Field(None, ge = 1)
    # Constrain voltages at every non-substation node, not only residences.
    constrain_all_nodes: bool = True
    # Keep p, p~ and gamma of every iteration in the trace.
    keep_iterates: bool = False
    # Operator QP
    max_inner_iters: int = Field(50000, ge = 1)
    inner_tol_primal: float = Field(1e-8, gt = 0.0)
    inner_tol_dual: float = Field(1e-8, gt = 0.0)


# --- Messages

class OperatorMessage(RevsModel):

    """Operator -> residence: the operator's copy of one residence trajectory."""

    iteration: int
    node: int
    p_tilde: List[float]

    @property
    def payload_size(self) -> int:
        return len(self.p_tilde)


class ResidenceMessage(RevsModel):

    """Residence -> operator: the residence's own trajectory."""

    iteration: int
    node: int
    p: List[float]

    @property
    def payload_size(self) -> int:
        return len(self.p)


# --- Operator QP

class OperatorProblem(RevsModel):

    """Operator step: min sum kappa/2 x^2 + x * linear_terms s.t. voltage band.

    'sensitivity' maps residence injections in p.u. to the constrained nodes
    (rows) and has one column per residence. 'linear_terms' are
    gamma - kappa/2 p~[l] - kappa/2 p[l], in the same kW units as x.
    """

    sensitivity: np.ndarray
    base_power: float = Field(..., gt = 0.0)
    limits: VoltageLimits = VoltageLimits()
    kappa: float = Field(..., gt = 0.0)
    linear_terms: np.ndarray
    # Pluggable operator cost C(p) = quadratic_cost / 2 * |p|^2; zero in experiments.
    quadratic_cost: float = Field(0.0, ge = 0.0)
    # Duals of a previous solve, 2M x T, used as the starting point.
    warm_duals: Optional[np.ndarray] = None
    max_inner_iters: int = Field(50000, ge = 1)
    tol_primal: float = Field(1e-8, gt = 0.0)
    tol_dual: float = Field(1e-8, gt = 0.0)

    @root_validator(skip_on_failure = True)
    def _check_shapes(cls, values):
        sensitivity = values["sensitivity"]
        terms = values["linear_terms"]
        if sensitivity.ndim != 2 or terms.ndim != 2:
            raise ValueError("sensitivity and linear_terms must be matrices")
        if sensitivity.shape[1] != terms.shape[0]:
            raise ValueError("linear_terms must have one row per residence")
        warm = values.get("warm_duals")
        if warm is not None and warm.shape != (2 * sensitivity.shape[0], terms.shape[1]):
            raise ValueError("warm_duals must be 2M x T")
        return values


    @property
    def residences(self) -> int:
        return self.sensitivity.shape[1]


    @property
    def intervals(self) -> int:
        return self.linear_terms.shape[1]


class OperatorSolution(RevsModel):

    p_tilde: np.ndarray
    # Multipliers of the lower (rows 0..M-1) and upper (rows M..2M-1) voltage limits.
    duals: np.ndarray
    iterations: int
    kkt_residual: float


# --- ADMM results

class IterationRecord(RevsModel):

    iteration: int
    primal_residual: float
    dual_residual: float
    total_cost: float
    objectives: Dict[int, float]
    payload_to_operator: int
    payload_to_residences: int
    inner_iterations: int
    p: Optional[np.ndarray] = None
    p_tilde: Optional[np.ndarray] = None
    gamma: Optional[np.ndarray] = None


class AdmmTrace(RevsModel):

    records: List[IterationRecord] = []

    @property
    def iterations(self) -> int:
        return len(self.records)


    def primal_residuals(self) -> np.ndarray:
        return np.array([record.primal_residual for record in self.records])


    def dual_residuals(self) -> np.ndarray:
        return np.array([record.dual_residual for record in self.records])


    def to_frame(self) -> pd.DataFrame:
        """Tabular form: iter, primal_residual, dual_residual, total_cost."""
        return pd.DataFrame(
            [
                (r.iteration, r.primal_residual, r.dual_residual, r.total_cost)
                for r in self.records
            ],
            columns = ["iter", "primal_residual", "dual_residual", "total_cost"],
        )


class ConsensusResult(RevsModel):

    nodes: List[int]
    p_final: np.ndarray
    p_tilde: np.ndarray
    gamma: np.ndarray
    schedules: Dict[int, ChargeSchedule]
    # Energy bill per residence, $.
    costs: Dict[int, float]
    converged: bool
    iterations: int
    # Iteration the returned iterate comes from (0 is the initial point).
    selected_iteration: int
    # Squared voltages at all non-substation nodes from p_final, N x T.
    voltages: np.ndarray
    voltage_ok: bool
    trace: AdmmTrace


class CentralizedResult(RevsModel):

    feasible: bool
    schedules: Dict[int, ChargeSchedule] = {}
    costs: Dict[int, float] = {}
    total_cost: Optional[float] = None
    combinations: int = 0


class CostDeviation(RevsModel):

    """Per-adopter deviation of the distributed bill from the centralized one."""

    # Percent, keyed by node.
    deviation: Dict[int, float]
    above_5: List[int]
    above_20: List[int]

    @property
    def within_5_share(self) -> float:
        if not self.deviation:
            return 1.0
        return 1.0 - len(self.above_5) / len(self.deviation)
