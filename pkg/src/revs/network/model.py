"""Linearized DistFlow model of a radial network.

Squared voltages follow v = 1 - 2 R p with p the per-unit consumption of the
non-substation nodes and R the matrix of common-path resistances. The
substation is held at 1 p.u.
"""

import logging
from typing import Mapping

import numpy as np

from revs.errors import DimensionError
from revs.models.grid import (
    DistributionNetwork,
    EdgeFlows,
    LimitCheck,
    SensitivityMatrix,
    VoltageLimits,
)

from .topology import tree_index


logger = logging.getLogger(__name__)


def build_sensitivity(network: DistributionNetwork) -> SensitivityMatrix:
    """Build R with R_ij = sum of r_e over the edges common to both root paths.

    Nodes are visited parents first. A node shares with every node visited
    before it exactly what its parent shares, so its row is the parent's row
    plus its own edge on the diagonal.
    """
    index = tree_index(network)
    count = network.size + 1
    # Row and column 0 (substation) stay zero.
    full = np.zeros((count, count))
    seen = [0]
    for node in index.order:
        parent = index.parent[node]
        full[node, seen] = full[parent, seen]
        full[seen, node] = full[parent, seen]
        full[node, node] = full[parent, parent] + index.resistance[node]
        seen.append(node)
    logger.debug("Built %d x %d sensitivity matrix", network.size, network.size)
    return SensitivityMatrix(matrix = full[1:, 1:])


def to_per_unit(power_kw, base_power: float) -> np.ndarray:
    return np.asarray(power_kw, dtype = float) / base_power


def voltages(sensitivity: SensitivityMatrix, p) -> np.ndarray:
    """Squared voltages 1 - 2 R p for a vector (N) or trajectory matrix (N x T)."""
    p = np.asarray(p, dtype = float)
    if p.ndim not in (1, 2) or p.shape[0] != sensitivity.size:
        raise DimensionError(
            f"power has shape {p.shape}, expected leading dimension {sensitivity.size}"
        )
    return 1.0 - 2.0 * sensitivity.matrix @ p


def edge_flows(network: DistributionNetwork, p) -> EdgeFlows:
    """Flow on each edge as the total per-unit load of the subtree below it."""
    p = np.asarray(p, dtype = float)
    if p.ndim not in (1, 2) or p.shape[0] != network.size:
        raise DimensionError(
            f"power has shape {p.shape}, expected leading dimension {network.size}"
        )
    index = tree_index(network)
    subtree = np.zeros((network.size + 1,) + p.shape[1:])
    subtree[1:] = p
    for node in index.order[::-1]:
        subtree[index.parent[node]] += subtree[node]
    # Edges are sorted by child, and the children are exactly 1..N.
    flow_kw = subtree[1:] * network.base_power
    capacity = np.array([edge.capacity for edge in network.edges])
    if p.ndim == 2:
        capacity = capacity[:, None]
    return EdgeFlows(flow_kw = flow_kw, percent = 100.0 * flow_kw / capacity)


def check_limits(v, limits: VoltageLimits) -> LimitCheck:
    """Flag entries outside the closed band [alpha, beta]."""
    v = np.asarray(v, dtype = float)
    below = limits.alpha - v
    above = v - limits.beta
    violated = (below > 0.0) | (above > 0.0)
    worst = float(max(np.max(below, initial = 0.0), np.max(above, initial = 0.0)))
    return LimitCheck(violated = violated, worst = worst)


def stack_injections(
    network: DistributionNetwork,
    injections: Mapping[int, np.ndarray],
    intervals: int,
) -> np.ndarray:
    """N x T consumption matrix in kW; nodes without an entry consume nothing."""
    stacked = np.zeros((network.size, intervals))
    for node, power in injections.items():
        stacked[node - 1] = power
    return stacked
