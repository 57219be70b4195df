"""Distribution network value types.

Node 0 is the substation. Non-substation nodes are numbered 1..N and index the
rows and columns of the sensitivity matrix as 'node - 1'. Each edge is
identified by its child node, so edge arrays are also indexed by 'child - 1'.
"""

from typing import Dict, List

import numpy as np
from pydantic import Field, root_validator, validator

from .base import RevsModel
from .enumerations import NodeKind


SUBSTATION_ID = 0


class Node(RevsModel):

    id: int = Field(..., ge = 0)
    kind: NodeKind


class Edge(RevsModel):

    parent: int = Field(..., ge = 0)
    child: int = Field(..., ge = 1)
    # Per-unit resistance r_e.
    resistance: float = Field(..., ge = 0.0)
    # Line rating in kW.
    capacity: float = Field(..., gt = 0.0)


class DistributionNetwork(RevsModel):

    """Radial network rooted at the substation.

    Only node numbering and per-element values are validated here. Whether the
    edges actually form a tree is checked by 'revs.network.topology.check_tree'
    so that structural problems can be reported rather than rejected outright.
    """

    nodes: List[Node]
    edges: List[Edge]
    # kW per unit of power.
    base_power: float = Field(100.0, gt = 0.0)

    @validator("nodes")
    def _check_nodes(cls, nodes):
        ids = sorted(node.id for node in nodes)
        if ids != list(range(len(ids))):
            raise ValueError("node ids must be exactly 0..N")
        for node in nodes:
            is_root = node.id == SUBSTATION_ID
            if is_root != (node.kind is NodeKind.SUBSTATION):
                raise ValueError("node 0, and only node 0, must be the substation")
        return sorted(nodes, key = lambda node: node.id)


    @root_validator(skip_on_failure = True)
    def _check_edges(cls, values):
        count = len(values["nodes"])
        for edge in values["edges"]:
            if edge.parent >= count or edge.child >= count:
                raise ValueError(
                    f"edge {edge.parent}->{edge.child} references an unknown node"
                )
        values["edges"] = sorted(values["edges"], key = lambda edge: edge.child)
        return values


    @property
    def size(self) -> int:
        """Number of non-substation nodes, N."""
        return len(self.nodes) - 1


    def kind_of(self, node_id: int) -> NodeKind:
        return self.nodes[node_id].kind


    def residences(self) -> List[int]:
        """Residence node ids in increasing order."""
        return [node.id for node in self.nodes if node.kind is NodeKind.RESIDENCE]


    def edge_by_child(self) -> Dict[int, Edge]:
        return {edge.child: edge for edge in self.edges}


class VoltageLimits(RevsModel):

    """Squared-voltage limits in p.u.^2."""

    alpha: float = 0.95 ** 2
    beta: float = 1.05 ** 2

    @root_validator(skip_on_failure = True)
    def _check_order(cls, values):
        if not 0.0 < values["alpha"] < 1.0 < values["beta"]:
            raise ValueError("voltage limits must satisfy 0 < alpha < 1 < beta")
        return values


    @classmethod
    def from_per_unit(cls, v_min: float = 0.95, v_max: float = 1.05):
        """Limits from per-unit voltage magnitudes."""
        return cls(alpha = v_min ** 2, beta = v_max ** 2)


class SensitivityMatrix(RevsModel):

    """Symmetric N x N matrix of common-path resistances (p.u.)."""

    matrix: np.ndarray

    @validator("matrix")
    def _check_square(cls, matrix):
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("sensitivity matrix must be square")
        return matrix


    @property
    def size(self) -> int:
        return self.matrix.shape[0]


class EdgeFlows(RevsModel):

    """Edge flows, indexed like 'DistributionNetwork.edges'.

    Arrays are 1-D for a single power vector, E x T for trajectories.
    """

    flow_kw: np.ndarray
    percent: np.ndarray


class LimitCheck(RevsModel):

    """Outcome of checking squared voltages against limits."""

    violated: np.ndarray
    worst: float

    @property
    def ok(self) -> bool:
        return not bool(self.violated.any())
