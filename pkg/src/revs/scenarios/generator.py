"""Synthetic radial feeders with base load profiles.

Each feeder hangs a chain of auxiliary trunk nodes off the substation.
Transformers are spread evenly along the trunk and every transformer serves
up to 'homes_per_transformer' residences. All randomness comes from one
generator seeded with 'params.seed', drawn in node order.
"""

import logging
import math
from typing import Dict, List

import numpy as np
import pandas as pd

from revs.errors import DataError
from revs.models.enumerations import NodeKind
from revs.models.grid import SUBSTATION_ID, DistributionNetwork, Edge, Node
from revs.models.residence import BaseLoadProfile
from revs.models.scenario import GeneratedScenario, GeneratorParams
from revs.network import edge_flows, stack_injections
from revs.utils.files import read_table, read_text, require_columns, source_name


logger = logging.getLogger(__name__)


_MIN_LOAD_KW = 0.05


class _Builder:

    def __init__(self, params: GeneratorParams):
        self.params = params
        self.rng = np.random.default_rng(params.seed)
        self.nodes = [Node(id = SUBSTATION_ID, kind = NodeKind.SUBSTATION)]
        # (parent, child, resistance)
        self.links = []


    def add(self, parent, kind, bounds) -> int:
        node = len(self.nodes)
        self.nodes.append(Node(id = node, kind = kind))
        self.links.append((parent, node, float(self.rng.uniform(*bounds))))
        return node


    def feeder(self) -> List[int]:
        """Build one feeder, returning its residences."""
        params = self.params
        trunk, parent = [], SUBSTATION_ID
        for _ in range(params.depth):
            parent = self.add(parent, NodeKind.AUXILIARY, params.trunk_resistance)
            trunk.append(parent)
        transformers = math.ceil(params.homes_per_feeder / params.homes_per_transformer)
        homes, remaining = [], params.homes_per_feeder
        for index in range(transformers):
            position = math.ceil((index + 1) * params.depth / transformers) - 1
            transformer = self.add(
                trunk[position], NodeKind.TRANSFORMER, params.transformer_resistance,
            )
            for _ in range(min(params.homes_per_transformer, remaining)):
                homes.append(self.add(transformer, NodeKind.RESIDENCE, params.service_resistance))
            remaining -= params.homes_per_transformer
        return homes


    def profile(self, node) -> BaseLoadProfile:
        params = self.params
        template = np.asarray(params.template_kw)
        scale = self.rng.uniform(*params.load_scale)
        noise = 1.0 + params.noise * self.rng.standard_normal(len(template))
        load = np.maximum(template * scale * noise, _MIN_LOAD_KW)
        return BaseLoadProfile(node = node, load = load.round(6).tolist())


    def network(self, capacities) -> DistributionNetwork:
        edges = [
            Edge(parent = parent, child = child, resistance = resistance, capacity = capacity)
            for (parent, child, resistance), capacity in zip(self.links, capacities)
        ]
        return DistributionNetwork(
            nodes = self.nodes, edges = edges, base_power = self.params.base_power,
        )


def generate_network(params: GeneratorParams) -> GeneratedScenario:
    """Random feeders, their base load profiles and one community per feeder.

    Line capacities are 'headroom' times the peak base-load flow of each
    edge, floored at 'min_capacity_kw'.
    """
    builder = _Builder(params)
    communities = {}
    for feeder in range(params.feeders):
        communities[f"com-{feeder + 1}"] = builder.feeder()
    residences = [node for homes in communities.values() for node in homes]
    profiles = [builder.profile(node) for node in residences]

    # Flows do not depend on capacities, so size them from a provisional network.
    provisional = builder.network([1.0] * len(builder.links))
    intervals = len(params.template_kw)
    base = stack_injections(
        provisional, {profile.node: profile.as_array() for profile in profiles}, intervals,
    )
    peak = edge_flows(provisional, base / params.base_power).flow_kw.max(axis = 1)
    capacities = np.maximum(params.headroom * peak, params.min_capacity_kw)
    if (capacities <= 0.0).any():
        raise DataError("some edges carry no load; set min_capacity_kw above 0")
    network = builder.network(capacities.round(3).tolist())
    logger.info(
        "Generated %d feeders, %d nodes, %d residences (seed %d)",
        params.feeders, network.size + 1, len(residences), params.seed,
    )
    return GeneratedScenario(network = network, profiles = profiles, communities = communities)


# --- Communities

def write_communities(communities: Dict[str, List[int]], path):
    rows = [(name, node) for name, nodes in communities.items() for node in nodes]
    pd.DataFrame(rows, columns = ["community", "node_id"]).to_csv(path, index = False)


def read_communities(source, network: DistributionNetwork) -> Dict[str, List[int]]:
    """Read 'community,node_id' rows.

    Raises:
        DataError: Unknown or non-residence nodes, empty fields.
    """
    name = source_name(source)
    table = read_table(read_text(source), name, dtype = {"community": str})
    require_columns(table, ["community", "node_id"], name)
    if table[["community", "node_id"]].isna().any().any():
        raise DataError(f"{name} has empty fields")
    residences = set(network.residences())
    communities: Dict[str, List[int]] = {}
    for row in table.itertuples(index = False):
        node = int(row.node_id)
        if node not in residences:
            raise DataError(f"{name}: node {node} is not a residence")
        communities.setdefault(str(row.community).strip(), []).append(node)
    return {key: sorted(set(nodes)) for key, nodes in communities.items()}
