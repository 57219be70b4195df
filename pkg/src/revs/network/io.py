"""Network files.

One edge per row with a header::

    # base_power_kw: 100
    parent_id,child_id,kind_of_child,resistance_pu,capacity_kw
    0,1,auxiliary,0.01,120.0

Node 0 is the implicit substation. The optional leading comment sets the
power base; without it the default base (100 kW) applies.
"""

import logging
import re

import pandas as pd
import pydantic

from revs.errors import DataError
from revs.models.enumerations import NodeKind
from revs.models.grid import SUBSTATION_ID, DistributionNetwork, Edge, Node
from revs.utils.files import read_table, read_text, require_columns, source_name


logger = logging.getLogger(__name__)


COLUMNS = ["parent_id", "child_id", "kind_of_child", "resistance_pu", "capacity_kw"]

_BASE_POWER = re.compile(r"^\s*#\s*base_power_kw\s*[:=]\s*([0-9.eE+-]+)\s*$", re.MULTILINE)

_CHILD_KINDS = {
    kind.value: kind
    for kind in (NodeKind.RESIDENCE, NodeKind.TRANSFORMER, NodeKind.AUXILIARY)
}


def read_network(source, base_power = None) -> DistributionNetwork:
    """Read a network file.

    The result is not checked for being a tree; see 'check_tree'.

    Raises:
        DataError: Missing file, unparsable rows, unknown node kinds, or
            values that violate the network model.
    """
    name = source_name(source)
    text = read_text(source)
    table = read_table(text, name)
    require_columns(table, COLUMNS, name)
    if table[COLUMNS].isna().any().any():
        raise DataError(f"{name} has empty fields")
    if base_power is None:
        match = _BASE_POWER.search(text)
        base_power = float(match.group(1)) if match else 100.0
    nodes = {SUBSTATION_ID: Node(id = SUBSTATION_ID, kind = NodeKind.SUBSTATION)}
    edges = []
    try:
        for row in table.itertuples(index = False):
            kind = _CHILD_KINDS.get(str(row.kind_of_child).strip().lower())
            if kind is None:
                raise DataError(f"{name}: unknown node kind '{row.kind_of_child}'")
            child = int(row.child_id)
            if child in nodes:
                raise DataError(f"{name}: node {child} appears as a child twice")
            nodes[child] = Node(id = child, kind = kind)
            edges.append(Edge(
                parent = int(row.parent_id),
                child = child,
                resistance = float(row.resistance_pu),
                capacity = float(row.capacity_kw),
            ))
        network = DistributionNetwork(
            nodes = list(nodes.values()),
            edges = edges,
            base_power = base_power,
        )
    except (pydantic.ValidationError, ValueError) as ex:
        raise DataError(f"{name}: {ex}") from ex
    logger.info("Read network %s: %d nodes, %d edges", name, len(network.nodes), len(edges))
    return network


def write_network(network: DistributionNetwork, path):
    kinds = {node.id: node.kind for node in network.nodes}
    table = pd.DataFrame(
        [
            (edge.parent, edge.child, kinds[edge.child].value, edge.resistance, edge.capacity)
            for edge in network.edges
        ],
        columns = COLUMNS,
    )
    with open(path, "w") as file:
        file.write(f"# base_power_kw: {network.base_power:g}\n")
        table.to_csv(file, index = False, float_format = "%.10g")
