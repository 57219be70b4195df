"""Tree structure of a distribution network."""

import networkx as nx
import numpy as np

from revs.errors import StructuralError
from revs.models.base import RevsModel
from revs.models.grid import SUBSTATION_ID, DistributionNetwork


class TreeIndex(RevsModel):

    """Arrays describing a validated tree, all indexed by node id.

    'order' lists non-substation nodes so that every parent precedes its
    children. 'resistance[i]' is the resistance of the edge into node i.
    """

    parent: np.ndarray
    order: np.ndarray
    resistance: np.ndarray


def to_graph(network: DistributionNetwork) -> nx.DiGraph:
    """Directed graph with edges from parent to child."""
    graph = nx.DiGraph()
    graph.add_nodes_from(node.id for node in network.nodes)
    for edge in network.edges:
        graph.add_edge(edge.parent, edge.child, resistance = edge.resistance)
    return graph


def check_tree(network: DistributionNetwork):
    """Raise 'StructuralError' unless the edges form a tree rooted at node 0."""
    if len(network.edges) != network.size:
        raise StructuralError(
            f"a tree on {network.size + 1} nodes has {network.size} edges, "
            f"found {len(network.edges)}"
        )
    children = [edge.child for edge in network.edges]
    if len(set(children)) != len(children):
        raise StructuralError("some node has more than one parent")
    if SUBSTATION_ID in children:
        raise StructuralError("the substation cannot have a parent")
    graph = to_graph(network)
    if not nx.is_arborescence(graph):
        cycle = _find_cycle(graph)
        if cycle:
            raise StructuralError(f"edges contain a cycle through nodes {cycle}")
        raise StructuralError("network is not connected to the substation")


def _find_cycle(graph):
    try:
        return sorted({u for u, _ in nx.find_cycle(graph)})
    except nx.NetworkXNoCycle:
        return []


def tree_index(network: DistributionNetwork) -> TreeIndex:
    """Validate the tree and return its traversal arrays."""
    check_tree(network)
    count = network.size + 1
    parent = np.full(count, -1, dtype = int)
    resistance = np.zeros(count)
    for edge in network.edges:
        parent[edge.child] = edge.parent
        resistance[edge.child] = edge.resistance
    order = [child for _, child in nx.bfs_edges(to_graph(network), SUBSTATION_ID)]
    return TreeIndex(
        parent = parent,
        order = np.asarray(order, dtype = int),
        resistance = resistance,
    )
