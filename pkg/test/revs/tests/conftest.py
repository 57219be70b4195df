from contextlib import nullcontext as raises_none

import importlib_resources
import numpy as np
import yaml

from pytest import raises
from pydantic import ValidationError

from revs.errors import (
    DataError,
    DimensionError,
    InfeasibleScheduleError,
    InstanceTooLargeError,
    StructuralError,
)
from revs.models.enumerations import NodeKind
from revs.models.grid import DistributionNetwork, Edge, Node


# --- Exception contexts

class Raises:

    """Exception contexts used in PyTest tests.

    Abstracts out whether test cases raise exceptions or not.
    """

    # No error
    NONE = (raises_none, (), {})
    # Expected fields in model missing from value
    MISSING = (raises, (ValidationError,), {"match": "value_error.missing"})
    # Unexpected fields in value, and additional properties forbidden.
    EXTRA = (raises, (ValidationError,), {"match": "value_error.extra"})
    # Any other model validation failure
    INVALID = (raises, (ValidationError,), {})
    # Package errors
    DATA = (raises, (DataError,), {})
    STRUCTURE = (raises, (StructuralError,), {})
    INFEASIBLE = (raises, (InfeasibleScheduleError,), {})
    DIMENSION = (raises, (DimensionError,), {})
    TOO_LARGE = (raises, (InstanceTooLargeError,), {})


def data_file(path, name):
    """Path of a file under 'tests/data/<path>'."""
    path = path.replace("/", ".")
    package = f"tests.data.{path}"
    return importlib_resources.files(package).joinpath(name)


def load_test_data(path, name):
    """Load test data"""
    return data_file(path, name).read_text()


# --- Network builders

def make_network(edges, residences = (), base_power = 100.0, capacity = 100.0):
    """Network from (parent, child, resistance) triples.

    Children listed in 'residences' are residences, the rest auxiliary.
    """
    residences = set(residences)
    nodes = [Node(id = 0, kind = NodeKind.SUBSTATION)]
    for _, child, _ in sorted(edges, key = lambda edge: edge[1]):
        kind = NodeKind.RESIDENCE if child in residences else NodeKind.AUXILIARY
        nodes.append(Node(id = child, kind = kind))
    return DistributionNetwork(
        nodes = nodes,
        edges = [
            Edge(parent = parent, child = child, resistance = r, capacity = capacity)
            for parent, child, r in edges
        ],
        base_power = base_power,
    )


def random_network(rng, size, residence_share = 0.5, resistance = (0.001, 0.02)):
    """Random tree on nodes 0..size, every node's parent numbered below it.

    The leaves are always residences; other nodes are with 'residence_share'.
    """
    parents = [int(rng.integers(0, child)) for child in range(1, size + 1)]
    inner = set(parents)
    residences = [
        child for child in range(1, size + 1)
        if child not in inner or rng.random() < residence_share
    ]
    edges = [
        (parent, child, float(rng.uniform(*resistance)))
        for child, parent in zip(range(1, size + 1), parents)
    ]
    return make_network(edges, residences)


def recursive_voltages(network, p):
    """Squared voltages by walking down from the substation, one edge at a time.

    v_child = v_parent - 2 r_e P_e with P_e the total load below the edge.
    """
    p = np.asarray(p, dtype = float)
    children = {}
    for edge in network.edges:
        children.setdefault(edge.parent, []).append(edge)
    order, pending = [], [0]
    while pending:
        node = pending.pop()
        order.append(node)
        pending.extend(edge.child for edge in children.get(node, []))
    edges = network.edge_by_child()
    below = np.zeros(network.size + 1)
    below[1:] = p
    for node in reversed(order[1:]):
        below[edges[node].parent] += below[node]
    v = np.ones(network.size + 1)
    for node in order[1:]:
        edge = edges[node]
        v[node] = v[edge.parent] - 2.0 * edge.resistance * below[node]
    return v[1:]


# --- Scenario bundles

def write_bundle(directory, **config):
    """Star network, its profiles and a scenario.yaml in 'directory'.

    Keys in 'config' are added to, or replace, the scenario config.
    Returns the path of scenario.yaml.
    """
    directory.mkdir(parents = True, exist_ok = True)
    (directory / "network.csv").write_text(load_test_data("networks", "star.csv"))
    (directory / "profiles.csv").write_text(load_test_data("profiles", "star.csv"))
    content = {
        "network": "network.csv",
        "profiles": "profiles.csv",
        "seeds": [1],
        "adoption_fractions": [0.5],
        **config,
    }
    path = directory / "scenario.yaml"
    path.write_text(yaml.safe_dump(content, sort_keys = True))
    return path
