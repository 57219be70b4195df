from .io import read_network, write_network
from .model import (
    build_sensitivity,
    check_limits,
    edge_flows,
    stack_injections,
    to_per_unit,
    voltages,
)
from .topology import check_tree, tree_index
