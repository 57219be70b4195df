import numpy as np
import pytest

from revs.errors import SolverError
from revs.models.coordination import (
    AdmmTrace,
    CostDeviation,
    IterationRecord,
    OperatorMessage,
    OperatorProblem,
)
from revs.models.enumerations import NodeKind, RunMode, VoltageBand
from revs.models.grid import DistributionNetwork, Edge, VoltageLimits
from revs.models.residence import BaseLoadProfile, ChargeSchedule, EvSpec, Tariff
from revs.models.scenario import EvDefaults, GeneratorParams, ViolationBands

from tests.conftest import Raises


# --- Test data

_SUBSTATION = {"id": 0, "kind": NodeKind.SUBSTATION}
_HOME = {"id": 1, "kind": NodeKind.RESIDENCE}
_EDGE = {"parent": 0, "child": 1, "resistance": 0.01, "capacity": 10.0}

# dict, exception context
NETWORK_TESTS = [
    (
        {"nodes": [_SUBSTATION, _HOME], "edges": [_EDGE]},
        Raises.NONE
    ),
    (
        {"nodes": [_SUBSTATION, _HOME]},
        Raises.MISSING
    ),
    # Node ids must be 0..N
    (
        {"nodes": [_SUBSTATION, {"id": 2, "kind": NodeKind.RESIDENCE}], "edges": []},
        Raises.INVALID
    ),
    # Node 0 must be the substation
    (
        {"nodes": [{"id": 0, "kind": NodeKind.RESIDENCE}, _HOME], "edges": []},
        Raises.INVALID
    ),
    (
        {"nodes": [_SUBSTATION, {"id": 1, "kind": NodeKind.SUBSTATION}], "edges": []},
        Raises.INVALID
    ),
    # Edge to an unknown node
    (
        {"nodes": [_SUBSTATION, _HOME], "edges": [{**_EDGE, "child": 5}]},
        Raises.INVALID
    ),
    (
        {"nodes": [_SUBSTATION, _HOME], "edges": [{**_EDGE, "resistance": -0.01}]},
        Raises.INVALID
    ),
    (
        {"nodes": [_SUBSTATION, _HOME], "edges": [{**_EDGE, "capacity": 0.0}]},
        Raises.INVALID
    ),
    (
        {"nodes": [_SUBSTATION, _HOME], "edges": [_EDGE], "base_power": 0.0},
        Raises.INVALID
    ),
    (
        {"nodes": [_SUBSTATION, _HOME], "edges": [_EDGE], "voltage": 1.0},
        Raises.EXTRA
    ),
]


LIMITS_TESTS = [
    ( {}, Raises.NONE ),
    ( {"alpha": 0.81, "beta": 1.21}, Raises.NONE ),
    ( {"alpha": 1.0}, Raises.INVALID ),
    ( {"alpha": 0.0}, Raises.INVALID ),
    ( {"beta": 0.99}, Raises.INVALID ),
]


EV_SPEC_TESTS = [
    ( {"window_start": 0, "window_end": 12}, Raises.NONE ),
    ( {"window_start": 5, "window_end": 5}, Raises.NONE ),
    ( {"window_start": 0}, Raises.MISSING ),
    ( {"window_start": 6, "window_end": 5}, Raises.INVALID ),
    ( {"window_start": 0, "window_end": 12, "soc_init": 0.9, "soc_final": 0.5}, Raises.INVALID ),
    ( {"window_start": 0, "window_end": 12, "soc_final": 1.2}, Raises.INVALID ),
    ( {"window_start": 0, "window_end": 12, "capacity_kwh": 0.0}, Raises.INVALID ),
    ( {"window_start": 0, "window_end": 12, "charger_kw": -1.0}, Raises.INVALID ),
]


TARIFF_TESTS = [
    ( {"rates": [0.1, 0.2]}, Raises.NONE ),
    ( {"rates": []}, Raises.INVALID ),
    ( {"rates": [0.1, 0.0]}, Raises.INVALID ),
    ( {}, Raises.MISSING ),
]


PROFILE_TESTS = [
    ( {"node": 1, "load": [0.0, 1.5]}, Raises.NONE ),
    ( {"node": 0, "load": [1.0]}, Raises.INVALID ),
    ( {"node": 1, "load": [1.0, -0.1]}, Raises.INVALID ),
]


# horizon start, EvDefaults options, (window_start, window_end) or None if invalid
EV_WINDOW_TESTS = [
    ( 16, {}, (0, 12) ),
    ( 16, {"include_end_hour": True}, (0, 13) ),
    ( 16, {"start_hour": 18, "end_hour": 7}, (2, 14) ),
    ( 0, {"start_hour": 1, "end_hour": 5}, (1, 4) ),
    # 16:00-05:00 wraps past the end of a horizon starting at midnight
    ( 0, {}, None ),
]


# --- Test cases

@pytest.mark.parametrize("data,raises", NETWORK_TESTS)
def test_network_init(data, raises):
    raises, args, opts = raises
    with raises(*args, **opts) as ex:
        network = DistributionNetwork(**data)
        assert network.size == len(data["nodes"]) - 1


def test_network_orders_nodes_and_edges():
    network = DistributionNetwork(
        nodes = [
            {"id": 2, "kind": NodeKind.RESIDENCE},
            _SUBSTATION,
            {"id": 1, "kind": NodeKind.TRANSFORMER},
        ],
        edges = [
            {"parent": 1, "child": 2, "resistance": 0.02, "capacity": 5.0},
            _EDGE,
        ],
    )
    assert [node.id for node in network.nodes] == [0, 1, 2]
    assert [edge.child for edge in network.edges] == [1, 2]
    assert network.residences() == [2]
    assert network.kind_of(1) is NodeKind.TRANSFORMER
    assert network.edge_by_child()[2].resistance == 0.02


@pytest.mark.parametrize("data,raises", LIMITS_TESTS)
def test_voltage_limits(data, raises):
    raises, args, opts = raises
    with raises(*args, **opts) as ex:
        VoltageLimits(**data)


def test_voltage_limits_from_per_unit():
    limits = VoltageLimits.from_per_unit(0.9, 1.1)
    assert limits.alpha == pytest.approx(0.81)
    assert limits.beta == pytest.approx(1.21)


@pytest.mark.parametrize("data,raises", EV_SPEC_TESTS)
def test_ev_spec(data, raises):
    raises, args, opts = raises
    with raises(*args, **opts) as ex:
        EvSpec(**data)


def test_ev_spec_window():
    spec = EvSpec(window_start = 3, window_end = 7)
    assert list(spec.window()) == [3, 4, 5, 6, 7]
    assert spec.window_length == 5
    assert spec.soc_per_interval == pytest.approx(0.24)


@pytest.mark.parametrize("data,raises", TARIFF_TESTS)
def test_tariff(data, raises):
    raises, args, opts = raises
    with raises(*args, **opts) as ex:
        Tariff(**data)


def test_tariff_rotated():
    tariff = Tariff(rates = [1.0, 2.0, 3.0, 4.0])
    assert tariff.rotated(1).rates == [2.0, 3.0, 4.0, 1.0]
    assert tariff.rotated(4).rates == tariff.rates


@pytest.mark.parametrize("data,raises", PROFILE_TESTS)
def test_base_load_profile(data, raises):
    raises, args, opts = raises
    with raises(*args, **opts) as ex:
        BaseLoadProfile(**data)


def test_base_load_profile_rotated():
    profile = BaseLoadProfile(node = 4, load = [0.0, 1.0, 2.0])
    rotated = profile.rotated(2)
    assert rotated.node == 4
    assert rotated.load == [2.0, 0.0, 1.0]


def test_charge_schedule_lengths():
    schedule = ChargeSchedule(z = np.array([0, 1]), soc = np.array([0.2, 0.2, 0.44]))
    assert schedule.on_count == 1
    with pytest.raises(ValueError):
        ChargeSchedule(z = np.array([0, 1]), soc = np.array([0.2, 0.2]))


@pytest.mark.parametrize("horizon,options,expected", EV_WINDOW_TESTS)
def test_ev_defaults_window(horizon, options, expected):
    defaults = EvDefaults(**options)
    if expected is None:
        with pytest.raises(ValueError):
            defaults.to_spec(horizon)
    else:
        spec = defaults.to_spec(horizon)
        assert (spec.window_start, spec.window_end) == expected
        assert spec.capacity_kwh == defaults.capacity_kwh


def test_generator_params_ranges():
    GeneratorParams(seed = 1, trunk_resistance = (0.01, 0.01))
    with pytest.raises(ValueError):
        GeneratorParams(seed = 1, trunk_resistance = (0.02, 0.01))
    with pytest.raises(ValueError):
        GeneratorParams(seed = 1, load_scale = (-0.1, 1.0))
    with pytest.raises(ValueError, match = "value_error.missing"):
        GeneratorParams()


def test_operator_problem_shapes():
    OperatorProblem(
        sensitivity = np.ones((3, 2)),
        base_power = 100.0,
        kappa = 1.0,
        linear_terms = np.zeros((2, 4)),
        warm_duals = np.zeros((6, 4)),
    )
    with pytest.raises(ValueError):
        OperatorProblem(
            sensitivity = np.ones((3, 2)),
            base_power = 100.0,
            kappa = 1.0,
            linear_terms = np.zeros((3, 4)),
        )
    with pytest.raises(ValueError):
        OperatorProblem(
            sensitivity = np.ones((3, 2)),
            base_power = 100.0,
            kappa = 1.0,
            linear_terms = np.zeros((2, 4)),
            warm_duals = np.zeros((3, 4)),
        )


def test_run_mode_modes():
    assert RunMode.BOTH.modes() == (RunMode.INDIVIDUAL, RunMode.DISTRIBUTED)
    assert RunMode.DISTRIBUTED.modes() == (RunMode.DISTRIBUTED,)


def test_violation_bands_below():
    bands = ViolationBands(
        counts = {
            VoltageBand.BELOW_092: [1, 0],
            VoltageBand.FROM_092_TO_095: [2, 0],
            VoltageBand.FROM_095_TO_098: [0, 1],
            VoltageBand.NOMINAL: [1, 3],
        },
        residences = 4,
    )
    assert bands.intervals == 2
    assert bands.below(VoltageBand.FROM_095_TO_098).tolist() == [3, 0]
    assert bands.below(VoltageBand.BELOW_092).tolist() == [0, 0]


def test_trace_frame():
    records = [
        IterationRecord(
            iteration = iteration,
            primal_residual = 1.0 / iteration,
            dual_residual = 0.5 / iteration,
            total_cost = 10.0,
            objectives = {1: 5.0},
            payload_to_operator = 24,
            payload_to_residences = 24,
            inner_iterations = 0,
        )
        for iteration in (1, 2)
    ]
    trace = AdmmTrace(records = records)
    frame = trace.to_frame()
    assert list(frame.columns) == ["iter", "primal_residual", "dual_residual", "total_cost"]
    assert frame["iter"].tolist() == [1, 2]
    assert trace.iterations == 2
    assert trace.primal_residuals().tolist() == [1.0, 0.5]


def test_message_payload():
    message = OperatorMessage(iteration = 1, node = 3, p_tilde = [0.0] * 24)
    assert message.payload_size == 24


def test_cost_deviation_share():
    deviation = CostDeviation(deviation = {1: 1.0, 2: 7.0}, above_5 = [2], above_20 = [])
    assert deviation.within_5_share == 0.5
    assert CostDeviation(deviation = {}, above_5 = [], above_20 = []).within_5_share == 1.0


def test_solver_error_text():
    error = SolverError("stopped early", residuals = {"primal": 0.5})
    assert str(error) == "stopped early (primal=5.000e-01)"
    assert error.residuals == {"primal": 0.5}
    assert str(SolverError("stopped early")) == "stopped early"
