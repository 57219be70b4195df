import pytest

from revs.errors import DataError
from revs.models.enumerations import RunMode
from revs.scenarios import canonical_text, load_config, load_scenario

from tests.conftest import write_bundle


# --- Test data

# config additions, exception context
CONFIG_TESTS = [
    ( {}, None ),
    ( {"mode": "individual", "admm": {"kappa": 0.5}}, None ),
    ( {"adoption_fractions": [1.5]}, "adoption" ),
    ( {"adoption_fractions": []}, "adoption_fractions" ),
    ( {"mode": "central"}, "mode" ),
    ( {"unexpected": 1}, "unexpected" ),
    ( {"community": "com-1"}, "communities" ),
    ( {"limits": {"v_min": 1.2}}, "v_min" ),
]


# --- Test cases

@pytest.mark.parametrize("additions,error", CONFIG_TESTS)
def test_load_config(additions, error, tmp_path):
    path = write_bundle(tmp_path, **additions)
    if error is None:
        config = load_config(path)
        assert config.network == tmp_path / "network.csv"
        assert config.seeds == [1]
    else:
        with pytest.raises(DataError, match = error):
            load_config(path)


def test_load_config_overrides(tmp_path):
    path = write_bundle(tmp_path)
    config = load_config(path, mode = "distributed", adoption_fractions = [0.2, 0.4], seeds = None)
    assert config.mode is RunMode.DISTRIBUTED
    assert config.adoption_fractions == [0.2, 0.4]
    assert config.seeds == [1]


def test_load_config_missing(tmp_path):
    with pytest.raises(DataError, match = "absent.yaml"):
        load_config(tmp_path / "absent.yaml")


def test_load_config_bad_yaml(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text("network: [unclosed\n")
    with pytest.raises(DataError, match = "cannot parse"):
        load_config(path)


def test_load_config_not_mapping(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text("- network.csv\n")
    with pytest.raises(DataError, match = "mapping"):
        load_config(path)


def test_canonical_text_ignores_output(tmp_path):
    first = load_config(write_bundle(tmp_path / "a", output = "one"))
    second = load_config(write_bundle(tmp_path / "a", output = "two"))
    assert canonical_text(first) == canonical_text(second)
    third = load_config(write_bundle(tmp_path / "a", seeds = [2]))
    assert canonical_text(third) != canonical_text(first)


def test_load_scenario(tmp_path):
    config = load_config(write_bundle(tmp_path))
    scenario = load_scenario(config)
    assert scenario.community == [2, 3, 4]
    assert scenario.adoption_fraction == 0.5
    assert scenario.seeds == [1]
    assert (scenario.ev.window_start, scenario.ev.window_end) == (0, 12)
    # Horizon starts at 16:00, the cheapest rate from 00:00 on.
    assert scenario.tariff.rates[0] == 0.21436
    assert scenario.tariff.rates[8] == 0.07866
    assert scenario.profiles[1].load == [1.5] * 24


def test_load_scenario_overrides(tmp_path):
    config = load_config(write_bundle(tmp_path))
    scenario = load_scenario(config, adoption_fraction = 1.0, seeds = [4, 5])
    assert scenario.adoption_fraction == 1.0
    assert scenario.seeds == [4, 5]


def test_load_scenario_community(tmp_path):
    (tmp_path / "communities.csv").write_text("community,node_id\na,2\na,3\nb,4\n")
    path = write_bundle(tmp_path, communities = "communities.csv", community = "a")
    assert load_scenario(load_config(path)).community == [2, 3]


def test_load_scenario_unknown_community(tmp_path):
    (tmp_path / "communities.csv").write_text("community,node_id\na,2\n")
    path = write_bundle(tmp_path, communities = "communities.csv", community = "b")
    with pytest.raises(DataError, match = "no community named 'b'"):
        load_scenario(load_config(path))


def test_load_scenario_without_seeds(tmp_path):
    config = load_config(write_bundle(tmp_path, seeds = []))
    with pytest.raises(DataError, match = "invalid scenario"):
        load_scenario(config)


def test_load_scenario_bad_window(tmp_path):
    # A 20:00-06:00 window opens before a horizon starting at 22:00.
    path = write_bundle(tmp_path, horizon_start_hour = 22, ev = {"start_hour": 20, "end_hour": 6})
    with pytest.raises(DataError, match = "contiguous"):
        load_scenario(load_config(path))
