"""Scenario config files.

A config is a YAML mapping validated into 'ScenarioConfig'. Relative paths
are resolved against the directory of the config file.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Sequence

import pydantic
import yaml

from revs.errors import DataError
from revs.models.scenario import HOURS_PER_DAY, Scenario, ScenarioConfig
from revs.network import check_tree, read_network
from revs.residence import load_profiles, load_tariff
from revs.utils.files import read_text

from .generator import read_communities


logger = logging.getLogger(__name__)


_PATH_KEYS = ("network", "profiles", "tariff", "communities", "output")


def load_config(path, **overrides) -> ScenarioConfig:
    """Read and validate a scenario config, applying non-None overrides.

    Raises:
        DataError: Missing file, bad YAML, or invalid values.
    """
    path = Path(path)
    try:
        content = yaml.safe_load(read_text(path))
    except yaml.YAMLError as ex:
        raise DataError(f"cannot parse {path}: {ex}") from ex
    if not isinstance(content, dict):
        raise DataError(f"{path}: expected a mapping of config keys")
    content.update({key: value for key, value in overrides.items() if value is not None})
    for key in _PATH_KEYS:
        if content.get(key) is not None:
            content[key] = path.parent / Path(content[key])
    try:
        config = ScenarioConfig(**content)
    except pydantic.ValidationError as ex:
        raise DataError(f"{path}: {ex}") from ex
    logger.info("Read scenario config %s", path)
    return config


def canonical_text(config: ScenarioConfig) -> str:
    """Stable text form of a config, used to derive run IDs."""
    return json.dumps(json.loads(config.json(exclude = {"output"})), sort_keys = True)


def load_scenario(
    config: ScenarioConfig,
    adoption_fraction: Optional[float] = None,
    seeds: Optional[Sequence[int]] = None,
) -> Scenario:
    """Load the files a config names into a scenario on the simulation horizon.

    Profiles and tariff are rotated so that interval 0 starts at
    'horizon_start_hour'.

    Raises:
        DataError: Unreadable or inconsistent inputs.
        StructuralError: The network is not a tree.
    """
    network = read_network(config.network)
    check_tree(network)
    start = config.horizon_start_hour
    profiles = [
        profile.rotated(start)
        for profile in load_profiles(config.profiles, network, HOURS_PER_DAY)
    ]
    tariff = load_tariff(config.tariff, HOURS_PER_DAY).rotated(start)
    if config.communities is not None:
        communities = read_communities(config.communities, network)
        if config.community is None:
            community = sorted({node for nodes in communities.values() for node in nodes})
        elif config.community in communities:
            community = communities[config.community]
        else:
            raise DataError(
                f"{config.communities}: no community named '{config.community}'"
            )
    else:
        community = network.residences()
    try:
        ev = config.ev.to_spec(start, HOURS_PER_DAY)
        return Scenario(
            network = network,
            profiles = profiles,
            tariff = tariff,
            community = community,
            adoption_fraction = (
                config.adoption_fractions[0] if adoption_fraction is None else adoption_fraction
            ),
            seeds = list(config.seeds if seeds is None else seeds),
            ev = ev,
            mode = config.mode,
            admm = config.admm,
            limits = config.limits.to_limits(),
            horizon_start_hour = start,
        )
    except (ValueError, pydantic.ValidationError) as ex:
        raise DataError(f"invalid scenario: {ex}") from ex
