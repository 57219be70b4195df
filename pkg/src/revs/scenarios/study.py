"""Distributed versus centralized cost on desk-scale instances."""

import logging
from typing import List

import pandas as pd

from revs.coordination import centralized_oracle, cost_deviation, run_admm
from revs.errors import SolverError
from revs.models.coordination import AdmmConfig
from revs.models.grid import VoltageLimits
from revs.models.scenario import HOURS_PER_DAY, EvDefaults, GeneratorParams
from revs.network import build_sensitivity
from revs.residence import load_tariff

from .generator import generate_network
from .metrics import sample_adopters


logger = logging.getLogger(__name__)


# Two homes behind a long, resistive line: one EV charging at night is fine,
# two at once pull the far end below the band.
DESK_PARAMS = dict(
    feeders = 1,
    homes_per_feeder = 2,
    homes_per_transformer = 2,
    depth = 1,
    trunk_resistance = (0.25, 0.3),
    transformer_resistance = (0.25, 0.3),
    service_resistance = (0.01, 0.02),
    load_scale = (0.9, 1.1),
    noise = 0.05,
)

STUDY_COLUMNS = [
    "instance", "seed", "node", "distributed_usd", "centralized_usd", "deviation_pct",
    "converged", "iterations",
]


def run_deviation_study(
    instances: int,
    seed: int,
    adopters: int = 2,
    admm: AdmmConfig = AdmmConfig(),
    ev: EvDefaults = EvDefaults(),
    horizon_start_hour: int = 16,
    limits: VoltageLimits = VoltageLimits(),
    **params,
) -> pd.DataFrame:
    """Per-adopter cost deviation of ADMM from the centralized optimum.

    Instance k is generated with seed 'seed + k'. Instances without any
    voltage-feasible joint schedule are skipped.

    Arguments:
        params: Overrides of the desk-scale generator parameters.

    Raises:
        InstanceTooLargeError: Too many joint schedules to enumerate.
    """
    tariff = load_tariff(None, HOURS_PER_DAY).rotated(horizon_start_hour)
    spec = ev.to_spec(horizon_start_hour, HOURS_PER_DAY)
    rows: List[tuple] = []
    for instance in range(instances):
        instance_seed = seed + instance
        generated = generate_network(
            GeneratorParams(**{**DESK_PARAMS, **params, "seed": instance_seed})
        )
        network = generated.network
        sensitivity = build_sensitivity(network)
        profiles = [profile.rotated(horizon_start_hour) for profile in generated.profiles]
        residences = network.residences()
        fraction = min(1.0, adopters / len(residences))
        chosen = sample_adopters(residences, fraction, instance_seed)
        specs = {node: spec for node in chosen}
        centralized = centralized_oracle(
            network, profiles, specs, tariff, limits = limits, sensitivity = sensitivity,
        )
        if not centralized.feasible:
            logger.info("Instance %d has no feasible joint schedule, skipped", instance)
            continue
        try:
            consensus = run_admm(
                network, profiles, specs, tariff,
                config = admm, limits = limits, sensitivity = sensitivity,
            )
        except SolverError as ex:
            logger.warning("Instance %d: %s", instance, ex)
            continue
        deviation = cost_deviation(consensus, centralized, chosen)
        for node in chosen:
            rows.append((
                instance, instance_seed, node,
                consensus.costs[node], centralized.costs[node], deviation.deviation[node],
                consensus.converged, consensus.iterations,
            ))
    return pd.DataFrame(rows, columns = STUDY_COLUMNS)
