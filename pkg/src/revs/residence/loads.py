"""Tariffs, base load profiles and the EV charging model."""

import logging
import math
import pkgutil
from typing import List, Tuple

import numpy as np
import pandas as pd
import pydantic

from revs.errors import DataError, InfeasibleScheduleError
from revs.models.enumerations import NodeKind
from revs.models.grid import DistributionNetwork
from revs.models.residence import BaseLoadProfile, ChargeSchedule, EvSpec, Tariff
from revs.utils.files import read_table, read_text, require_columns, source_name


logger = logging.getLogger(__name__)


DEFAULT_INTERVALS = 24

# Slack for floating point SOC arithmetic (0.2 + 3 * 0.24 is not exactly 0.92).
_SOC_TOLERANCE = 1e-9


# --- Tariffs

def load_tariff(source = None, intervals: int = DEFAULT_INTERVALS) -> Tariff:
    """Read a tariff in either of two layouts.

    - Per interval: columns 'hour,rate_usd_per_kwh', one row per interval.
    - Ranges: columns 'start_hour,end_hour,rate', end exclusive, covering
      0..intervals without gaps or overlaps.

    Without a source the packaged experiment tariff is read.

    Raises:
        DataError: Unknown layout, wrong length, or nonpositive rates.
    """
    if source is None:
        name = "default tariff"
        text = pkgutil.get_data("revs", "data/tariff_tou.csv").decode("utf-8")
    else:
        name = source_name(source)
        text = read_text(source)
    table = read_table(text, name)
    if {"start_hour", "end_hour", "rate"} <= set(table.columns):
        rates = _expand_ranges(table, intervals, name)
    elif {"hour", "rate_usd_per_kwh"} <= set(table.columns):
        rates = _hourly_rates(table, intervals, name)
    else:
        raise DataError(
            f"{name}: expected columns 'hour,rate_usd_per_kwh' "
            f"or 'start_hour,end_hour,rate'"
        )
    try:
        return Tariff(rates = rates)
    except pydantic.ValidationError as ex:
        raise DataError(f"{name}: {ex}") from ex


def _hourly_rates(table, intervals, name):
    if table.isna().any().any():
        raise DataError(f"{name} has empty fields")
    if len(table) != intervals:
        raise DataError(f"{name} has {len(table)} rows, expected {intervals}")
    hours = table["hour"].astype(int).tolist()
    if sorted(hours) != list(range(intervals)):
        raise DataError(f"{name}: hours must be exactly 0..{intervals - 1}")
    ordered = table.assign(hour = hours).sort_values("hour")
    return ordered["rate_usd_per_kwh"].astype(float).tolist()


def _expand_ranges(table, intervals, name):
    if table.isna().any().any():
        raise DataError(f"{name} has empty fields")
    rates = [None] * intervals
    for row in table.itertuples(index = False):
        start, end = int(row.start_hour), int(row.end_hour)
        if not 0 <= start < end <= intervals:
            raise DataError(f"{name}: bad range {start}-{end}")
        for hour in range(start, end):
            if rates[hour] is not None:
                raise DataError(f"{name}: hour {hour} is covered twice")
            rates[hour] = float(row.rate)
    missing = [hour for hour, rate in enumerate(rates) if rate is None]
    if missing:
        raise DataError(f"{name}: hours {missing} have no rate")
    return rates


# --- Base load profiles

def load_profiles(
    source,
    network: DistributionNetwork,
    intervals: int = DEFAULT_INTERVALS,
) -> List[BaseLoadProfile]:
    """Read 'node_id,h0,...,h{T-1}' rows, one per residence.

    Raises:
        DataError: Unknown or non-residence nodes, duplicated or missing
            residences, empty or negative loads.
    """
    name = source_name(source)
    table = read_table(read_text(source), name)
    hours = [f"h{hour}" for hour in range(intervals)]
    require_columns(table, ["node_id"] + hours, name)
    if table[["node_id"] + hours].isna().any().any():
        raise DataError(f"{name} has empty fields")
    profiles = {}
    for row in table.itertuples(index = False):
        node = int(getattr(row, "node_id"))
        if node < 0 or node > network.size:
            raise DataError(f"{name}: unknown node {node}")
        if network.kind_of(node) is not NodeKind.RESIDENCE:
            raise DataError(
                f"{name}: node {node} is a {network.kind_of(node).value}, not a residence"
            )
        if node in profiles:
            raise DataError(f"{name}: node {node} has more than one profile")
        load = [float(getattr(row, hour)) for hour in hours]
        try:
            profiles[node] = BaseLoadProfile(node = node, load = load)
        except pydantic.ValidationError as ex:
            raise DataError(f"{name}: node {node}: {ex}") from ex
    missing = sorted(set(network.residences()) - set(profiles))
    if missing:
        raise DataError(f"{name}: residences without a profile: {missing}")
    logger.info("Read %d base load profiles from %s", len(profiles), name)
    return [profiles[node] for node in sorted(profiles)]


def write_profiles(profiles: List[BaseLoadProfile], path):
    intervals = profiles[0].intervals if profiles else DEFAULT_INTERVALS
    header = ["node_id"] + [f"h{hour}" for hour in range(intervals)]
    table = pd.DataFrame([[profile.node, *profile.load] for profile in profiles], columns = header)
    table.to_csv(path, index = False, float_format = "%.6f")


# --- EV model

def charge_count_bounds(spec: EvSpec) -> Tuple[int, int]:
    """Bounds (n_min, n_max) on the number of on-intervals of any feasible schedule.

    n_max is also capped by the window length.
    """
    gain = spec.soc_per_interval
    n_min = math.ceil((spec.soc_final - spec.soc_init) / gain - _SOC_TOLERANCE)
    n_max = math.floor((1.0 - spec.soc_init) / gain + _SOC_TOLERANCE)
    return max(n_min, 0), min(n_max, spec.window_length)


def check_spec(spec: EvSpec, intervals: int):
    """Raise 'InfeasibleScheduleError' if no schedule can satisfy the spec."""
    if spec.window_end >= intervals:
        raise InfeasibleScheduleError(
            f"charging window ends at interval {spec.window_end}, "
            f"horizon has {intervals} intervals"
        )
    n_min, n_max = charge_count_bounds(spec)
    if n_min > n_max:
        raise InfeasibleScheduleError(
            f"EV needs {n_min} charging intervals but at most {n_max} are possible"
        )


def _check_z(spec: EvSpec, z) -> np.ndarray:
    z = np.asarray(z)
    if z.ndim != 1 or not np.isin(z, (0, 1)).all():
        raise InfeasibleScheduleError("charging decisions must be a binary vector")
    if spec.window_end >= len(z):
        raise InfeasibleScheduleError(
            f"charging window ends at interval {spec.window_end}, "
            f"schedule has {len(z)} intervals"
        )
    outside = np.ones(len(z), dtype = bool)
    outside[spec.window_start:spec.window_end + 1] = False
    if z[outside].any():
        raise InfeasibleScheduleError("charging is scheduled outside the window")
    return z.astype(int)


def apply_schedule(profile: BaseLoadProfile, spec: EvSpec, z) -> np.ndarray:
    """Total consumption p^t = p0^t + z^t P in kW."""
    z = _check_z(spec, z)
    if len(z) != profile.intervals:
        raise InfeasibleScheduleError(
            f"schedule has {len(z)} intervals, profile has {profile.intervals}"
        )
    return profile.as_array() + z * spec.charger_kw


def soc_trajectory(spec: EvSpec, z) -> ChargeSchedule:
    """SOC at every instant produced by charging decisions 'z'.

    Raises:
        InfeasibleScheduleError: SOC exceeds 1 or ends the window below soc_final.
    """
    z = _check_z(spec, z)
    soc = spec.soc_init + np.concatenate(([0.0], np.cumsum(z * spec.soc_per_interval)))
    if soc.max() > 1.0 + _SOC_TOLERANCE:
        raise InfeasibleScheduleError(f"SOC reaches {soc.max():.4f} > 1")
    reached = soc[spec.window_end + 1]
    if reached < spec.soc_final - _SOC_TOLERANCE:
        raise InfeasibleScheduleError(
            f"SOC at end of window is {reached:.4f}, below {spec.soc_final:.4f}"
        )
    return ChargeSchedule(z = z, soc = soc)
