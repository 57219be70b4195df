"""Scenario inputs and comparison results."""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import Field, root_validator, validator

from .base import RevsModel
from .coordination import AdmmConfig, AdmmTrace
from .enumerations import RunMode, VoltageBand
from .grid import DistributionNetwork, EdgeFlows, VoltageLimits
from .residence import BaseLoadProfile, EvSpec, Tariff


HOURS_PER_DAY = 24

# Clock-hour base load of an average home in kW, hour 0 first.
DIURNAL_TEMPLATE_KW = [
    0.6, 0.5, 0.5, 0.5, 0.5, 0.6, 0.9, 1.3, 1.2, 1.0, 0.9, 0.9,
    1.0, 1.0, 1.1, 1.3, 1.8, 2.4, 2.9, 3.0, 2.8, 2.3, 1.6, 1.0,
]


def _check_range(name, bounds):
    low, high = bounds
    if not 0.0 <= low <= high:
        raise ValueError(f"{name} must satisfy 0 <= low <= high")
    return bounds


# --- Generator

class GeneratorParams(RevsModel):

    """Synthetic radial network: substation -> trunk -> transformers -> homes.

    Resistances are per unit on 'base_power'. Each edge's capacity is
    'headroom' times its peak base-load flow, but at least 'min_capacity_kw'.
    """

    feeders: int = Field(1, ge = 1)
    homes_per_feeder: int = Field(30, ge = 1)
    homes_per_transformer: int = Field(5, ge = 1)
    # Auxiliary trunk nodes per feeder.
    depth: int = Field(4, ge = 1)
    trunk_resistance: Tuple[float, float] = (0.005, 0.01)
    transformer_resistance: Tuple[float, float] = (0.002, 0.004)
    service_resistance: Tuple[float, float] = (0.004, 0.008)
    headroom: float = Field(2.0, gt = 0.0)
    min_capacity_kw: float = Field(12.0, ge = 0.0)
    base_power: float = Field(100.0, gt = 0.0)
    template_kw: List[float] = Field(DIURNAL_TEMPLATE_KW, min_items = 1)
    # Per-home multiplier of the template, drawn uniformly.
    load_scale: Tuple[float, float] = (0.8, 1.2)
    # Relative standard deviation of the hourly noise.
    noise: float = Field(0.1, ge = 0.0)
    seed: int

    _check_trunk = validator("trunk_resistance", allow_reuse = True)(
        lambda bounds: _check_range("trunk_resistance", bounds)
    )
    _check_transformer = validator("transformer_resistance", allow_reuse = True)(
        lambda bounds: _check_range("transformer_resistance", bounds)
    )
    _check_service = validator("service_resistance", allow_reuse = True)(
        lambda bounds: _check_range("service_resistance", bounds)
    )
    _check_scale = validator("load_scale", allow_reuse = True)(
        lambda bounds: _check_range("load_scale", bounds)
    )


class GeneratedScenario(RevsModel):

    network: DistributionNetwork
    # Clock-hour profiles.
    profiles: List[BaseLoadProfile]
    communities: Dict[str, List[int]]


# --- Configuration

class EvDefaults(RevsModel):

    """EV parameters shared by all adopters, window in clock hours.

    The window runs from 'start_hour' up to 'end_hour', wrapping midnight.
    The interval starting at 'end_hour' is chargeable only with
    'include_end_hour'.
    """

    capacity_kwh: float = Field(20.0, gt = 0.0)
    charger_kw: float = Field(4.8, gt = 0.0)
    soc_init: float = Field(0.2, ge = 0.0, le = 1.0)
    soc_final: float = Field(0.9, ge = 0.0, le = 1.0)
    start_hour: int = Field(16, ge = 0, lt = HOURS_PER_DAY)
    end_hour: int = Field(5, ge = 0, lt = HOURS_PER_DAY)
    include_end_hour: bool = False

    def to_spec(self, horizon_start_hour: int = 16, intervals: int = HOURS_PER_DAY) -> EvSpec:
        """EvSpec with the window as horizon interval indices.

        Raises:
            ValueError: The window wraps past the end of the horizon.
        """
        last = self.end_hour if self.include_end_hour else self.end_hour - 1
        start = (self.start_hour - horizon_start_hour) % HOURS_PER_DAY
        end = (last - horizon_start_hour) % HOURS_PER_DAY
        if end < start or end >= intervals:
            raise ValueError(
                f"charging window {self.start_hour}:00-{self.end_hour}:00 is not "
                f"contiguous in a horizon starting at {horizon_start_hour}:00"
            )
        return EvSpec(
            capacity_kwh = self.capacity_kwh,
            charger_kw = self.charger_kw,
            window_start = start,
            window_end = end,
            soc_init = self.soc_init,
            soc_final = self.soc_final,
        )


class LimitSettings(RevsModel):

    """Voltage limits in per-unit magnitude."""

    v_min: float = Field(0.95, gt = 0.0, lt = 1.0)
    v_max: float = Field(1.05, gt = 1.0)

    def to_limits(self) -> VoltageLimits:
        return VoltageLimits.from_per_unit(self.v_min, self.v_max)


def _check_fraction(fraction):
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("adoption fractions must lie in [0, 1]")
    return fraction


class ScenarioConfig(RevsModel):

    """Contents of a scenario config file. Paths are already resolved."""

    network: Path
    profiles: Path
    tariff: Optional[Path] = None
    communities: Optional[Path] = None
    community: Optional[str] = None
    adoption_fractions: List[float] = Field([0.3, 0.6, 0.9], min_items = 1)
    seeds: List[int] = []
    mode: RunMode = RunMode.BOTH
    horizon_start_hour: int = Field(16, ge = 0, lt = HOURS_PER_DAY)
    ev: EvDefaults = EvDefaults()
    admm: AdmmConfig = AdmmConfig()
    limits: LimitSettings = LimitSettings()
    output: Path = Path("report")

    _check_fractions = validator("adoption_fractions", each_item = True, allow_reuse = True)(
        _check_fraction
    )

    @root_validator(skip_on_failure = True)
    def _check_community(cls, values):
        if values.get("community") is not None and values.get("communities") is None:
            raise ValueError("'community' needs a 'communities' file")
        return values


class Scenario(RevsModel):

    """A loaded scenario at one adoption level.

    Tariff and profiles are indexed by horizon interval.
    """

    network: DistributionNetwork
    profiles: List[BaseLoadProfile]
    tariff: Tariff
    community: List[int]
    adoption_fraction: float
    seeds: List[int] = Field(..., min_items = 1)
    ev: EvSpec
    mode: RunMode = RunMode.BOTH
    admm: AdmmConfig = AdmmConfig()
    limits: VoltageLimits = VoltageLimits()
    horizon_start_hour: int = 16

    _check_adoption = validator("adoption_fraction", allow_reuse = True)(_check_fraction)

    @root_validator(skip_on_failure = True)
    def _check_community(cls, values):
        residences = set(values["network"].residences())
        outside = sorted(set(values["community"]) - residences)
        if outside:
            raise ValueError(f"community nodes are not residences: {outside}")
        return values


# --- Results

class ViolationBands(RevsModel):

    """Residences per voltage band and interval.

    Every band of 'VoltageBand' is present, so the counts of an interval sum
    to the number of residences.
    """

    counts: Dict[VoltageBand, List[int]]
    residences: int

    @property
    def intervals(self) -> int:
        return len(next(iter(self.counts.values()), []))


    def below(self, band: VoltageBand) -> np.ndarray:
        """Per-interval count of residences in bands strictly below 'band'."""
        total = np.zeros(self.intervals, dtype = int)
        for candidate in VoltageBand:
            if candidate is band:
                break
            total += np.asarray(self.counts[candidate], dtype = int)
        return total


class BandAggregate(RevsModel):

    """Per-band, per-interval statistics of band counts across seeds."""

    mean: Dict[VoltageBand, List[float]]
    minimum: Dict[VoltageBand, List[int]]
    maximum: Dict[VoltageBand, List[int]]
    seeds: List[int]


class SeedRun(RevsModel):

    """Outcome of one seed in one mode. Failed runs carry only 'error'."""

    seed: int
    mode: RunMode
    adopters: List[int]
    voltages: Optional[np.ndarray] = None
    flows: Optional[EdgeFlows] = None
    bands: Optional[ViolationBands] = None
    # Energy bill per residence, $.
    costs: Dict[int, float] = {}
    converged: Optional[bool] = None
    iterations: Optional[int] = None
    trace: Optional[AdmmTrace] = None
    error: Optional[str] = None
    error_type: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class ComparisonReport(RevsModel):

    adoption_fraction: float
    seeds: List[int]
    runs: List[SeedRun]
    aggregates: Dict[RunMode, BandAggregate]

    def runs_for(self, mode: RunMode) -> List[SeedRun]:
        return [run for run in self.runs if run.mode is mode]


    def failures(self) -> List[SeedRun]:
        return [run for run in self.runs if not run.ok]


    def unconverged(self) -> List[SeedRun]:
        return [run for run in self.runs if run.converged is False]
