"""Residence-side value types: tariff, base load, EV and schedules.

Intervals are 0-based indices into the simulation horizon. Power is in kW,
energy in kWh, money in $. Every interval lasts INTERVAL_HOURS.
"""

from typing import List, Optional

import numpy as np
from pydantic import Field, root_validator, validator

from .base import RevsModel


INTERVAL_HOURS = 1.0


def _rotate(values, start_hour):
    return list(values[start_hour:]) + list(values[:start_hour])


class Tariff(RevsModel):

    """Per-interval electricity rate c^t in $/kWh."""

    rates: List[float] = Field(..., min_items = 1)

    @validator("rates", each_item = True)
    def _check_positive(cls, rate):
        if not rate > 0.0:
            raise ValueError("rates must be positive")
        return rate


    @property
    def intervals(self) -> int:
        return len(self.rates)


    def as_array(self) -> np.ndarray:
        return np.asarray(self.rates, dtype = float)


    def rotated(self, start_hour: int) -> "Tariff":
        """Re-index so that interval 0 is clock hour 'start_hour'."""
        return Tariff(rates = _rotate(self.rates, start_hour % self.intervals))


class BaseLoadProfile(RevsModel):

    """Uncontrollable load p_{i,0}^t of one residence, in kW."""

    node: int = Field(..., ge = 1)
    load: List[float] = Field(..., min_items = 1)

    @validator("load", each_item = True)
    def _check_nonnegative(cls, value):
        if not value >= 0.0:
            raise ValueError("base load must be nonnegative")
        return value


    @property
    def intervals(self) -> int:
        return len(self.load)


    def as_array(self) -> np.ndarray:
        return np.asarray(self.load, dtype = float)


    def rotated(self, start_hour: int) -> "BaseLoadProfile":
        """Re-index so that interval 0 is clock hour 'start_hour'."""
        return BaseLoadProfile(
            node = self.node,
            load = _rotate(self.load, start_hour % self.intervals),
        )


class EvSpec(RevsModel):

    """One EV and its charger.

    The charging window is the closed range of horizon intervals
    [window_start, window_end].
    """

    capacity_kwh: float = Field(20.0, gt = 0.0)
    charger_kw: float = Field(4.8, gt = 0.0)
    window_start: int = Field(..., ge = 0)
    window_end: int = Field(..., ge = 0)
    soc_init: float = Field(0.2, ge = 0.0, le = 1.0)
    soc_final: float = Field(0.9, ge = 0.0, le = 1.0)

    @root_validator(skip_on_failure = True)
    def _check_ranges(cls, values):
        if values["window_end"] < values["window_start"]:
            raise ValueError("charging window must be nonempty")
        if values["soc_final"] < values["soc_init"]:
            raise ValueError("soc_final must not be below soc_init")
        return values


    @property
    def window_length(self) -> int:
        return self.window_end - self.window_start + 1


    def window(self) -> range:
        return range(self.window_start, self.window_end + 1)


    @property
    def soc_per_interval(self) -> float:
        """SOC gained by one on-interval."""
        return self.charger_kw * INTERVAL_HOURS / self.capacity_kwh


class ChargeSchedule(RevsModel):

    """On/off charging decisions and the SOC they produce.

    'z' has one entry per interval; 'soc' has one entry per instant 0..T.
    """

    z: np.ndarray
    soc: np.ndarray

    @root_validator(skip_on_failure = True)
    def _check_lengths(cls, values):
        if len(values["soc"]) != len(values["z"]) + 1:
            raise ValueError("soc must have one more entry than z")
        return values


    @property
    def on_count(self) -> int:
        return int(self.z.sum())


class ResidenceAdmmState(RevsModel):

    """Iteration-l data a residence holds when solving its ADMM step (kW)."""

    p_local: np.ndarray
    p_operator: np.ndarray
    gamma: np.ndarray
    kappa: float = Field(..., gt = 0.0)

    @root_validator(skip_on_failure = True)
    def _check_lengths(cls, values):
        lengths = {len(values[name]) for name in ("p_local", "p_operator", "gamma")}
        if len(lengths) != 1:
            raise ValueError("state vectors must have equal length")
        return values


class ResidenceSolution(RevsModel):

    """Optimal trajectory of one residence.

    'objective' is the value of the problem solved, constant terms included.
    'energy_cost' is the bill sum_t c^t p^t dt regardless of the problem.
    """

    node: Optional[int] = None
    schedule: ChargeSchedule
    p: np.ndarray
    objective: float
    energy_cost: float
    ev_cost: float = 0.0
