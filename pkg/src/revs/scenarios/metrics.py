"""Adopter sampling and reliability metrics."""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from revs.errors import DataError, ModelBlowUpError
from revs.models.enumerations import VoltageBand
from revs.models.scenario import BandAggregate, ViolationBands


logger = logging.getLogger(__name__)


# Lower edges (p.u.) of the bands above the lowest one, in 'VoltageBand' order.
BAND_EDGES: Tuple[float, float, float] = (0.92, 0.95, 0.98)


def sample_adopters(community: Sequence[int], fraction: float, seed: int) -> List[int]:
    """Uniform sample of round(fraction * |community|) residences, sorted.

    Halves round up. The sample depends only on the sorted community, the
    fraction and the seed.

    Raises:
        DataError: Empty community or fraction outside [0, 1].
    """
    if not community:
        raise DataError("cannot sample adopters from an empty community")
    if not 0.0 <= fraction <= 1.0:
        raise DataError(f"adoption fraction {fraction} is outside [0, 1]")
    members = np.array(sorted(set(community)))
    count = min(int(math.floor(fraction * len(members) + 0.5)), len(members))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(members, size = count, replace = False)
    return sorted(int(node) for node in chosen)


def per_unit(v_squared) -> np.ndarray:
    """Voltage magnitudes from squared voltages.

    Raises:
        ModelBlowUpError: Negative squared voltages.
    """
    v_squared = np.asarray(v_squared, dtype = float)
    if (v_squared < 0.0).any():
        raise ModelBlowUpError(
            f"negative squared voltage {v_squared.min():.4f}; loads are far outside "
            f"the range of the linearized model"
        )
    return np.sqrt(v_squared)


def band_voltages(
    v_squared,
    residences: Sequence[int],
    edges: Tuple[float, float, float] = BAND_EDGES,
) -> ViolationBands:
    """Count residences per voltage band and interval.

    Arguments:
        v_squared: Squared voltages of all non-substation nodes, N x T (or N).
        residences: Residence node ids; row 'node - 1' of 'v_squared'.
        edges: Lower edges of the left-closed bands above the lowest.

    Raises:
        ModelBlowUpError: Negative squared voltages.
    """
    v = per_unit(v_squared)
    if v.ndim == 1:
        v = v[:, None]
    rows = v[np.asarray(residences, dtype = int) - 1]
    # Band index 0 below edges[0], ... len(edges) at or above edges[-1].
    index = np.searchsorted(np.asarray(edges), rows, side = "right")
    counts = {
        band: (index == position).sum(axis = 0).astype(int).tolist()
        for position, band in enumerate(VoltageBand)
    }
    return ViolationBands(counts = counts, residences = len(residences))


def aggregate_bands(bands: Sequence[ViolationBands], seeds: Sequence[int]) -> BandAggregate:
    """Mean, minimum and maximum of each band count across seeds."""
    if not bands:
        return BandAggregate(mean = {}, minimum = {}, maximum = {}, seeds = [])
    mean, minimum, maximum = {}, {}, {}
    for band in VoltageBand:
        stacked = np.array([item.counts[band] for item in bands])
        mean[band] = stacked.mean(axis = 0).tolist()
        minimum[band] = stacked.min(axis = 0).astype(int).tolist()
        maximum[band] = stacked.max(axis = 0).astype(int).tolist()
    return BandAggregate(mean = mean, minimum = minimum, maximum = maximum, seeds = list(seeds))


def distribution_summary(values) -> pd.DataFrame:
    """Per-interval box-plot statistics of an (items x T) matrix."""
    values = np.asarray(values, dtype = float)
    if values.ndim == 1:
        values = values[:, None]
    quantiles = np.percentile(values, [0, 25, 50, 75, 100], axis = 0)
    return pd.DataFrame({
        "interval": np.arange(values.shape[1]),
        "min": quantiles[0],
        "q1": quantiles[1],
        "median": quantiles[2],
        "q3": quantiles[3],
        "max": quantiles[4],
    })
