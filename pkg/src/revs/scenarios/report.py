"""Report directory writer.

Tables are long format, one row per node (or edge) and interval, and are
written with fixed float formatting so identical runs give identical bytes.
The layout of every file is documented in 'docs/reports.md'.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from revs.models.enumerations import RunMode, VoltageBand
from revs.models.grid import DistributionNetwork
from revs.models.scenario import ComparisonReport, SeedRun

from .metrics import distribution_summary, per_unit
from .store import ResultStore


logger = logging.getLogger(__name__)


REPORT_FILES = (
    "voltages.csv",
    "edge_flows.csv",
    "bands.csv",
    "costs.csv",
    "trace.csv",
    "distributions.csv",
    "summary.json",
)

_FLOAT_FORMAT = "%.8f"


def _hours(intervals, start_hour):
    return (np.arange(intervals) + start_hour) % 24


def _long(run: SeedRun, fraction, values, labels: Dict[str, np.ndarray], start_hour):
    """Rows of a (items x T) matrix, labelled per item."""
    items, intervals = values.shape
    frame = pd.DataFrame({
        "adoption": fraction,
        "seed": run.seed,
        "mode": run.mode.value,
        **{name: np.repeat(column, intervals) for name, column in labels.items()},
        "interval": np.tile(np.arange(intervals), items),
        "hour": np.tile(_hours(intervals, start_hour), items),
    })
    return frame


def voltage_table(store: ResultStore, network, start_hour) -> pd.DataFrame:
    frames = []
    nodes = np.arange(1, network.size + 1)
    for fraction, run in store.entries():
        if not run.ok:
            continue
        frame = _long(run, fraction, run.voltages, {"node": nodes}, start_hour)
        frame["voltage_pu"] = per_unit(run.voltages).ravel()
        frames.append(frame)
    return _concat(frames, ["adoption", "seed", "mode", "node", "interval", "hour", "voltage_pu"])


def flow_table(store: ResultStore, network, start_hour) -> pd.DataFrame:
    frames = []
    parents = np.array([edge.parent for edge in network.edges])
    children = np.array([edge.child for edge in network.edges])
    for fraction, run in store.entries():
        if not run.ok:
            continue
        frame = _long(
            run, fraction, run.flows.flow_kw, {"parent": parents, "child": children}, start_hour,
        )
        frame["flow_kw"] = run.flows.flow_kw.ravel()
        frame["percent"] = run.flows.percent.ravel()
        frames.append(frame)
    return _concat(
        frames,
        ["adoption", "seed", "mode", "parent", "child", "interval", "hour", "flow_kw", "percent"],
    )


def band_table(reports, start_hour) -> pd.DataFrame:
    """Aggregate band counts with one 'count_seed_<s>' column per seed."""
    seeds = sorted({seed for report in reports for seed in report.seeds})
    rows = []
    for report in reports:
        for mode, aggregate in report.aggregates.items():
            by_seed = {
                run.seed: run.bands for run in report.runs_for(mode) if run.ok
            }
            for band in VoltageBand:
                if band not in aggregate.mean:
                    continue
                for interval, mean in enumerate(aggregate.mean[band]):
                    row = {
                        "adoption": report.adoption_fraction,
                        "mode": mode.value,
                        "interval": interval,
                        "hour": (interval + start_hour) % 24,
                        "band": band.value,
                        "mean": mean,
                        "min": aggregate.minimum[band][interval],
                        "max": aggregate.maximum[band][interval],
                        "n_seeds": len(aggregate.seeds),
                    }
                    for seed in seeds:
                        bands = by_seed.get(seed)
                        row[f"count_seed_{seed}"] = (
                            bands.counts[band][interval] if bands is not None else pd.NA
                        )
                    rows.append(row)
    columns = (
        ["adoption", "mode", "interval", "hour", "band", "mean", "min", "max", "n_seeds"] +
        [f"count_seed_{seed}" for seed in seeds]
    )
    return pd.DataFrame(rows, columns = columns)


def cost_table(store: ResultStore) -> pd.DataFrame:
    rows = []
    for fraction, run in store.entries():
        adopters = set(run.adopters)
        for node, cost in sorted(run.costs.items()):
            rows.append((fraction, run.seed, run.mode.value, node, int(node in adopters), cost))
    return pd.DataFrame(
        rows, columns = ["adoption", "seed", "mode", "node", "adopter", "cost_usd"],
    )


def trace_table(store: ResultStore) -> pd.DataFrame:
    frames = []
    for fraction, run in store.entries():
        if run.trace is None:
            continue
        frame = run.trace.to_frame()
        frame.insert(0, "seed", run.seed)
        frame.insert(0, "adoption", fraction)
        frames.append(frame)
    return _concat(
        frames,
        ["adoption", "seed", "iter", "primal_residual", "dual_residual", "total_cost"],
    )


def distribution_table(reports, network, start_hour) -> pd.DataFrame:
    """Box-plot statistics of residence voltages and edge loadings, pooled over seeds."""
    rows = network.residences()
    frames = []
    for report in reports:
        for mode in report.aggregates:
            runs = [run for run in report.runs_for(mode) if run.ok]
            if not runs:
                continue
            quantities = {
                "voltage_pu": np.vstack([
                    per_unit(run.voltages[np.asarray(rows) - 1]) for run in runs
                ]),
                "loading_percent": np.vstack([run.flows.percent for run in runs]),
            }
            for quantity, values in quantities.items():
                frame = distribution_summary(values)
                frame.insert(0, "quantity", quantity)
                frame.insert(0, "mode", mode.value)
                frame.insert(0, "adoption", report.adoption_fraction)
                frame.insert(4, "hour", _hours(len(frame), start_hour))
                frames.append(frame)
    return _concat(
        frames,
        ["adoption", "mode", "quantity", "interval", "hour", "min", "q1", "median", "q3", "max"],
    )


def summary(reports: Sequence[ComparisonReport], network, run_id: str) -> dict:
    """Structured summary of a sweep."""
    residences = network.residences()
    adoption = []
    for report in reports:
        modes = {}
        for mode in report.aggregates:
            runs = report.runs_for(mode)
            ok = [run for run in runs if run.ok]
            entry = {
                "runs": len(runs),
                "failures": [
                    {"seed": run.seed, "error_type": run.error_type, "error": run.error}
                    for run in runs if not run.ok
                ],
            }
            if ok:
                below = [run.bands.below(VoltageBand.FROM_095_TO_098) for run in ok]
                entry.update({
                    "min_voltage_pu": _round(min(
                        float(per_unit(run.voltages[np.asarray(residences) - 1]).min())
                        for run in ok
                    )),
                    "max_residences_below_095": int(max(int(counts.max()) for counts in below)),
                    "max_edge_loading_percent": _round(max(
                        float(run.flows.percent.max()) for run in ok
                    )),
                    "mean_total_cost_usd": _round(float(np.mean([
                        sum(run.costs.values()) for run in ok
                    ]))),
                })
            if mode is RunMode.DISTRIBUTED:
                entry["converged"] = sum(1 for run in ok if run.converged)
                entry["mean_iterations"] = _round(
                    float(np.mean([run.iterations for run in ok])) if ok else 0.0
                )
            modes[mode.value] = entry
        adoption.append({"adoption": report.adoption_fraction, "modes": modes})
    return {
        "run_id": run_id,
        "nodes": network.size,
        "residences": len(residences),
        "seeds": sorted({seed for report in reports for seed in report.seeds}),
        "files": list(REPORT_FILES),
        "adoption": adoption,
    }


def write_report(
    reports: Sequence[ComparisonReport],
    network: DistributionNetwork,
    out,
    run_id: str,
    start_hour: int = 16,
    store: Optional[ResultStore] = None,
) -> List[Path]:
    """Write every report file into directory 'out', creating it if needed.

    Per-run tables read the runs from 'store', which is filled from
    'reports' when not given.
    """
    if store is None:
        store = ResultStore.from_reports(reports)
    out = Path(out)
    out.mkdir(parents = True, exist_ok = True)
    tables = {
        "voltages.csv": voltage_table(store, network, start_hour),
        "edge_flows.csv": flow_table(store, network, start_hour),
        "bands.csv": band_table(reports, start_hour),
        "costs.csv": cost_table(store),
        "trace.csv": trace_table(store),
        "distributions.csv": distribution_table(reports, network, start_hour),
    }
    written = []
    for name, table in tables.items():
        path = out / name
        table.to_csv(path, index = False, float_format = _FLOAT_FORMAT)
        written.append(path)
    path = out / "summary.json"
    path.write_text(json.dumps(summary(reports, network, run_id), indent = 2, sort_keys = True) + "\n")
    written.append(path)
    logger.info("Wrote %d report files to %s", len(written), out)
    return written


def _concat(frames, columns) -> pd.DataFrame:
    if not frames:
        return pd.DataFrame(columns = columns)
    return pd.concat(frames, ignore_index = True)[columns]


def _round(value: float) -> float:
    return round(value, 8)
