"""Metric CSV, plot manifest and summary files."""

import json
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from .models import AGGREGATE_SEED, METRIC_COLUMNS, RunMetrics

logger = logging.getLogger(__name__)

STD_HEADER = "# std=population (ddof=0)"
FLOAT_FORMAT = "%.17g"
COOPERATION_THRESHOLD = -1.2

Y_LABELS = {
    "ndr": "normalized discounted reward",
    "own_coin_probability": "P(own coin | pick)",
    "cooperation_probability": "P(cooperate)",
    "defection_rate": "P(defect)",
}

PathLike = Union[str, Path]


def metrics_table(metrics: RunMetrics) -> pd.DataFrame:
    """Per-seed rows followed, within each epoch, by ``agg`` mean/std rows."""
    per_seed = metrics.frame()
    aggregate = metrics.aggregate()
    if per_seed.empty:
        return pd.DataFrame(columns=METRIC_COLUMNS)

    agg_rows = pd.concat([
        pd.DataFrame({
            "epoch": aggregate["epoch"],
            "seed": AGGREGATE_SEED,
            "agent": aggregate["agent"],
            "metric_name": aggregate["metric_name"] + f"_{stat}",
            "value": aggregate[stat],
        })
        for stat in ("mean", "std")
    ])
    table = pd.concat([per_seed.astype({"seed": object}), agg_rows], ignore_index=True)
    table["_seed_order"] = [np.inf if s == AGGREGATE_SEED else float(s) for s in table["seed"]]
    table = table.sort_values(
        ["epoch", "_seed_order", "agent", "metric_name"], kind="mergesort"
    ).drop(columns="_seed_order")
    return table[METRIC_COLUMNS].reset_index(drop=True)


def write_metrics(metrics: RunMetrics, path: PathLike) -> Path:
    """Write the metric table as UTF-8 CSV with a population-std comment line.

    Raises:
        OSError: the path is not writable
    """
    path = Path(path)
    table = metrics_table(metrics)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(STD_HEADER + "\n")
        table.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(table)} metric rows to {path}")
    return path


def read_metrics(path: PathLike) -> pd.DataFrame:
    """Read a metric CSV back; ``seed`` stays text so ``agg`` rows survive."""
    return pd.read_csv(path, comment="#", dtype={"seed": str, "agent": str, "metric_name": str})


def metrics_from_table(table: pd.DataFrame) -> RunMetrics:
    """Rebuild per-seed RunMetrics from a table read by ``read_metrics``."""
    rows = table[table["seed"] != AGGREGATE_SEED]
    metrics = RunMetrics(seeds=sorted({int(s) for s in rows["seed"]}))
    for epoch, seed, agent, name, value in rows[METRIC_COLUMNS].itertuples(index=False):
        metrics.add(int(epoch), int(seed), agent, name, float(value))
    return metrics


def write_manifest(metrics: RunMetrics, csv_path: PathLike, path: PathLike) -> Path:
    """Plot manifest: which series the CSV holds and how to label them."""
    frame = metrics.frame()
    series = [
        {
            "agent": agent,
            "metric_name": name,
            "y_label": Y_LABELS.get(name, name),
        }
        for (agent, name), _ in frame.groupby(["agent", "metric_name"], sort=True)
    ] if not frame.empty else []
    manifest = {
        "csv": Path(csv_path).name,
        "x_label": "epoch",
        "aggregate_seed": AGGREGATE_SEED,
        "std": "population",
        "series": series,
    }
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return path


def epochs_to_cooperation(
    metrics: RunMetrics,
    threshold: float = COOPERATION_THRESHOLD,
) -> Optional[int]:
    """First epoch whose seed-mean NDR, averaged over both agents, exceeds ``threshold``."""
    agg = metrics.aggregate()
    ndr = agg[agg["metric_name"] == "ndr"].groupby("epoch")["mean"].mean()
    above = ndr[ndr > threshold]
    return int(above.index[0]) if len(above) else None


def epochs_to_cooperation_per_seed(
    metrics: RunMetrics,
    threshold: float = COOPERATION_THRESHOLD,
) -> Dict[int, Optional[int]]:
    frame = metrics.frame()
    ndr = frame[frame["metric_name"] == "ndr"].groupby(["seed", "epoch"])["value"].mean()
    result = {}
    for seed in metrics.seeds:
        if seed not in ndr.index.get_level_values(0):
            result[seed] = None
            continue
        series = ndr.loc[seed]
        above = series[series > threshold]
        result[seed] = int(above.index[0]) if len(above) else None
    return result


def median_epochs_to_cooperation(per_seed: Dict[int, Optional[int]]) -> Optional[float]:
    """Median over seeds; seeds that never cooperate count as infinitely late."""
    values = [np.inf if v is None else v for v in per_seed.values()]
    if not values:
        return None
    median = float(np.median(values))
    return None if np.isinf(median) else median


def final_summary(metrics: RunMetrics) -> Dict[str, Dict[str, Dict[str, Optional[float]]]]:
    """Final-epoch mean and population std per agent and metric."""
    frame = metrics.frame()
    summary: Dict[str, Dict[str, Dict[str, Optional[float]]]] = {}
    for (agent, name), _ in frame.groupby(["agent", "metric_name"], sort=True):
        mean, std = metrics.final_summary(agent, name)
        summary.setdefault(agent, {})[name] = {"mean": mean, "std": std}
    return summary


def write_summary(path: PathLike, record: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(record, indent=2, sort_keys=True, default=str), encoding="utf-8")
    logger.info(f"Wrote summary to {path}")
    return path
