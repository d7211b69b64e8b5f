"""Data models for StatusQuo runs.

Defines metric records, per-seed series with mean/std aggregation, and the
experiment configuration.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..agents.models import LEARNER_KINDS, SQConfig
from ..errors import ConfigValidationError

AGENTS = ("agent1", "agent2")
AGGREGATE_SEED = "agg"
METRIC_COLUMNS = ["epoch", "seed", "agent", "metric_name", "value"]

EXPERIMENT_KINDS = (
    "ipd", "imp", "ish", "coin_sq", "coin_gamedistill", "exploitability", "z_sweep", "stationary",
)
ENVIRONMENTS = ("ipd", "imp", "ish", "coin")
RESPAWN_MODES = ("coin", "board")

DEFAULT_ENVIRONMENT = {
    "ipd": "ipd", "imp": "imp", "ish": "ish", "coin_sq": "coin", "coin_gamedistill": "coin",
    "exploitability": "coin", "z_sweep": "ipd", "stationary": "ipd",
}
DEFAULT_LEARNERS = {
    "ipd": ("sq", "sq"), "imp": ("sq", "sq"), "ish": ("sq", "sq"), "coin_sq": ("sq", "sq"),
    "coin_gamedistill": ("sq", "sq"), "exploitability": ("sq", "always_defect"),
    "z_sweep": ("sq", "sq"), "stationary": ("sl", "sl"),
}


@dataclass(frozen=True)
class MetricRecord:
    """One (epoch, seed, agent, metric) value."""

    epoch: int
    seed: int
    agent: str
    metric_name: str
    value: float


@dataclass
class RunMetrics:
    """Per-seed metric series with aggregation across the configured seeds.

    Standard deviations use the population convention (ddof=0).
    """

    seeds: List[int] = field(default_factory=list)
    records: List[MetricRecord] = field(default_factory=list)

    def add(self, epoch: int, seed: int, agent: str, metric_name: str, value: Optional[float]):
        """Record a value; None (undefined metric) is left absent."""
        if value is None:
            return
        self.records.append(MetricRecord(epoch, seed, agent, metric_name, float(value)))

    def merge(self, other: "RunMetrics") -> "RunMetrics":
        seeds = sorted(set(self.seeds) | set(other.seeds))
        return RunMetrics(seeds, self.records + other.records)

    def is_empty(self) -> bool:
        return not self.records

    def frame(self) -> pd.DataFrame:
        """Per-seed rows sorted by (epoch, seed, agent, metric_name)."""
        if not self.records:
            return pd.DataFrame(columns=METRIC_COLUMNS)
        frame = pd.DataFrame([asdict(r) for r in self.records], columns=METRIC_COLUMNS)
        frame = frame[frame["seed"].isin(self.seeds)] if self.seeds else frame
        return frame.sort_values(["epoch", "seed", "agent", "metric_name"], kind="mergesort").reset_index(drop=True)

    def aggregate(self) -> pd.DataFrame:
        """Mean and population std per (epoch, agent, metric_name)."""
        frame = self.frame()
        if frame.empty:
            return pd.DataFrame(columns=["epoch", "agent", "metric_name", "mean", "std"])
        grouped = frame.groupby(["epoch", "agent", "metric_name"], sort=True)["value"]
        return pd.DataFrame({
            "mean": grouped.mean(),
            "std": grouped.std(ddof=0),
        }).reset_index()

    def series(self, agent: str, metric_name: str) -> pd.Series:
        """Seed-mean per epoch for one agent and metric."""
        agg = self.aggregate()
        rows = agg[(agg["agent"] == agent) & (agg["metric_name"] == metric_name)]
        return rows.set_index("epoch")["mean"]

    def final_values(self, agent: str, metric_name: str) -> Dict[int, float]:
        """Last recorded value of each seed."""
        frame = self.frame()
        rows = frame[(frame["agent"] == agent) & (frame["metric_name"] == metric_name)]
        if rows.empty:
            return {}
        last = rows.sort_values("epoch").groupby("seed").tail(1)
        return {int(s): float(v) for s, v in zip(last["seed"], last["value"])}

    def final_summary(self, agent: str, metric_name: str) -> Tuple[Optional[float], Optional[float]]:
        """(mean, population std) of the seeds' final values."""
        values = list(self.final_values(agent, metric_name).values())
        if not values:
            return None, None
        return float(np.mean(values)), float(np.std(values))


@dataclass
class EnvironmentConfig:
    """Environment flags shared by all experiment kinds."""

    episode_length: int = 200
    respawn: str = "coin"
    stationarity: int = 1

    def __post_init__(self):
        if self.episode_length < 1:
            raise ConfigValidationError("env.episode_length", "must be at least 1")
        if self.respawn not in RESPAWN_MODES:
            raise ConfigValidationError("env.respawn", f"must be one of {RESPAWN_MODES}")
        if self.stationarity < 1:
            raise ConfigValidationError("env.stationarity", "must be at least 1")


@dataclass
class DistillConfig:
    """GameDistill settings."""

    dataset_size: int = 2500
    encoder_epochs: int = 30
    encoder_lr: float = 0.003
    oracle_epochs: int = 60
    oracle_lr: float = 0.001
    l2: float = 1e-4
    minibatch: int = 128
    cluster_method: str = "agglomerative"
    solo_trials: int = 1000
    solo_max_steps: int = 4

    def __post_init__(self):
        for name in ("dataset_size", "encoder_epochs", "oracle_epochs", "minibatch", "solo_trials", "solo_max_steps"):
            if getattr(self, name) < 1:
                raise ConfigValidationError(f"distill.{name}", "must be at least 1")
        for name in ("encoder_lr", "oracle_lr"):
            if getattr(self, name) <= 0:
                raise ConfigValidationError(f"distill.{name}", "must be positive")
        if self.l2 < 0:
            raise ConfigValidationError("distill.l2", "must be non-negative")
        if self.cluster_method not in ("agglomerative", "kmeans"):
            raise ConfigValidationError("distill.cluster_method", "must be agglomerative or kmeans")


@dataclass
class ExperimentConfig:
    """A fully validated experiment description."""

    experiment: str = "ipd"
    environment: str = "ipd"
    learners: Tuple[str, str] = ("sq", "sq")
    sq: SQConfig = field(default_factory=SQConfig)
    seeds: List[int] = field(default_factory=lambda: list(range(20)))
    epochs: int = 200
    output_dir: str = "runs"
    env: EnvironmentConfig = field(default_factory=EnvironmentConfig)
    distill: DistillConfig = field(default_factory=DistillConfig)
    z_values: List[int] = field(default_factory=lambda: [1, 2, 5, 10, 20])
    log_every: int = 10

    def __post_init__(self):
        """Validate cross-field consistency."""
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigValidationError("experiment", f"must be one of {EXPERIMENT_KINDS}")
        if self.environment not in ENVIRONMENTS:
            raise ConfigValidationError("environment", f"must be one of {ENVIRONMENTS}")
        expects_coin = self.experiment in ("coin_sq", "coin_gamedistill")
        expects_matrix = self.experiment in ("ipd", "imp", "ish", "z_sweep", "stationary")
        if (expects_coin and self.environment != "coin") or (
            expects_matrix and self.environment != DEFAULT_ENVIRONMENT[self.experiment]
        ):
            raise ConfigValidationError(
                "environment", f"{self.environment} does not fit experiment {self.experiment}"
            )
        if len(self.learners) != 2:
            raise ConfigValidationError("learners", "exactly two seats are required")
        for seat, kind in enumerate(self.learners):
            if kind not in LEARNER_KINDS:
                raise ConfigValidationError(f"learners.{seat}", f"must be one of {LEARNER_KINDS}")
        if not self.seeds:
            raise ConfigValidationError("seeds", "at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigValidationError("seeds", "seeds must be distinct")
        if self.epochs < 1:
            raise ConfigValidationError("epochs", "must be at least 1")
        if self.log_every < 1:
            raise ConfigValidationError("log_every", "must be at least 1")
        if not self.z_values or any(z < 1 for z in self.z_values):
            raise ConfigValidationError("z_values", "values must be at least 1")

    @property
    def is_coin(self) -> bool:
        return self.environment == "coin"

    def fingerprint(self) -> dict:
        """Canonical content that determines a seed's result (no seeds, no paths)."""
        data = asdict(self)
        data.pop("seeds")
        data.pop("output_dir")
        data.pop("log_every")
        data["learners"] = list(self.learners)
        return data

    def distill_fingerprint(self) -> dict:
        """What determines the distilled oracles: distill settings, board setup and root seed."""
        return {
            "distill": asdict(self.distill),
            "episode_length": self.env.episode_length,
            "respawn": self.env.respawn,
            "root_seed": self.seeds[0],
        }
