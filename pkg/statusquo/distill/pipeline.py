"""GameDistill for one agent: collect, encode, cluster, distill."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd

from ..data.cache import config_hash
from ..data.models import DistillConfig
from .clustering import (
    ClusterReport,
    cluster_embeddings,
    cluster_report,
    label_clusters,
    projection_frame,
)
from .encoder import EncoderModel, color_accuracy, embed, train_encoder
from .models import ClusterModel, SequenceDataset
from .oracle import OraclePair, SoloReport, evaluate_oracle_solo, train_oracle
from .rollouts import collect_rollouts
from .storage import load_model, save_dataset, save_model

logger = logging.getLogger(__name__)

HOLDOUT_FRACTION = 0.2
ALTERNATIVE_METHOD = {"agglomerative": "kmeans", "kmeans": "agglomerative"}


@dataclass
class DistillResult:
    """Everything one agent's GameDistill run produced."""

    agent: str
    dataset: SequenceDataset
    encoder: EncoderModel
    clusters: ClusterModel
    report: ClusterReport
    oracles: OraclePair
    holdout_color_accuracy: float
    projection: pd.DataFrame
    solo: Dict[str, SoloReport] = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "agent": self.agent,
            "dataset_size": len(self.dataset),
            "encoder_final_loss": self.encoder.loss_history[-1],
            "holdout_color_accuracy": self.holdout_color_accuracy,
            "clusters": self.report.to_dict(),
            "oracle_training_accuracy": {
                "cooperation": self.oracles.cooperation.training_accuracy,
                "defection": self.oracles.defection.training_accuracy,
            },
            "solo": {role: report.to_dict() for role, report in self.solo.items()},
        }


def run_gamedistill(
    agent: str,
    config: DistillConfig,
    rng: np.random.Generator,
    episode_length: int = 200,
    respawn: str = "coin",
) -> DistillResult:
    """Run the full pipeline for one agent on its own stream.

    Nothing is shared with the other agent's run.
    """
    logger.info(f"GameDistill for {agent}: collecting {config.dataset_size} sequences")
    dataset = collect_rollouts(rng, config.dataset_size, agent, episode_length, respawn)

    train, holdout = dataset.split(HOLDOUT_FRACTION, rng)
    encoder = train_encoder(train, config.encoder_epochs, rng, config.encoder_lr, config.minibatch)
    accuracy = color_accuracy(encoder, holdout) if len(holdout) else float("nan")
    logger.info(f"{agent} encoder: held-out coin-color accuracy {accuracy:.3f}")

    embeddings = embed(encoder, dataset)
    cluster_seed = int(rng.integers(2 ** 31 - 1))
    clusters = label_clusters(cluster_embeddings(embeddings, config.cluster_method, cluster_seed), dataset)
    alternative = cluster_embeddings(embeddings, ALTERNATIVE_METHOD[config.cluster_method], cluster_seed)
    report = cluster_report(clusters, dataset, alternative)
    logger.info(
        f"{agent} clusters: sizes {report.sizes}, purity {report.purity:.3f}, "
        f"{alternative.method} agreement {report.method_agreement:.3f}"
    )

    cooperative = dataset.subset(clusters.members("cooperate"))
    defecting = dataset.subset(clusters.members("defect"))
    training = (config.oracle_epochs, config.oracle_lr, config.l2, config.minibatch)
    # Only the cooperation oracle is told what not to do; defection picks any coin.
    oracles = OraclePair(
        train_oracle(cooperative, "cooperation", rng, *training, negatives=defecting),
        train_oracle(defecting, "defection", rng, *training),
    )
    solo = {
        oracle.role: evaluate_oracle_solo(oracle, config.solo_trials, rng, config.solo_max_steps)
        for oracle in (oracles.cooperation, oracles.defection)
    }
    return DistillResult(
        agent=agent,
        dataset=dataset,
        encoder=encoder,
        clusters=clusters,
        report=report,
        oracles=oracles,
        holdout_color_accuracy=accuracy,
        projection=projection_frame(embeddings, clusters, dataset),
        solo=solo,
    )


def save_distill_artifacts(
    result: DistillResult,
    directory: Path,
    fingerprint: Optional[dict] = None,
) -> Dict[str, Path]:
    """Write dataset, oracles, cluster report, projection and manifest for one agent.

    The manifest records ``fingerprint`` (what the oracles were distilled
    from) and a digest of the oracle parameters.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "dataset": directory / f"{result.agent}_dataset.npz",
        "cooperation": directory / f"{result.agent}_cooperation_oracle.npz",
        "defection": directory / f"{result.agent}_defection_oracle.npz",
        "report": directory / f"{result.agent}_cluster_report.json",
        "projection": directory / f"{result.agent}_projection.csv",
        "manifest": directory / f"{result.agent}_distill_manifest.json",
    }
    save_dataset(paths["dataset"], result.dataset)
    save_model(paths["cooperation"], result.oracles.cooperation)
    save_model(paths["defection"], result.oracles.defection)
    paths["report"].write_text(json.dumps(result.summary(), indent=2, sort_keys=True), encoding="utf-8")
    result.projection.to_csv(paths["projection"], index=False, float_format="%.17g")
    manifest = {
        "agent": result.agent,
        "fingerprint": fingerprint,
        "fingerprint_hash": config_hash(fingerprint) if fingerprint is not None else None,
        "oracle_digest": result.oracles.parameter_digest(),
    }
    paths["manifest"].write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str), encoding="utf-8")
    logger.info(f"Saved {result.agent} GameDistill artifacts to {directory}")
    return paths


def load_oracle_pair(directory: Path, agent: str, fingerprint: Optional[dict] = None) -> Optional[OraclePair]:
    """Previously saved oracles of one agent, or None if absent.

    With ``fingerprint`` the saved manifest must carry the same fingerprint
    and the loaded parameters must match its digest; otherwise None.
    """
    directory = Path(directory)
    cooperation = directory / f"{agent}_cooperation_oracle.npz"
    defection = directory / f"{agent}_defection_oracle.npz"
    if not (cooperation.exists() and defection.exists()):
        return None
    pair = OraclePair(load_model(cooperation), load_model(defection))
    if fingerprint is None:
        return pair

    manifest_path = directory / f"{agent}_distill_manifest.json"
    if not manifest_path.exists():
        logger.info(f"No distill manifest for {agent} in {directory}; saved oracles ignored")
        return None
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("fingerprint_hash") != config_hash(fingerprint):
        logger.info(f"Saved {agent} oracles were distilled with other settings; ignoring them")
        return None
    if manifest.get("oracle_digest") != pair.parameter_digest():
        logger.warning(f"Saved {agent} oracle files do not match their manifest; ignoring them")
        return None
    return pair
