"""Two-way clustering of sequence embeddings and cluster labeling."""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional

import numpy as np
import pandas as pd
from sklearn.cluster import AgglomerativeClustering, KMeans
from sklearn.decomposition import PCA
from sklearn.metrics.cluster import contingency_matrix

from ..errors import DegenerateInputError, RejectedInputError, UnresolvedLabelingError
from .models import CLUSTER_METHODS, ClusterModel, SequenceDataset

logger = logging.getLogger(__name__)

KMEANS_RESTARTS = 10


def cluster_embeddings(vectors: np.ndarray, method: str = "agglomerative", seed: int = 0) -> ClusterModel:
    """Partition embeddings into two clusters.

    Args:
        vectors: (N, D) embeddings
        method: ``'agglomerative'`` (Ward linkage) or ``'kmeans'`` (10 restarts)
        seed: k-means initialisation seed

    Raises:
        DegenerateInputError: fewer than two distinct vectors
    """
    if method not in CLUSTER_METHODS:
        raise RejectedInputError(f"Unknown clustering method: {method}")
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise RejectedInputError("Embeddings must be a 2-D array")
    if len(vectors) < 2 or len(np.unique(vectors, axis=0)) < 2:
        raise DegenerateInputError("Clustering needs at least two distinct vectors")

    if method == "agglomerative":
        assignments = AgglomerativeClustering(n_clusters=2, linkage="ward").fit_predict(vectors)
    else:
        assignments = KMeans(n_clusters=2, n_init=KMEANS_RESTARTS, random_state=seed).fit_predict(vectors)
    model = ClusterModel(method, assignments)
    logger.debug(f"{method} clustering of {len(vectors)} vectors: sizes {model.sizes()}")
    return model


def label_clusters(model: ClusterModel, dataset: SequenceDataset) -> ClusterModel:
    """Name the cluster with the lower mean opponent reward ``defect``, the other ``cooperate``.

    Raises:
        DegenerateInputError: a cluster has no members
        UnresolvedLabelingError: both clusters have the same mean opponent reward
    """
    if len(model.assignments) != len(dataset):
        raise RejectedInputError("Cluster assignments do not cover the dataset")
    empty = [cluster for cluster in range(model.k) if not np.any(model.assignments == cluster)]
    if empty:
        raise DegenerateInputError(f"Cluster {empty[0]} has no members; cannot label it")
    means = {
        cluster: float(np.mean(dataset.opponent_reward[model.assignments == cluster]))
        for cluster in range(model.k)
    }
    if np.isclose(means[0], means[1], rtol=0.0, atol=1e-12):
        raise UnresolvedLabelingError(
            f"Both clusters have mean opponent reward {means[0]:.4f}; cannot tell cooperation from defection"
        )
    defect = min(means, key=means.get)
    labels = {cluster: ("defect" if cluster == defect else "cooperate") for cluster in means}
    return ClusterModel(model.method, model.assignments, model.k, labels)


def purity(assignments: np.ndarray, truth: np.ndarray) -> float:
    """Share of points whose cluster's majority ground-truth label is their own."""
    table = contingency_matrix(np.asarray(truth), np.asarray(assignments))
    return float(np.sum(np.amax(table, axis=0)) / np.sum(table))


def agreement(first: np.ndarray, second: np.ndarray) -> float:
    """Fraction of matching assignments, maximised over the two ways to match cluster ids."""
    first, second = np.asarray(first), np.asarray(second)
    same = float(np.mean(first == second))
    return max(same, 1.0 - same)


def project_2d(vectors: np.ndarray) -> np.ndarray:
    """First two principal components of the embeddings."""
    vectors = np.asarray(vectors, dtype=np.float64)
    components = min(2, *vectors.shape)
    projected = PCA(n_components=components).fit_transform(vectors)
    if components < 2:
        projected = np.pad(projected, ((0, 0), (0, 2 - components)))
    return projected


def projection_frame(vectors: np.ndarray, model: ClusterModel, dataset: SequenceDataset) -> pd.DataFrame:
    """Rows of (x, y, cluster, pick_type) for plotting."""
    projected = project_2d(vectors)
    return pd.DataFrame({
        "x": projected[:, 0],
        "y": projected[:, 1],
        "cluster": model.assignments,
        "pick_type": np.where(dataset.own_pick, "own", "other"),
    })


@dataclass
class ClusterReport:
    """Per-agent summary of the clustering stage."""

    agent: str
    method: str
    sizes: Dict[str, int] = field(default_factory=dict)
    purity: float = 0.0
    mean_own_reward: Dict[str, float] = field(default_factory=dict)
    mean_opponent_reward: Dict[str, float] = field(default_factory=dict)
    method_agreement: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def cluster_report(
    model: ClusterModel,
    dataset: SequenceDataset,
    alternative: Optional[ClusterModel] = None,
) -> ClusterReport:
    """Purity, sizes and mean rewards per labeled cluster."""
    if not model.is_labeled:
        raise RejectedInputError("Label the clusters before reporting on them")
    report = ClusterReport(
        agent=dataset.agent,
        method=model.method,
        purity=purity(model.assignments, dataset.own_pick),
    )
    for cluster, label in sorted(model.cluster_labels.items()):
        members = model.assignments == cluster
        report.sizes[label] = int(np.sum(members))
        report.mean_own_reward[label] = float(np.mean(dataset.own_reward[members]))
        report.mean_opponent_reward[label] = float(np.mean(dataset.opponent_reward[members]))
    if alternative is not None:
        report.method_agreement = agreement(model.assignments, alternative.assignments)
    return report
