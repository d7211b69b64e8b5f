"""GameDistill: extracting cooperative and selfish oracles from random play."""

from .clustering import ClusterReport, agreement, cluster_embeddings, label_clusters, purity
from .encoder import EncoderModel, embed, train_encoder
from .models import ClusterModel, OracleModel, SequenceDataset, StateSequence
from .oracle import OraclePair, SoloReport, evaluate_oracle_solo, train_oracle
from .pipeline import DistillResult, run_gamedistill
from .rollouts import collect_rollouts
from .storage import load_dataset, load_model, save_dataset, save_model

__all__ = [
    'ClusterModel',
    'ClusterReport',
    'DistillResult',
    'EncoderModel',
    'OracleModel',
    'OraclePair',
    'SequenceDataset',
    'SoloReport',
    'StateSequence',
    'agreement',
    'cluster_embeddings',
    'collect_rollouts',
    'embed',
    'evaluate_oracle_solo',
    'label_clusters',
    'load_dataset',
    'load_model',
    'purity',
    'run_gamedistill',
    'save_dataset',
    'save_model',
    'train_encoder',
    'train_oracle',
]
