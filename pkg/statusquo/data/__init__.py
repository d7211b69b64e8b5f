"""Run records, metric files and the run store."""

from .models import DistillConfig, EnvironmentConfig, ExperimentConfig, MetricRecord, RunMetrics
from .cache import RunStore, config_hash
from .metrics import read_metrics, write_manifest, write_metrics, write_summary

__all__ = [
    'DistillConfig',
    'EnvironmentConfig',
    'ExperimentConfig',
    'MetricRecord',
    'RunMetrics',
    'RunStore',
    'config_hash',
    'read_metrics',
    'write_manifest',
    'write_metrics',
    'write_summary',
]
