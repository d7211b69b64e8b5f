"""Experiment orchestration."""

from .runner import ExperimentResult, run_distill, run_experiment, run_seeds

__all__ = [
    'ExperimentResult',
    'run_distill',
    'run_experiment',
    'run_seeds',
]
