"""Selfish and Status-Quo learners.

Training loops live in ``statusquo.agents.training``.
"""

from .learner import Learner, UpdateStats, build_learner, combined_update
from .models import LEARNER_KINDS, AgentView, SQConfig
from .policies import FixedPolicy, NetworkPolicy, fixed_policy
from .returns import discounted_returns, imagined_returns, sample_kappa

__all__ = [
    'LEARNER_KINDS',
    'AgentView',
    'FixedPolicy',
    'Learner',
    'NetworkPolicy',
    'SQConfig',
    'UpdateStats',
    'build_learner',
    'combined_update',
    'discounted_returns',
    'fixed_policy',
    'imagined_returns',
    'sample_kappa',
]
