"""Data models for learners.

Defines the SQLoss hyper-parameters and the per-agent view of a batch of
episodes that an update consumes.
"""

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..errors import DomainError, RejectedInputError

LEARNER_KINDS = ("sl", "sq", "always_cooperate", "always_defect", "uniform_random")


@dataclass(frozen=True)
class SQConfig:
    """Hyper-parameters of the Selfish and Status-Quo learners."""

    z: int = 10
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.96
    actor_step: float = 0.005
    critic_step: float = 1.0
    batch_size: int = 200

    def __post_init__(self):
        """Validate ranges."""
        if self.z < 1:
            raise DomainError("z must be at least 1")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("alpha and beta must be non-negative")
        if not 0.0 <= self.gamma < 1.0:
            raise DomainError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.actor_step <= 0 or self.critic_step <= 0:
            raise DomainError("step sizes must be positive")
        if self.batch_size < 1:
            raise DomainError("batch_size must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class AgentView:
    """One agent's side of a batch of episodes.

    Attributes:
        inputs: (B, L, *input_shape) actor/critic inputs at each step, own perspective
        actions: (B, L) the agent's own actions
        rewards: (B, L) the agent's own rewards
        decision_mask: (B, L) True where the agent chose the action
    """

    inputs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    decision_mask: Optional[np.ndarray] = None

    def __post_init__(self):
        """Validate aligned (batch, length) axes."""
        self.actions = np.asarray(self.actions, dtype=np.int64)
        self.rewards = np.asarray(self.rewards, dtype=np.float64)
        if self.actions.ndim == 1:
            self.inputs = np.asarray(self.inputs, dtype=np.float64)[np.newaxis]
            self.actions = self.actions[np.newaxis]
            self.rewards = self.rewards[np.newaxis]
            if self.decision_mask is not None:
                self.decision_mask = np.asarray(self.decision_mask)[np.newaxis]
        if self.decision_mask is None:
            self.decision_mask = np.ones(self.actions.shape, dtype=bool)
        self.decision_mask = np.asarray(self.decision_mask, dtype=bool)
        shape = self.actions.shape
        if self.rewards.shape != shape or self.decision_mask.shape != shape or self.inputs.shape[:2] != shape:
            raise RejectedInputError("AgentView fields must share the (batch, length) axes")

    @property
    def batch_size(self) -> int:
        return self.actions.shape[0]

    @property
    def length(self) -> int:
        return self.actions.shape[1]

    @property
    def flat_inputs(self) -> np.ndarray:
        return self.inputs.reshape(-1, *self.inputs.shape[2:])

    @property
    def previous_actions(self) -> np.ndarray:
        """u_{t-1} aligned with step t; step 0 repeats u_0 and is masked by callers."""
        shifted = self.actions.copy()
        shifted[:, 1:] = self.actions[:, :-1]
        return shifted
