"""Selfish and Status-Quo actor-critic learners."""

import hashlib
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import RejectedInputError
from ..nn import NetworkModel, backward, loss_and_gradient, make_optimizer, optimizer_step
from ..nn.optim import OptimizerState
from .gradients import critic_values, policy_gradient, sq_policy_gradient
from .models import LEARNER_KINDS, AgentView, SQConfig
from .policies import (
    FIXED_KINDS,
    FixedPolicy,
    NetworkPolicy,
    Policy,
    coin_actor,
    coin_critic,
    matrix_actor,
    matrix_critic,
)
from .returns import discounted_returns, imagined_returns, sample_kappa

logger = logging.getLogger(__name__)


@dataclass
class UpdateStats:
    """Diagnostics of one combined update."""

    actor_gradient_norm: float
    sq_gradient_norm: float
    critic_loss: float


def critic_step(
    critic: NetworkModel,
    optimizer: OptimizerState,
    view: AgentView,
    values: np.ndarray,
    returns: np.ndarray,
    gamma: float,
) -> Tuple[NetworkModel, OptimizerState, float]:
    """Descend half the gamma^t-weighted mean squared error between b(s_t) and R_t.

    Step t carries weight gamma^t, the same discount as the policy-gradient
    terms the baseline is subtracted from.
    """
    weights = np.broadcast_to(gamma ** np.arange(view.length), returns.shape)
    loss, grad = loss_and_gradient(values.ravel(), returns.ravel(), "mse", weights.ravel())
    parameter_grad = backward(critic, view.flat_inputs, 0.5 * grad[:, None])
    critic, optimizer = optimizer_step(critic, optimizer, parameter_grad, "descend")
    return critic, optimizer, loss


def combined_update(
    policy: NetworkPolicy,
    critic: NetworkModel,
    view: AgentView,
    config: SQConfig,
    kappa_rng: Optional[np.random.Generator] = None,
    actor_optimizer: Optional[OptimizerState] = None,
    critic_optimizer: Optional[OptimizerState] = None,
):
    """One actor-critic update with the status-quo term.

    actor += actor_step * (alpha * policy_gradient + beta * sq_policy_gradient);
    the critic descends its discount-weighted regression error on the actual
    returns. With beta = 0 the status-quo term is never computed and no kappa
    is drawn.

    Returns:
        (policy, critic, actor optimizer, critic optimizer, UpdateStats)
    """
    actor_optimizer = actor_optimizer or make_optimizer("sgd", config.actor_step, policy.actor)
    critic_optimizer = critic_optimizer or make_optimizer("sgd", config.critic_step, critic)

    returns = discounted_returns(view.rewards, config.gamma)
    baseline = critic_values(critic, view)

    gradient = config.alpha * policy_gradient(view, returns, policy, baseline, config.gamma)
    sq_norm = 0.0
    if config.beta > 0:
        if kappa_rng is None:
            raise RejectedInputError("A status-quo update needs a kappa generator")
        kappa = sample_kappa(kappa_rng, config.z, view.rewards.shape)
        imagined = imagined_returns(view.rewards, kappa, config.gamma)
        sq_gradient = sq_policy_gradient(view, imagined, policy, baseline, config.gamma)
        sq_norm = float(np.linalg.norm(sq_gradient))
        gradient = gradient + config.beta * sq_gradient

    actor, actor_optimizer = optimizer_step(policy.actor, actor_optimizer, gradient, "ascend")
    critic, critic_optimizer, critic_loss = critic_step(
        critic, critic_optimizer, view, baseline, returns, config.gamma
    )
    stats = UpdateStats(float(np.linalg.norm(gradient)), sq_norm, critic_loss)
    return policy.with_actor(actor), critic, actor_optimizer, critic_optimizer, stats


class Learner:
    """One seat at the table: a policy plus, when trainable, its critic and update rule.

    A learner's update reads only its own AgentView; nothing of the other seat.
    """

    def __init__(
        self,
        kind: str,
        policy: Policy,
        critic: Optional[NetworkModel],
        config: SQConfig,
        kappa_rng: Optional[np.random.Generator] = None,
    ):
        if kind not in LEARNER_KINDS:
            raise RejectedInputError(f"Unknown learner kind: {kind}")
        self.kind = kind
        self.policy = policy
        self.critic = critic
        # The Selfish Learner is the status-quo learner with the imagined term switched off.
        self.config = SQConfig(**{**config.to_dict(), "beta": 0.0}) if kind == "sl" else config
        self.kappa_rng = kappa_rng
        self.last_stats: Optional[UpdateStats] = None
        if self.trainable:
            self.actor_optimizer = make_optimizer("sgd", self.config.actor_step, policy.actor)
            self.critic_optimizer = make_optimizer("sgd", self.config.critic_step, critic)

    @property
    def trainable(self) -> bool:
        return self.policy.trainable

    def act(self, inputs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.policy.act(inputs, rng)

    def update(self, view: AgentView) -> Optional[UpdateStats]:
        """Apply the learner's own update rule; a no-op for fixed policies."""
        if not self.trainable:
            return None
        (
            self.policy,
            self.critic,
            self.actor_optimizer,
            self.critic_optimizer,
            self.last_stats,
        ) = combined_update(
            self.policy,
            self.critic,
            view,
            self.config,
            self.kappa_rng,
            self.actor_optimizer,
            self.critic_optimizer,
        )
        logger.debug(
            f"{self.kind} update: |g|={self.last_stats.actor_gradient_norm:.4f} "
            f"|g_sq|={self.last_stats.sq_gradient_norm:.4f} critic_loss={self.last_stats.critic_loss:.4f}"
        )
        return self.last_stats

    def parameters(self) -> np.ndarray:
        if not self.trainable:
            return np.zeros(0)
        return np.concatenate([self.policy.actor.parameters, self.critic.parameters])

    def parameter_digest(self) -> str:
        """SHA-256 of all trainable parameters."""
        return hashlib.sha256(self.parameters().tobytes()).hexdigest()


def build_learner(
    kind: str,
    environment: str,
    config: SQConfig,
    init_rng: np.random.Generator,
    kappa_rng: Optional[np.random.Generator] = None,
) -> Learner:
    """Create a learner for a matrix game (``environment='matrix'``) or the Coin Game."""
    if kind in FIXED_KINDS:
        return Learner(kind, FixedPolicy(kind), None, config)
    if environment == "matrix":
        policy = NetworkPolicy(matrix_actor(init_rng), head="sigmoid")
        critic = matrix_critic(init_rng)
    elif environment == "coin":
        policy = NetworkPolicy(coin_actor(init_rng), head="softmax")
        critic = coin_critic(init_rng)
    else:
        raise RejectedInputError(f"Unknown environment family: {environment}")
    return Learner(kind, policy, critic, config, kappa_rng)
