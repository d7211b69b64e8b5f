"""Policy-gradient estimators for actual and imagined returns."""

import logging

import numpy as np

from ..errors import RejectedInputError
from ..nn import NetworkModel, backward, forward
from .models import AgentView
from .policies import NetworkPolicy

logger = logging.getLogger(__name__)


def critic_values(critic: NetworkModel, view: AgentView) -> np.ndarray:
    """b(s_t) for every step, shaped (B, L)."""
    return forward(critic, view.flat_inputs)[:, 0].reshape(view.actions.shape)


def _weighted_log_prob_gradient(
    policy: NetworkPolicy,
    view: AgentView,
    actions: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """sum over steps of weights * grad log pi(actions | inputs), averaged over the batch."""
    inputs = view.flat_inputs
    logit_grad = policy.log_prob_logit_gradient(inputs, actions.ravel())
    logit_grad = logit_grad * weights.reshape(-1, 1)
    return backward(policy.actor, inputs, logit_grad) / view.batch_size


def policy_gradient(
    view: AgentView,
    returns: np.ndarray,
    policy: NetworkPolicy,
    baseline: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """Estimate of grad E[R_0]: sum_t grad log pi(u_t|s_t) gamma^t (R_t - b(s_t))."""
    if returns.shape != view.actions.shape or baseline.shape != view.actions.shape:
        raise RejectedInputError("returns and baseline must align with the trajectory")
    discount = gamma ** np.arange(view.length)
    weights = discount * (returns - baseline) * view.decision_mask
    return _weighted_log_prob_gradient(policy, view, view.actions, weights)


def sq_policy_gradient(
    view: AgentView,
    imagined: np.ndarray,
    policy: NetworkPolicy,
    baseline: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """Status-quo estimate: sum_{t>=1} grad log pi(u_{t-1}|s_t) gamma^t (R_hat_t - b(s_t)).

    The log-probability is of the previous action at the current state, so the
    estimate reinforces (or discourages) repeating the status quo.
    """
    if imagined.shape != view.actions.shape or baseline.shape != view.actions.shape:
        raise RejectedInputError("imagined returns and baseline must align with the trajectory")
    discount = gamma ** np.arange(view.length)
    weights = discount * (imagined - baseline) * view.decision_mask
    weights[:, 0] = 0.0
    return _weighted_log_prob_gradient(policy, view, view.previous_actions, weights)
