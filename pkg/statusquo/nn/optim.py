"""SGD and Adam over a model's flat parameter vector."""

from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from ..errors import DomainError, RejectedInputError
from .network import NetworkModel

OPTIMIZER_KINDS = ("sgd", "adam")
DIRECTIONS = ("ascend", "descend")


@dataclass
class OptimizerState:
    """Optimizer hyper-parameters and running state."""

    kind: str
    step_size: float
    adam_moments: Optional[Tuple[np.ndarray, np.ndarray]] = None
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0

    def __post_init__(self):
        if self.kind not in OPTIMIZER_KINDS:
            raise RejectedInputError(f"Unknown optimizer kind: {self.kind}")
        if self.step_size <= 0:
            raise DomainError("step_size must be positive")


def make_optimizer(kind: str, step_size: float, model: NetworkModel, **kwargs) -> OptimizerState:
    """Fresh optimizer state sized for ``model``."""
    moments = None
    if kind == "adam":
        moments = (np.zeros(model.parameter_count), np.zeros(model.parameter_count))
    return OptimizerState(kind=kind, step_size=step_size, adam_moments=moments, **kwargs)


def optimizer_step(
    model: NetworkModel,
    state: OptimizerState,
    gradient: np.ndarray,
    direction: str = "descend",
) -> Tuple[NetworkModel, OptimizerState]:
    """Apply one update.

    Args:
        model: Model whose parameters are updated
        state: Optimizer state
        gradient: Flat gradient, same length as the parameters
        direction: ``'ascend'`` adds the step, ``'descend'`` subtracts it

    Returns:
        (updated model, updated state); inputs are left untouched
    """
    gradient = np.asarray(gradient, dtype=np.float64)
    if gradient.shape != (model.parameter_count,):
        raise RejectedInputError(
            f"Gradient length {gradient.shape} does not match {model.parameter_count} parameters"
        )
    if direction not in DIRECTIONS:
        raise RejectedInputError(f"Unknown direction: {direction}")
    sign = 1.0 if direction == "ascend" else -1.0
    step_count = state.step_count + 1

    if state.kind == "sgd":
        delta = state.step_size * gradient
        return (
            model.with_parameters(model.parameters + sign * delta),
            replace(state, step_count=step_count),
        )

    m, v = state.adam_moments
    if m.shape != gradient.shape:
        raise RejectedInputError("Adam moments do not match the parameter count")
    m = state.beta1 * m + (1.0 - state.beta1) * gradient
    v = state.beta2 * v + (1.0 - state.beta2) * gradient ** 2
    m_hat = m / (1.0 - state.beta1 ** step_count)
    v_hat = v / (1.0 - state.beta2 ** step_count)
    delta = state.step_size * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return (
        model.with_parameters(model.parameters + sign * delta),
        replace(state, adam_moments=(m, v), step_count=step_count),
    )
