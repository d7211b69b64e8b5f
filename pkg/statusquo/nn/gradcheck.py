"""Central finite-difference verification of ``backward``."""

import logging
from typing import Optional

import numpy as np

from .network import NetworkModel, backward, forward

logger = logging.getLogger(__name__)

FD_STEP = 1e-5


def _objective(model: NetworkModel, parameters: np.ndarray, x: np.ndarray, g: np.ndarray) -> float:
    return float(np.sum(forward(model.with_parameters(parameters), x) * g))


def finite_difference(
    model: NetworkModel, x: np.ndarray, output_gradient: np.ndarray, index: int, step: float = FD_STEP
) -> float:
    """Central difference of ``sum(forward(x) * output_gradient)`` along one parameter."""
    plus = model.parameters.copy()
    minus = model.parameters.copy()
    plus[index] += step
    minus[index] -= step
    return (
        _objective(model, plus, x, output_gradient) - _objective(model, minus, x, output_gradient)
    ) / (2.0 * step)


def relative_error(a: float, b: float, floor: float = 1e-8) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def check_gradients(
    model: NetworkModel,
    x: np.ndarray,
    output_gradient: np.ndarray,
    rng: np.random.Generator,
    samples: int = 10,
    step: float = FD_STEP,
    indices: Optional[np.ndarray] = None,
) -> float:
    """Compare ``backward`` with finite differences at random parameter indices.

    Returns:
        The largest relative error seen over the sampled parameters
    """
    analytic = backward(model, x, output_gradient)
    if indices is None:
        indices = rng.choice(model.parameter_count, size=min(samples, model.parameter_count), replace=False)
    worst = 0.0
    for index in indices:
        numeric = finite_difference(model, x, output_gradient, int(index), step)
        worst = max(worst, relative_error(analytic[index], numeric))
    logger.debug(f"Gradient check over {len(indices)} parameters: max relative error {worst:.3e}")
    return worst
