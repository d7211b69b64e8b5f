"""Loss functions with gradients w.r.t. the prediction."""

from typing import Optional, Tuple

import numpy as np

from ..errors import DomainError, RejectedInputError, check_shape

LOSS_KINDS = ("bce", "mse")

# Keeps saturated sigmoid outputs inside the open interval during training.
PROBABILITY_CLIP = 1e-7


def loss_and_gradient(
    prediction,
    target,
    loss_kind: str,
    weights: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray]:
    """Mean loss over all elements and its gradient.

    Args:
        prediction: Predicted values
        target: Targets, same shape as ``prediction``
        loss_kind: ``'mse'`` (mean of (p - t)^2) or ``'bce'`` (mean binary cross-entropy)
        weights: Optional non-negative per-element weights; the mean becomes
            ``sum(w * loss) / sum(w)`` and zero-weight elements drop out

    Returns:
        (loss value, gradient w.r.t. prediction)

    Raises:
        DomainError: bce with a prediction outside (0, 1)
    """
    p = np.asarray(prediction, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    check_shape(t.shape, p.shape, what="target")
    if loss_kind not in LOSS_KINDS:
        raise RejectedInputError(f"Unknown loss kind: {loss_kind}")
    if weights is None:
        w = np.ones_like(p)
    else:
        w = np.asarray(weights, dtype=np.float64)
        check_shape(w.shape, p.shape, what="weights")
        if np.any(w < 0.0):
            raise RejectedInputError("Loss weights must be non-negative")
    total = float(np.sum(w))
    if total <= 0.0:
        return 0.0, np.zeros_like(p)

    if loss_kind == "mse":
        diff = p - t
        return float(np.sum(w * diff ** 2) / total), 2.0 * w * diff / total

    active = w > 0
    if np.any(p[active] <= 0.0) or np.any(p[active] >= 1.0):
        raise DomainError("bce predictions must lie strictly inside (0, 1)")
    # Masked elements may hold any prediction; give them a safe stand-in.
    safe = np.where(active, p, 0.5)
    loss = -np.sum(w * (t * np.log(safe) + (1.0 - t) * np.log1p(-safe))) / total
    grad = w * (safe - t) / (safe * (1.0 - safe)) / total
    return float(loss), grad


def clip_probabilities(p: np.ndarray) -> np.ndarray:
    return np.clip(p, PROBABILITY_CLIP, 1.0 - PROBABILITY_CLIP)


def l2_penalty(parameters: np.ndarray, weight: float) -> Tuple[float, np.ndarray]:
    """``weight * ||theta||^2`` and its gradient."""
    return float(weight * np.dot(parameters, parameters)), 2.0 * weight * parameters
