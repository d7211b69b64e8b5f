"""Actual and imagined (status-quo) discounted returns."""

import numpy as np

from ..errors import DomainError, RejectedInputError


def _check_gamma(gamma: float):
    if not 0.0 <= gamma < 1.0:
        raise DomainError(f"gamma must lie in [0, 1), got {gamma}")


def discounted_returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """R_t = sum_{l>=t} gamma^(l-t) r_l along the last axis."""
    _check_gamma(gamma)
    rewards = np.asarray(rewards, dtype=np.float64)
    returns = np.zeros_like(rewards)
    running = np.zeros(rewards.shape[:-1])
    for t in reversed(range(rewards.shape[-1])):
        running = rewards[..., t] + gamma * running
        returns[..., t] = running
    return returns


def sample_kappa(rng: np.random.Generator, z: int, shape) -> np.ndarray:
    """Imagined repetition lengths, discrete uniform on {1..z}."""
    if z < 1:
        raise DomainError("z must be at least 1")
    return rng.integers(1, z + 1, size=shape)


def imagined_returns(rewards: np.ndarray, kappa: np.ndarray, gamma: float) -> np.ndarray:
    """Status-quo returns along the last axis.

    R_hat_t = ((1 - gamma^k) / (1 - gamma)) * r_{t-1} + gamma^k * R_t, the return
    of an episode where the previous step's reward repeats k_t times before the
    actual tail from t. Step 0 has no previous step and is given R_0; the
    status-quo gradient ignores it.
    """
    _check_gamma(gamma)
    rewards = np.asarray(rewards, dtype=np.float64)
    kappa = np.asarray(kappa)
    if kappa.shape != rewards.shape:
        raise RejectedInputError(f"kappa shape {kappa.shape} does not match rewards {rewards.shape}")
    if np.any(kappa[..., 1:] < 1):
        raise DomainError("kappa must be at least 1")

    returns = discounted_returns(rewards, gamma)
    imagined = returns.copy()
    k = kappa[..., 1:]
    repeat = gamma ** k
    imagined[..., 1:] = (1.0 - repeat) / (1.0 - gamma) * rewards[..., :-1] + repeat * returns[..., 1:]
    return imagined
