import numpy as np
import pytest
from scipy.stats import chisquare

from statusquo.agents import discounted_returns, imagined_returns, sample_kappa
from statusquo.errors import DomainError, RejectedInputError


def imagined_by_summation(rewards, kappa, gamma):
    """Build each imagined episode explicitly and add up its discounted rewards."""
    length = len(rewards)
    out = np.zeros(length)
    for t in range(length):
        if t == 0:
            episode = list(rewards)
        else:
            episode = [rewards[t - 1]] * int(kappa[t]) + list(rewards[t:])
        out[t] = sum(gamma ** i * r for i, r in enumerate(episode))
    return out


def test_discounted_returns_example():
    np.testing.assert_allclose(discounted_returns(np.array([1.0, 1.0, 1.0]), 0.5), [1.75, 1.5, 1.0])


def test_discounted_returns_batched():
    rewards = np.array([[1.0, 0.0], [0.0, 2.0]])
    np.testing.assert_allclose(discounted_returns(rewards, 0.9), [[1.0, 0.0], [1.8, 2.0]])


@pytest.mark.parametrize("gamma", [0.0, 0.5, 0.9, 0.96])
def test_imagined_returns_match_summation(gamma):
    gen = np.random.default_rng(int(gamma * 100))
    for _ in range(20):
        length = int(gen.integers(2, 30))
        rewards = gen.normal(size=length)
        kappa = gen.integers(1, 11, size=length)
        np.testing.assert_allclose(
            imagined_returns(rewards, kappa, gamma),
            imagined_by_summation(rewards, kappa, gamma),
            rtol=0.0,
            atol=1e-10,
        )


def test_imagined_with_kappa_one():
    rewards = np.array([-1.0, -3.0, 0.0])
    imagined = imagined_returns(rewards, np.ones(3, dtype=int), 0.5)
    assert imagined[1] == pytest.approx(-1.0 + 0.5 * (-3.0 + 0.5 * 0.0))
    assert imagined[2] == pytest.approx(-3.0 + 0.5 * 0.0)


def test_kappa_is_uniform():
    gen = np.random.default_rng(2024)
    draws = sample_kappa(gen, 10, 100_000)
    assert draws.min() == 1 and draws.max() == 10
    counts = np.bincount(draws, minlength=11)[1:]
    assert chisquare(counts).pvalue > 0.001


def test_z_one_collapses_kappa():
    draws = sample_kappa(np.random.default_rng(0), 1, (4, 7))
    assert np.all(draws == 1)


def test_kappa_rejects_zero_z():
    with pytest.raises(DomainError):
        sample_kappa(np.random.default_rng(0), 0, 3)


def test_imagined_rejects_misaligned_kappa():
    with pytest.raises(RejectedInputError):
        imagined_returns(np.zeros(4), np.ones(3, dtype=int), 0.9)


def test_imagined_rejects_gamma_one():
    with pytest.raises(DomainError):
        imagined_returns(np.zeros(4), np.ones(4, dtype=int), 1.0)
