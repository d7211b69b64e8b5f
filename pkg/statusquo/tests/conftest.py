"""Shared fixtures and the ``--runslow`` switch for training-scale checks."""

import numpy as np
import pytest

from statusquo.distill.models import SequenceDataset
from statusquo.envs.coin import OBSERVATION_SHAPE


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run training-scale acceptance tests"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: training-scale check, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_dataset(agent: str, coin_color, opponent_reward, seed: int = 0) -> SequenceDataset:
    """Small dataset with random one-hot windows and the given labels."""
    gen = np.random.default_rng(seed)
    n = len(coin_color)
    states = np.zeros((n, 3, *OBSERVATION_SHAPE))
    cells = gen.integers(0, 9, size=(n, 3, 3))
    for channel in range(3):
        rows, cols = np.divmod(cells[..., channel], 3)
        idx = np.indices((n, 3))
        states[idx[0], idx[1], rows, cols, channel] = 1.0
    return SequenceDataset(
        agent=agent,
        states=states,
        actions=gen.integers(0, 4, size=(n, 3)),
        own_reward=np.ones(n),
        opponent_reward=np.asarray(opponent_reward, dtype=np.float64),
        coin_color=np.asarray(coin_color),
    )


@pytest.fixture
def small_dataset():
    colors = [0, 1] * 10
    opponent = [0.0 if c == 0 else -2.0 for c in colors]
    return make_dataset("red", colors, opponent)
