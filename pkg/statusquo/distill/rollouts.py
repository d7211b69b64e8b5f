"""Random-play data collection for GameDistill."""

import logging
from typing import List

import numpy as np
from scipy.special import softmax

from ..agents.policies import draw
from ..envs.coin import COLORS, MOVES, OBSERVATION_SHAPE, CoinGameBatch
from ..errors import RejectedInputError
from ..nn import NetworkModel, build_network, conv2d, dense, forward
from .models import WINDOW, SequenceDataset

logger = logging.getLogger(__name__)

DEFAULT_BOARDS = 32


def random_move_network(rng: np.random.Generator) -> NetworkModel:
    """Untrained conv actor over the four moves."""
    conv = conv2d(OBSERVATION_SHAPE, 16, kernel_size=3, activation="relu")
    return build_network([conv, dense(conv.output_shape, len(MOVES), "linear")], rng)


def concatenate(agent: str, parts: List[SequenceDataset]) -> SequenceDataset:
    return SequenceDataset(
        agent,
        np.concatenate([p.states for p in parts]),
        np.concatenate([p.actions for p in parts]),
        np.concatenate([p.own_reward for p in parts]),
        np.concatenate([p.opponent_reward for p in parts]),
        np.concatenate([p.coin_color for p in parts]),
        np.concatenate([p.padded for p in parts]),
    )


def collect_rollouts(
    rng: np.random.Generator,
    target_count: int,
    agent: str = "red",
    episode_length: int = 200,
    respawn: str = "coin",
    boards: int = DEFAULT_BOARDS,
) -> SequenceDataset:
    """Harvest ``target_count`` pick windows for one agent from random play.

    Both seats play randomly initialised move networks. Whenever ``agent``
    picks a coin alone, its last three observations and moves are kept.
    Windows that reach back before the episode start repeat the earliest
    observation and are flagged as padded. Steps where both agents pick
    are skipped.

    Args:
        rng: Stream for network initialisation, moves and the board
        target_count: Number of sequences to return
        agent: ``'red'`` or ``'blue'``
        episode_length: Steps per episode
        respawn: Coin Game respawn mode
        boards: Episodes played in lockstep

    Returns:
        SequenceDataset with exactly ``target_count`` rows
    """
    if target_count < 1:
        raise RejectedInputError("target_count must be at least 1")
    if agent not in COLORS:
        raise RejectedInputError(f"Unknown agent color: {agent}")

    players = {color: random_move_network(rng) for color in COLORS}
    me = COLORS.index(agent)
    parts: List[SequenceDataset] = []
    collected = skipped = episodes = 0

    while collected < target_count:
        board = CoinGameBatch(boards, respawn)
        board.reset(rng)
        window = np.zeros((boards, WINDOW, *OBSERVATION_SHAPE))
        window_moves = np.zeros((boards, WINDOW), dtype=np.int64)
        for t in range(episode_length):
            observations = {color: board.observe(color) for color in COLORS}
            moves = {
                color: draw(softmax(forward(players[color], observations[color]), axis=1), rng)
                for color in COLORS
            }
            if t == 0:
                window[:] = observations[agent][:, np.newaxis]
                window_moves[:] = moves[agent][:, np.newaxis]
            else:
                window = np.roll(window, -1, axis=1)
                window_moves = np.roll(window_moves, -1, axis=1)
                window[:, -1] = observations[agent]
                window_moves[:, -1] = moves[agent]

            result = board.step(moves["red"], moves["blue"], rng)
            mine, theirs = (
                (result.red_picked, result.blue_picked) if me == 0
                else (result.blue_picked, result.red_picked)
            )
            skipped += int(np.sum(mine & theirs))
            rows = np.flatnonzero(mine & ~theirs)
            if len(rows):
                parts.append(SequenceDataset(
                    agent,
                    window[rows].copy(),
                    window_moves[rows].copy(),
                    result.rewards[rows, me],
                    result.rewards[rows, 1 - me],
                    result.picked_color[rows],
                    np.full(len(rows), t < WINDOW - 1),
                ))
                collected += len(rows)
        episodes += 1

    if skipped:
        logger.warning(f"Skipped {skipped} simultaneous picks while collecting for {agent}")
    dataset = concatenate(agent, parts).subset(np.arange(target_count))
    logger.info(
        f"Collected {len(dataset)} {agent} sequences from {episodes * boards} episodes "
        f"({int(dataset.padded.sum())} padded, {int(dataset.own_pick.sum())} own-color picks)"
    )
    return dataset
