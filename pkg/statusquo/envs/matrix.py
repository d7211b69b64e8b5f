"""Iterated 2x2 matrix games (IPD, IMP, ISH) and the NDR metric."""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from ..errors import DomainError, EpisodeCompleteError, RejectedInputError
from .models import ACTION_LABELS, INITIAL_STATE, GameKind, MatrixState, PayoffMatrix, Trajectory

logger = logging.getLogger(__name__)

DEFAULT_EPISODE_LENGTH = 200

PAYOFFS = {
    GameKind.PRISONERS_DILEMMA: PayoffMatrix(GameKind.PRISONERS_DILEMMA, {
        (0, 0): (-1.0, -1.0), (0, 1): (-3.0, 0.0),
        (1, 0): (0.0, -3.0), (1, 1): (-2.0, -2.0),
    }),
    GameKind.MATCHING_PENNIES: PayoffMatrix(GameKind.MATCHING_PENNIES, {
        (0, 0): (1.0, -1.0), (0, 1): (-1.0, 1.0),
        (1, 0): (-1.0, 1.0), (1, 1): (1.0, -1.0),
    }),
    GameKind.STAG_HUNT: PayoffMatrix(GameKind.STAG_HUNT, {
        (0, 0): (0.0, 0.0), (0, 1): (-4.0, -1.0),
        (1, 0): (-1.0, -4.0), (1, 1): (-3.0, -3.0),
    }),
}

# Agent 2 sees the previous joint action as (own, other): CD and DC trade places.
PERSPECTIVE_SWAP = np.array([0, 1, 3, 2, 4])

Action = Union[int, str]


def action_index(kind: GameKind, action: Action) -> int:
    """Map an action label ('C', 'D', 'H', 'T') or index to 0/1."""
    if isinstance(action, (int, np.integer)) and not isinstance(action, bool):
        if action in (0, 1):
            return int(action)
    elif isinstance(action, str):
        labels = ACTION_LABELS[kind]
        if action.upper() in labels:
            return labels.index(action.upper())
    raise RejectedInputError(f"Invalid action {action!r} for {kind.value}")


def payoff(kind: GameKind, joint: Tuple[Action, Action]) -> Tuple[float, float]:
    """Look up the rewards of one joint action."""
    a1, a2 = (action_index(kind, a) for a in joint)
    return PAYOFFS[kind].rewards[(a1, a2)]


def state_index(a1, a2):
    """Environment-order state slot after joint action (a1, a2); works on arrays."""
    return 1 + 2 * np.asarray(a1) + np.asarray(a2)


def perspective(states: np.ndarray, agent: int) -> np.ndarray:
    """State slots as seen by ``agent`` (0 = row player, 1 = column player)."""
    states = np.asarray(states)
    return states if agent == 0 else PERSPECTIVE_SWAP[states]


@dataclass
class MatrixStepResult:
    """Per-game outcome of one batched step."""

    joint_actions: np.ndarray  # (N, 2) actions actually played
    rewards: np.ndarray        # (N, 2) row, column
    states: np.ndarray         # (N,) state slot after the step


class MatrixGameBatch:
    """N iterated matrix games stepped together.

    With ``stationarity`` eta > 1 the environment only accepts new actions at
    steps t with t % eta == 0 and repeats the previous joint action otherwise.
    """

    def __init__(
        self,
        kind: GameKind,
        size: int,
        episode_length: int = DEFAULT_EPISODE_LENGTH,
        stationarity: int = 1,
    ):
        if size < 1:
            raise RejectedInputError("A batch needs at least one game")
        if episode_length < 1:
            raise RejectedInputError("episode_length must be at least 1")
        if stationarity < 1:
            raise RejectedInputError("stationarity must be at least 1")
        self.kind = kind
        self.size = size
        self.episode_length = episode_length
        self.stationarity = stationarity
        self.table = PAYOFFS[kind].as_array()
        self.reset()

    def reset(self) -> np.ndarray:
        self.t = 0
        self.states = np.full(self.size, INITIAL_STATE, dtype=np.int64)
        self._history = []
        return self.states.copy()

    @property
    def finished(self) -> bool:
        return self.t >= self.episode_length

    def is_decision_step(self, t: int) -> bool:
        return t % self.stationarity == 0

    def decision_mask(self) -> np.ndarray:
        return np.arange(self.episode_length) % self.stationarity == 0

    def step(self, row_actions: np.ndarray, column_actions: np.ndarray) -> MatrixStepResult:
        """Play one joint action per game.

        Off decision steps the previous joint action is replayed and the
        given actions are ignored.

        Raises:
            EpisodeCompleteError: the episodes already have ``episode_length`` steps
        """
        if self.finished:
            raise EpisodeCompleteError(f"Episode finished after {self.episode_length} steps")
        joint = np.stack([np.asarray(row_actions), np.asarray(column_actions)], axis=1).astype(np.int64)
        if joint.shape != (self.size, 2):
            raise RejectedInputError("One action per game and player is required")
        if np.any((joint < 0) | (joint > 1)):
            raise RejectedInputError("Matrix-game actions must be 0 or 1")
        if self._history and not self.is_decision_step(self.t):
            joint = self._history[-1][1]

        rewards = self.table[joint[:, 0], joint[:, 1]]
        self._history.append((self.states, joint, rewards))
        self.states = state_index(joint[:, 0], joint[:, 1])
        self.t += 1
        return MatrixStepResult(joint, rewards, self.states)

    def trajectory(self) -> Trajectory:
        """Everything played since the last reset, one row per game."""
        if not self._history:
            raise RejectedInputError("No steps played since the last reset")
        states, joints, rewards = zip(*self._history)
        return Trajectory(
            self.kind,
            np.stack(states, axis=1),
            np.stack(joints, axis=1),
            np.stack(rewards, axis=1),
            self.decision_mask()[: self.t],
        )


class MatrixGame:
    """A single iterated matrix game on top of a one-game batch."""

    def __init__(
        self,
        kind: GameKind,
        episode_length: int = DEFAULT_EPISODE_LENGTH,
        stationarity: int = 1,
    ):
        self.kind = kind
        self.payoffs = PAYOFFS[kind]
        self._board = MatrixGameBatch(kind, 1, episode_length, stationarity)
        self.reset()

    @property
    def episode_length(self) -> int:
        return self._board.episode_length

    @property
    def stationarity(self) -> int:
        return self._board.stationarity

    @property
    def t(self) -> int:
        return self._board.t

    @property
    def finished(self) -> bool:
        return self._board.finished

    def reset(self) -> MatrixState:
        self._board.reset()
        self.state = MatrixState()
        return self.state

    def is_decision_step(self, t: int) -> bool:
        return self._board.is_decision_step(t)

    def step(self, joint: Tuple[Action, Action]) -> Tuple[MatrixState, Tuple[float, float]]:
        """Play one joint action.

        Returns:
            (next state, (row reward, column reward))

        Raises:
            EpisodeCompleteError: the episode already has ``episode_length`` steps
        """
        if self.finished:
            raise EpisodeCompleteError(f"Episode finished after {self.episode_length} steps")
        a1, a2 = (action_index(self.kind, a) for a in joint)
        result = self._board.step(np.array([a1]), np.array([a2]))
        self.state = MatrixState(tuple(int(a) for a in result.joint_actions[0]))
        return self.state, tuple(float(r) for r in result.rewards[0])

    def trajectory(self) -> Trajectory:
        """This episode as a one-dimensional Trajectory."""
        batch = self._board.trajectory()
        return Trajectory(
            self.kind, batch.states[0], batch.joint_actions[0], batch.rewards[0], batch.decision_mask
        )


def _check_gamma(gamma: float):
    if not 0.0 <= gamma < 1.0:
        raise DomainError(f"gamma must lie in [0, 1), got {gamma}")


def discount_weights(length: int, gamma: float) -> np.ndarray:
    return gamma ** np.arange(length)


def ndr(rewards: Sequence[float], gamma: float) -> float:
    """Normalized discounted reward (1 - gamma) * sum_t gamma^t r_t."""
    _check_gamma(gamma)
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.ndim != 1 or rewards.size == 0:
        raise RejectedInputError("ndr needs a nonempty reward list")
    return float((1.0 - gamma) * np.dot(discount_weights(len(rewards), gamma), rewards))


def batch_ndr(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """NDR along the last axis of a reward array."""
    _check_gamma(gamma)
    rewards = np.asarray(rewards, dtype=np.float64)
    return (1.0 - gamma) * rewards @ discount_weights(rewards.shape[-1], gamma)
