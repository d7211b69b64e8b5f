"""Data models for the game environments.

Defines game kinds, payoff tables, matrix-game states and trajectories,
and the Coin Game grid state and pick events.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import RejectedInputError


class GameKind(Enum):
    PRISONERS_DILEMMA = "prisoners_dilemma"
    MATCHING_PENNIES = "matching_pennies"
    STAG_HUNT = "stag_hunt"


# Action 0 is the cooperative (or heads) move, action 1 the defecting (or tails) move.
ACTION_LABELS: Dict[GameKind, Tuple[str, str]] = {
    GameKind.PRISONERS_DILEMMA: ("C", "D"),
    GameKind.MATCHING_PENNIES: ("H", "T"),
    GameKind.STAG_HUNT: ("C", "D"),
}

STATE_COUNT = 5
INITIAL_STATE = 0


@dataclass(frozen=True)
class PayoffMatrix:
    """2x2 reward table: (row action, column action) -> (row reward, column reward)."""

    kind: GameKind
    rewards: Dict[Tuple[int, int], Tuple[float, float]]

    def __post_init__(self):
        """Validate that all four cells are present."""
        if set(self.rewards) != {(0, 0), (0, 1), (1, 0), (1, 1)}:
            raise ValueError("A payoff matrix needs exactly the four 2x2 cells")

    def as_array(self) -> np.ndarray:
        """Table of shape (2, 2, 2) indexed [row action, column action, player]."""
        table = np.zeros((2, 2, 2))
        for (a1, a2), (r1, r2) in self.rewards.items():
            table[a1, a2] = (r1, r2)
        return table

    def is_symmetric(self) -> bool:
        return all(
            self.rewards[(a1, a2)] == self.rewards[(a2, a1)][::-1]
            for (a1, a2) in self.rewards
        )

    def is_zero_sum(self) -> bool:
        return all(r1 + r2 == 0 for r1, r2 in self.rewards.values())


@dataclass(frozen=True)
class MatrixState:
    """Previous joint action as seen by the row player (None at t=0)."""

    previous_joint_action: Optional[Tuple[int, int]] = None

    @property
    def index(self) -> int:
        """Slot in {initial, CC, CD, DC, DD} (or the H/T equivalents)."""
        if self.previous_joint_action is None:
            return INITIAL_STATE
        a1, a2 = self.previous_joint_action
        return 1 + 2 * a1 + a2

    @property
    def encoding(self) -> np.ndarray:
        one_hot = np.zeros(STATE_COUNT)
        one_hot[self.index] = 1.0
        return one_hot

    @classmethod
    def from_index(cls, index: int) -> "MatrixState":
        if index == INITIAL_STATE:
            return cls(None)
        return cls(divmod(index - 1, 2))

    def label(self, kind: GameKind) -> str:
        if self.previous_joint_action is None:
            return "initial"
        labels = ACTION_LABELS[kind]
        return "".join(labels[a] for a in self.previous_joint_action)


@dataclass
class Trajectory:
    """Matrix-game episodes in environment (row, column) order.

    ``states[..., t]`` is the state before ``joint_actions[..., t, :]``;
    ``rewards[..., t, :]`` is the pair paid for that joint action. Leading axes
    index episodes played in lockstep. ``decision_mask[t]`` is False where the
    environment repeated the previous joint action instead of asking the agents.
    """

    kind: GameKind
    states: np.ndarray
    joint_actions: np.ndarray
    rewards: np.ndarray
    decision_mask: np.ndarray = None

    def __post_init__(self):
        """Validate aligned lengths."""
        self.states = np.asarray(self.states, dtype=np.int64)
        self.joint_actions = np.asarray(self.joint_actions, dtype=np.int64)
        self.rewards = np.asarray(self.rewards, dtype=np.float64)
        length = self.states.shape[-1] if self.states.ndim else 0
        if self.decision_mask is None:
            self.decision_mask = np.ones(length, dtype=bool)
        self.decision_mask = np.asarray(self.decision_mask, dtype=bool)
        if (
            self.states.ndim == 0
            or self.joint_actions.shape != (*self.states.shape, 2)
            or self.rewards.shape != (*self.states.shape, 2)
            or self.decision_mask.shape != (length,)
        ):
            raise RejectedInputError("Trajectory fields must be aligned")

    @property
    def horizon(self) -> int:
        """Index T of the final step."""
        return self.states.shape[-1] - 1

    def rewards_for(self, agent: int) -> np.ndarray:
        return self.rewards[..., agent]

    def actions_for(self, agent: int) -> np.ndarray:
        return self.joint_actions[..., agent]


@dataclass(frozen=True)
class GridState:
    """Coin Game world on a 3x3 grid; positions are (row, col)."""

    red_pos: Tuple[int, int]
    blue_pos: Tuple[int, int]
    coin_pos: Tuple[int, int]
    coin_color: str
    step_index: int = 0
    grid_size: int = 3

    def __post_init__(self):
        """Check positions and coin color."""
        if self.coin_color not in ("red", "blue"):
            raise ValueError(f"Unknown coin color: {self.coin_color}")
        for pos in (self.red_pos, self.blue_pos, self.coin_pos):
            if not all(0 <= c < self.grid_size for c in pos):
                raise ValueError(f"Position {pos} is off the grid")


@dataclass(frozen=True)
class PickEvent:
    """Outcome of one Coin Game step."""

    picker: str  # 'red', 'blue', 'both' or 'none'
    coin_color: str
    rewards: Tuple[float, float] = (0.0, 0.0)

    def picked_by(self, agent: str) -> bool:
        return self.picker in (agent, "both")
