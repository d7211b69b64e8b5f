"""Data models for GameDistill.

Defines reward-adjacent state windows, the vectorised dataset built from
them, 2-way cluster assignments and the oracle networks distilled from each
cluster.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..envs.coin import COLORS, OBSERVATION_SHAPE
from ..errors import RejectedInputError
from ..nn import NetworkModel, forward

WINDOW = 3
ROLES = ("cooperation", "defection")
CLUSTER_LABELS = ("cooperate", "defect")
CLUSTER_METHODS = ("agglomerative", "kmeans")


@dataclass
class StateSequence:
    """The acting agent's last three observations and moves, ending with a pick.

    ``states[i]`` is the observation before ``logged_actions[i]``; the final
    move is the one that picked the coin.
    """

    states: np.ndarray
    logged_actions: np.ndarray
    own_reward: float
    opponent_reward: float
    coin_color_picked: str
    agent: str = "red"
    padded: bool = False

    def __post_init__(self):
        """Validate window length and labels."""
        self.states = np.asarray(self.states, dtype=np.float64)
        self.logged_actions = np.asarray(self.logged_actions, dtype=np.int64)
        if self.states.shape != (WINDOW, *OBSERVATION_SHAPE):
            raise RejectedInputError(f"A state window must have shape {(WINDOW, *OBSERVATION_SHAPE)}")
        if self.logged_actions.shape != (WINDOW,):
            raise RejectedInputError(f"A state window carries exactly {WINDOW} actions")
        if self.coin_color_picked not in COLORS or self.agent not in COLORS:
            raise RejectedInputError("Colors must be red or blue")

    @property
    def own_pick(self) -> bool:
        return self.coin_color_picked == self.agent


@dataclass
class SequenceDataset:
    """Column-wise collection of one agent's StateSequences."""

    agent: str
    states: np.ndarray           # (N, 3, 3, 3, 4)
    actions: np.ndarray          # (N, 3)
    own_reward: np.ndarray       # (N,)
    opponent_reward: np.ndarray  # (N,)
    coin_color: np.ndarray       # (N,) 0 red, 1 blue
    padded: np.ndarray = None    # (N,) bool

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.float64).reshape(-1, WINDOW, *OBSERVATION_SHAPE)
        self.actions = np.asarray(self.actions, dtype=np.int64).reshape(-1, WINDOW)
        self.own_reward = np.asarray(self.own_reward, dtype=np.float64)
        self.opponent_reward = np.asarray(self.opponent_reward, dtype=np.float64)
        self.coin_color = np.asarray(self.coin_color, dtype=np.int64)
        if self.padded is None:
            self.padded = np.zeros(len(self.states), dtype=bool)
        self.padded = np.asarray(self.padded, dtype=bool)
        n = len(self.states)
        if any(len(a) != n for a in (self.actions, self.own_reward, self.opponent_reward, self.coin_color, self.padded)):
            raise RejectedInputError("SequenceDataset columns must have equal length")
        if self.agent not in COLORS:
            raise RejectedInputError(f"Unknown agent color: {self.agent}")

    def __len__(self) -> int:
        return len(self.states)

    @classmethod
    def from_sequences(cls, agent: str, sequences: List[StateSequence]) -> "SequenceDataset":
        return cls(
            agent=agent,
            states=np.array([s.states for s in sequences]).reshape(-1, WINDOW, *OBSERVATION_SHAPE),
            actions=np.array([s.logged_actions for s in sequences]).reshape(-1, WINDOW),
            own_reward=np.array([s.own_reward for s in sequences]),
            opponent_reward=np.array([s.opponent_reward for s in sequences]),
            coin_color=np.array([COLORS.index(s.coin_color_picked) for s in sequences], dtype=np.int64),
            padded=np.array([s.padded for s in sequences], dtype=bool),
        )

    def sequence(self, index: int) -> StateSequence:
        return StateSequence(
            self.states[index],
            self.actions[index],
            float(self.own_reward[index]),
            float(self.opponent_reward[index]),
            COLORS[int(self.coin_color[index])],
            self.agent,
            bool(self.padded[index]),
        )

    def subset(self, indices) -> "SequenceDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return SequenceDataset(
            self.agent,
            self.states[indices],
            self.actions[indices],
            self.own_reward[indices],
            self.opponent_reward[indices],
            self.coin_color[indices],
            self.padded[indices],
        )

    def split(self, holdout: float, rng: np.random.Generator):
        """(train, held-out) random split."""
        order = rng.permutation(len(self))
        cut = len(self) - int(round(holdout * len(self)))
        return self.subset(order[:cut]), self.subset(order[cut:])

    @property
    def own_pick(self) -> np.ndarray:
        """Ground-truth pick type: True where the agent picked its own color."""
        return self.coin_color == COLORS.index(self.agent)

    @property
    def red_picked(self) -> np.ndarray:
        """Coin-color head target (red = 1)."""
        return (self.coin_color == 0).astype(np.float64)


@dataclass
class ClusterModel:
    """A 2-way partition of a dataset's embeddings."""

    method: str
    assignments: np.ndarray
    k: int = 2
    cluster_labels: Dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in CLUSTER_METHODS:
            raise RejectedInputError(f"Unknown clustering method: {self.method}")
        if self.k != 2:
            raise RejectedInputError("GameDistill clusters into exactly two groups")
        self.assignments = np.asarray(self.assignments, dtype=np.int64)

    @property
    def is_labeled(self) -> bool:
        return set(self.cluster_labels.values()) == set(CLUSTER_LABELS)

    def members(self, label: str) -> np.ndarray:
        """Indices of sequences in the cluster carrying ``label``."""
        cluster = next(c for c, name in self.cluster_labels.items() if name == label)
        return np.flatnonzero(self.assignments == cluster)

    def sizes(self) -> Dict[int, int]:
        return {c: int(np.sum(self.assignments == c)) for c in range(self.k)}


@dataclass
class OracleModel:
    """State -> move scorer for one behavior type.

    Attributes:
        network: 4 sigmoid scores, one per move (up, down, left, right)
        role: ``'cooperation'`` or ``'defection'``
    """

    network: NetworkModel
    role: str
    training_accuracy: Optional[float] = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise RejectedInputError(f"Unknown oracle role: {self.role}")
        if self.network.output_shape != (4,):
            raise RejectedInputError("An oracle scores exactly four moves")

    def scores(self, observations: np.ndarray) -> np.ndarray:
        return forward(self.network, observations)

    def moves(self, observations: np.ndarray) -> np.ndarray:
        """Greedy move per observation."""
        obs = np.asarray(observations, dtype=np.float64).reshape(-1, *OBSERVATION_SHAPE)
        return np.argmax(forward(self.network, obs), axis=1)
