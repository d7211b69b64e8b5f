"""The 3x3 Coin Game.

``CoinGameBatch`` steps many independent boards in lockstep with numpy; the
single-board functions ``reset``/``step``/``observe`` run on a batch of one so
both paths share the same rules and the same random-stream consumption.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import RejectedInputError
from .models import GridState, PickEvent

logger = logging.getLogger(__name__)

GRID_SIZE = 3
DEFAULT_EPISODE_LENGTH = 200
MOVES = ("up", "down", "left", "right")
MOVE_DELTAS = np.array([[-1, 0], [1, 0], [0, -1], [0, 1]])
COLORS = ("red", "blue")
RESPAWN_MODES = ("coin", "board")

OWN_PICK_REWARD = 1.0
CROSS_PICK_PENALTY = -2.0

# Observation channels, always from the observer's point of view.
SELF, OTHER, OWN_COIN, OTHER_COIN = range(4)
OBSERVATION_SHAPE = (GRID_SIZE, GRID_SIZE, 4)


def move_index(move: Union[int, str]) -> int:
    if isinstance(move, str) and move in MOVES:
        return MOVES.index(move)
    if isinstance(move, (int, np.integer)) and 0 <= move < len(MOVES):
        return int(move)
    raise RejectedInputError(f"Invalid move: {move!r}")


def apply_moves(positions: np.ndarray, moves: np.ndarray, grid_size: int = GRID_SIZE) -> np.ndarray:
    """Move (N, 2) positions; moves off the grid leave the position unchanged."""
    return np.clip(positions + MOVE_DELTAS[moves], 0, grid_size - 1)


def coin_rewards(red_picks: np.ndarray, blue_picks: np.ndarray, coin_color: np.ndarray) -> np.ndarray:
    """(N, 2) rewards from pick flags and coin colors (0 = red, 1 = blue).

    A pick pays the picker +1; picking the other agent's coin costs its owner -2.
    Simultaneous picks add both contributions.
    """
    rewards = np.zeros((len(coin_color), 2))
    rewards[:, 0] += OWN_PICK_REWARD * red_picks
    rewards[:, 1] += OWN_PICK_REWARD * blue_picks
    rewards[:, 1] += CROSS_PICK_PENALTY * (red_picks & (coin_color == 1))
    rewards[:, 0] += CROSS_PICK_PENALTY * (blue_picks & (coin_color == 0))
    return rewards


def _cells(positions: np.ndarray, grid_size: int) -> np.ndarray:
    return positions[:, 0] * grid_size + positions[:, 1]


def _positions(cells: np.ndarray, grid_size: int) -> np.ndarray:
    return np.stack(np.divmod(cells, grid_size), axis=-1)


@dataclass
class StepResult:
    """Per-board outcome of one batched step."""

    rewards: np.ndarray       # (N, 2) red, blue
    red_picked: np.ndarray    # (N,) bool
    blue_picked: np.ndarray   # (N,) bool
    picked_color: np.ndarray  # (N,) color of the coin before the step (0 red, 1 blue)


class CoinGameBatch:
    """N independent Coin Game boards stepped together."""

    def __init__(self, size: int, respawn: str = "coin", grid_size: int = GRID_SIZE):
        if respawn not in RESPAWN_MODES:
            raise RejectedInputError(f"Unknown respawn mode: {respawn}")
        self.size = size
        self.respawn = respawn
        self.grid_size = grid_size
        self.red = np.zeros((size, 2), dtype=np.int64)
        self.blue = np.zeros((size, 2), dtype=np.int64)
        self.coin = np.zeros((size, 2), dtype=np.int64)
        self.coin_color = np.zeros(size, dtype=np.int64)
        self.step_index = 0

    def _place(self, rows: np.ndarray, rng: np.random.Generator):
        """Put both agents and the coin on distinct random cells for the given boards."""
        cells = self.grid_size ** 2
        keys = rng.random((len(rows), cells))
        picks = np.argsort(keys, axis=1)[:, :3]
        self.red[rows] = _positions(picks[:, 0], self.grid_size)
        self.blue[rows] = _positions(picks[:, 1], self.grid_size)
        self.coin[rows] = _positions(picks[:, 2], self.grid_size)
        self.coin_color[rows] = rng.integers(0, 2, size=len(rows))

    def _respawn_coin(self, rows: np.ndarray, rng: np.random.Generator):
        """New coin uniformly over cells free of both agents, uniform color."""
        cells = self.grid_size ** 2
        keys = rng.random((len(rows), cells))
        occupied = np.zeros((len(rows), cells), dtype=bool)
        occupied[np.arange(len(rows)), _cells(self.red[rows], self.grid_size)] = True
        occupied[np.arange(len(rows)), _cells(self.blue[rows], self.grid_size)] = True
        keys[occupied] = -1.0
        self.coin[rows] = _positions(np.argmax(keys, axis=1), self.grid_size)
        self.coin_color[rows] = rng.integers(0, 2, size=len(rows))

    def reset(self, rng: np.random.Generator):
        self._place(np.arange(self.size), rng)
        self.step_index = 0

    def step(self, red_moves: np.ndarray, blue_moves: np.ndarray, rng: np.random.Generator) -> StepResult:
        """Move both agents simultaneously and resolve picks."""
        red_moves = np.asarray(red_moves, dtype=np.int64)
        blue_moves = np.asarray(blue_moves, dtype=np.int64)
        if red_moves.shape != (self.size,) or blue_moves.shape != (self.size,):
            raise RejectedInputError("One move per board and agent is required")
        if np.any((red_moves < 0) | (red_moves > 3) | (blue_moves < 0) | (blue_moves > 3)):
            raise RejectedInputError("Moves must be in 0..3")

        self.red = apply_moves(self.red, red_moves, self.grid_size)
        self.blue = apply_moves(self.blue, blue_moves, self.grid_size)
        red_picked = np.all(self.red == self.coin, axis=1)
        blue_picked = np.all(self.blue == self.coin, axis=1)
        picked_color = self.coin_color.copy()
        rewards = coin_rewards(red_picked, blue_picked, picked_color)

        rows = np.flatnonzero(red_picked | blue_picked)
        if len(rows):
            if self.respawn == "coin":
                self._respawn_coin(rows, rng)
            else:
                self._place(rows, rng)
        self.step_index += 1
        return StepResult(rewards, red_picked, blue_picked, picked_color)

    def observe(self, perspective: str) -> np.ndarray:
        """(N, 3, 3, 4) observations; channel 0 is always the observer."""
        if perspective not in COLORS:
            raise RejectedInputError(f"Unknown perspective: {perspective}")
        own, other = (self.red, self.blue) if perspective == "red" else (self.blue, self.red)
        own_color = COLORS.index(perspective)
        obs = np.zeros((self.size, *OBSERVATION_SHAPE[:2], 4))
        rows = np.arange(self.size)
        obs[rows, own[:, 0], own[:, 1], SELF] = 1.0
        obs[rows, other[:, 0], other[:, 1], OTHER] = 1.0
        coin_channel = np.where(self.coin_color == own_color, OWN_COIN, OTHER_COIN)
        obs[rows, self.coin[:, 0], self.coin[:, 1], coin_channel] = 1.0
        return obs

    def to_states(self) -> List[GridState]:
        return [
            GridState(
                tuple(int(c) for c in self.red[i]),
                tuple(int(c) for c in self.blue[i]),
                tuple(int(c) for c in self.coin[i]),
                COLORS[int(self.coin_color[i])],
                self.step_index,
                self.grid_size,
            )
            for i in range(self.size)
        ]

    @classmethod
    def from_states(cls, states: Sequence[GridState], respawn: str = "coin") -> "CoinGameBatch":
        batch = cls(len(states), respawn, states[0].grid_size)
        batch.red = np.array([s.red_pos for s in states], dtype=np.int64)
        batch.blue = np.array([s.blue_pos for s in states], dtype=np.int64)
        batch.coin = np.array([s.coin_pos for s in states], dtype=np.int64)
        batch.coin_color = np.array([COLORS.index(s.coin_color) for s in states], dtype=np.int64)
        batch.step_index = states[0].step_index
        return batch


# Single-board API --------------------------------------------------------------

def reset(rng: np.random.Generator, respawn: str = "coin") -> GridState:
    """New board with agents and coin on distinct random cells."""
    board = CoinGameBatch(1, respawn)
    board.reset(rng)
    return board.to_states()[0]


def step(
    state: GridState,
    moves: Tuple[Union[int, str], Union[int, str]],
    rng: np.random.Generator,
    respawn: str = "coin",
) -> Tuple[GridState, PickEvent]:
    """Apply (red move, blue move) to one board."""
    red_move, blue_move = (move_index(m) for m in moves)
    board = CoinGameBatch.from_states([state], respawn)
    result = board.step(np.array([red_move]), np.array([blue_move]), rng)
    red_picked, blue_picked = bool(result.red_picked[0]), bool(result.blue_picked[0])
    picker = {
        (True, True): "both", (True, False): "red",
        (False, True): "blue", (False, False): "none",
    }[(red_picked, blue_picked)]
    event = PickEvent(
        picker=picker,
        coin_color=COLORS[int(result.picked_color[0])],
        rewards=tuple(float(r) for r in result.rewards[0]),
    )
    return board.to_states()[0], event


def observe(state: GridState, perspective: str) -> np.ndarray:
    """3x3x4 observation: self, other agent, own-color coin, other-color coin."""
    return CoinGameBatch.from_states([state]).observe(perspective)[0]


def own_coin_probability(events: Iterable[PickEvent], agent: str) -> Optional[float]:
    """Share of the agent's picks that were its own color; None without picks."""
    picks = own = 0
    for event in events:
        if event.picked_by(agent):
            picks += 1
            own += event.coin_color == agent
    if picks == 0:
        return None
    return own / picks


def pick_counts(picked: np.ndarray, picked_color: np.ndarray, own_color: int) -> Tuple[int, int]:
    """(own-color picks, total picks) from batched step flags."""
    picked = np.asarray(picked, dtype=bool)
    return int(np.sum(picked & (picked_color == own_color))), int(np.sum(picked))
