"""Oracle networks distilled from one behavior cluster, and their solo evaluation."""

import hashlib
import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..envs.coin import GRID_SIZE, MOVES, OBSERVATION_SHAPE, OTHER_COIN, OWN_COIN, SELF, apply_moves
from ..errors import RejectedInputError
from ..nn import (
    NetworkModel,
    backward,
    build_network,
    clip_probabilities,
    conv2d,
    dense,
    forward,
    l2_penalty,
    loss_and_gradient,
    make_optimizer,
    optimizer_step,
)
from .models import OracleModel, SequenceDataset

logger = logging.getLogger(__name__)


def oracle_network(rng: np.random.Generator) -> NetworkModel:
    """Two kernel-3 convs and three dense relu layers, one sigmoid score per move."""
    first = conv2d(OBSERVATION_SHAPE, 16, kernel_size=3, activation="relu", padding="same")
    second = conv2d(first.output_shape, 32, kernel_size=3, activation="relu")
    return build_network([
        first,
        second,
        dense(second.output_shape, 64, "relu"),
        dense(64, 32, "relu"),
        dense(32, len(MOVES), "sigmoid"),
    ], rng)


def transitions(dataset: SequenceDataset):
    """(observation, move) pairs from every step of every window."""
    states = dataset.states.reshape(-1, *OBSERVATION_SHAPE)
    moves = dataset.actions.reshape(-1)
    return states, moves


def move_accuracy(network: NetworkModel, states: np.ndarray, moves: np.ndarray) -> float:
    if len(states) == 0:
        return 0.0
    return float(np.mean(np.argmax(forward(network, states), axis=1) == moves))


def train_oracle(
    dataset: SequenceDataset,
    role: str,
    rng: np.random.Generator,
    epochs: int = 60,
    lr: float = 0.001,
    l2: float = 1e-4,
    minibatch: int = 128,
    negatives: Optional[SequenceDataset] = None,
) -> OracleModel:
    """Fit a state -> move classifier on one cluster's sequences.

    Loss is BCE against one-hot moves plus ``l2 * ||theta||^2``, minimised
    with Adam. Transitions from ``negatives`` add a target of 0 on the move
    they logged and leave the other three scores untouched.
    """
    if len(dataset) == 0:
        raise RejectedInputError(f"Cannot train the {role} oracle on an empty cluster")
    positive_states, positive_moves = transitions(dataset)
    states = positive_states
    targets = np.eye(len(MOVES))[positive_moves]
    weights = np.ones_like(targets)
    negative_states, negative_moves = states[:0], positive_moves[:0]
    if negatives is not None and len(negatives):
        negative_states, negative_moves = transitions(negatives)
        states = np.concatenate([states, negative_states])
        targets = np.concatenate([targets, np.zeros((len(negative_moves), len(MOVES)))])
        weights = np.concatenate([weights, np.eye(len(MOVES))[negative_moves]])
    network = oracle_network(rng)
    optimizer = make_optimizer("adam", lr, network)

    for _ in range(epochs):
        order = rng.permutation(len(states))
        for start in range(0, len(states), minibatch):
            rows = order[start:start + minibatch]
            scores = clip_probabilities(forward(network, states[rows]))
            _, grad = loss_and_gradient(scores, targets[rows], "bce", weights[rows])
            _, penalty_grad = l2_penalty(network.parameters, l2)
            gradient = backward(network, states[rows], grad) + penalty_grad
            network, optimizer = optimizer_step(network, optimizer, gradient, "descend")

    accuracy = move_accuracy(network, positive_states, positive_moves)
    message = (
        f"Trained {dataset.agent} {role} oracle on {len(dataset)} sequences "
        f"({len(positive_states)} transitions): accuracy {accuracy:.3f}"
    )
    if len(negative_states):
        avoided = 1.0 - move_accuracy(network, negative_states, negative_moves)
        message += f", avoids {avoided:.3f} of {len(negative_states)} negative moves"
    logger.info(message)
    return OracleModel(network, role, accuracy)


@dataclass
class OraclePair:
    """The two oracles of one agent; meta-action 0 consults cooperation, 1 defection."""

    cooperation: OracleModel
    defection: OracleModel

    def __post_init__(self):
        if self.cooperation.role != "cooperation" or self.defection.role != "defection":
            raise RejectedInputError("OraclePair needs a cooperation and a defection oracle")

    def moves(self, observations: np.ndarray, meta_actions: np.ndarray) -> np.ndarray:
        meta_actions = np.asarray(meta_actions)
        return np.where(
            meta_actions == 0,
            self.cooperation.moves(observations),
            self.defection.moves(observations),
        )

    def parameter_digest(self) -> str:
        """SHA-256 of both oracles' parameters."""
        digest = hashlib.sha256()
        for oracle in (self.cooperation, self.defection):
            digest.update(oracle.network.parameters.tobytes())
        return digest.hexdigest()


@dataclass
class SoloReport:
    """Pick rates of an oracle playing alone as Red."""

    role: Optional[str]
    trials: int
    max_steps: int
    own_pick_rate: float
    other_pick_rate: float

    def to_dict(self) -> dict:
        return asdict(self)


def _solo_trials(oracle, coin_channel: int, trials: int, max_steps: int, rng: np.random.Generator) -> float:
    cells = GRID_SIZE * GRID_SIZE
    picks = np.argsort(rng.random((trials, cells)), axis=1)[:, :2]
    agent = np.stack(np.divmod(picks[:, 0], GRID_SIZE), axis=-1)
    coin = np.stack(np.divmod(picks[:, 1], GRID_SIZE), axis=-1)
    picked = np.zeros(trials, dtype=bool)

    for _ in range(max_steps):
        active = np.flatnonzero(~picked)
        if len(active) == 0:
            break
        obs = np.zeros((len(active), *OBSERVATION_SHAPE))
        obs[np.arange(len(active)), agent[active, 0], agent[active, 1], SELF] = 1.0
        obs[np.arange(len(active)), coin[active, 0], coin[active, 1], coin_channel] = 1.0
        agent[active] = apply_moves(agent[active], np.asarray(oracle.moves(obs)))
        picked |= np.all(agent == coin, axis=1)
    return float(np.mean(picked))


def evaluate_oracle_solo(
    oracle,
    trials: int,
    rng: np.random.Generator,
    max_steps: int = 4,
) -> SoloReport:
    """Run an oracle alone on the grid, once against red coins and once against blue.

    Each trial places Red and one coin on distinct random cells; the oracle
    moves until it picks the coin or ``max_steps`` run out.

    Args:
        oracle: Anything with ``moves(observations) -> moves``
        trials: Trials per coin color
        rng: Placement stream
        max_steps: Step budget per coin

    Returns:
        SoloReport; ``other_pick_rate`` is the share of blue coins taken
    """
    if trials < 1 or max_steps < 1:
        raise RejectedInputError("trials and max_steps must be at least 1")
    own = _solo_trials(oracle, OWN_COIN, trials, max_steps, rng)
    other = _solo_trials(oracle, OTHER_COIN, trials, max_steps, rng)
    report = SoloReport(getattr(oracle, "role", None), trials, max_steps, own, other)
    logger.info(
        f"Solo evaluation ({report.role}): own-color {own:.1%}, other-color {other:.1%} "
        f"over {trials} trials each"
    )
    return report
