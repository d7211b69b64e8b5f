"""Actor and critic networks, stochastic policies and fixed opponents.

Action 0 is always the cooperative choice: C/H in matrix games and
"consult the cooperation oracle" in the Coin Game.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, softmax

from ..envs.coin import OBSERVATION_SHAPE
from ..envs.models import STATE_COUNT
from ..errors import RejectedInputError
from ..nn import NetworkModel, build_network, conv2d, dense, forward

logger = logging.getLogger(__name__)

COOPERATE, DEFECT = 0, 1
FIXED_KINDS = ("always_cooperate", "always_defect", "uniform_random")


def matrix_actor(rng: np.random.Generator) -> NetworkModel:
    """One cooperate-logit per state: a 5-entry table."""
    return build_network([dense(STATE_COUNT, 1, "linear", bias=False)], rng)


def matrix_critic(rng: np.random.Generator) -> NetworkModel:
    """One value per state: a 5-entry table."""
    return build_network([dense(STATE_COUNT, 1, "linear", bias=False)], rng)


def _coin_trunk(filters: int = 16, hidden: int = 32):
    first = conv2d(OBSERVATION_SHAPE, filters, kernel_size=3, activation="relu")
    return [first, dense(first.output_shape, hidden, "relu")]


def coin_actor(rng: np.random.Generator) -> NetworkModel:
    """Conv trunk -> two meta-action logits (cooperation oracle, defection oracle)."""
    trunk = _coin_trunk()
    return build_network(trunk + [dense(trunk[-1].output_shape, 2, "linear")], rng)


def coin_critic(rng: np.random.Generator) -> NetworkModel:
    trunk = _coin_trunk()
    return build_network(trunk + [dense(trunk[-1].output_shape, 1, "linear")], rng)


def one_hot_states(states: np.ndarray) -> np.ndarray:
    """(..., ) state slots -> (..., 5) one-hot encodings."""
    return np.eye(STATE_COUNT)[np.asarray(states)]


def draw(probabilities: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample one action per row of an (N, k) probability table."""
    u = rng.random(len(probabilities))
    cumulative = np.cumsum(probabilities, axis=1)
    return np.minimum((u[:, None] >= cumulative).sum(axis=1), probabilities.shape[1] - 1)


class Policy:
    """Stochastic policy over two actions."""

    trainable = True
    n_actions = 2

    def probabilities(self, inputs: np.ndarray) -> np.ndarray:
        """(N, 2) action probabilities for a batch of inputs."""
        raise NotImplementedError

    def act(self, inputs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return draw(self.probabilities(inputs), rng)


@dataclass
class NetworkPolicy(Policy):
    """Policy whose actor network outputs logits.

    ``head='sigmoid'`` reads one logit as the log-odds of action 0;
    ``head='softmax'`` reads one logit per action.
    """

    actor: NetworkModel
    head: str = "sigmoid"

    def __post_init__(self):
        expected = 1 if self.head == "sigmoid" else self.n_actions
        if self.head not in ("sigmoid", "softmax") or self.actor.output_shape != (expected,):
            raise RejectedInputError(
                f"Actor output {self.actor.output_shape} does not fit a {self.head} head"
            )

    @property
    def input_shape(self):
        return self.actor.input_shape

    def logits(self, inputs: np.ndarray) -> np.ndarray:
        return forward(self.actor, inputs)

    def probabilities(self, inputs: np.ndarray) -> np.ndarray:
        logits = self.logits(np.asarray(inputs, dtype=np.float64).reshape(-1, *self.input_shape))
        if self.head == "sigmoid":
            p = expit(logits[:, 0])
            return np.stack([p, 1.0 - p], axis=1)
        return softmax(logits, axis=1)

    def log_prob_logit_gradient(self, inputs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """d log pi(a|s) / d logits for each row, shaped like the actor output."""
        probs = self.probabilities(inputs)
        actions = np.asarray(actions, dtype=np.int64)
        if self.head == "sigmoid":
            return ((actions == COOPERATE) - probs[:, 0])[:, None]
        return np.eye(self.n_actions)[actions] - probs

    def with_actor(self, actor: NetworkModel) -> "NetworkPolicy":
        return NetworkPolicy(actor, self.head)


class FixedPolicy(Policy):
    """A policy that ignores the state: always C, always D, or a fair coin."""

    trainable = False

    def __init__(self, kind: str):
        if kind not in FIXED_KINDS:
            raise RejectedInputError(f"Unknown fixed policy: {kind}")
        self.kind = kind
        self.distribution = {
            "always_cooperate": np.array([1.0, 0.0]),
            "always_defect": np.array([0.0, 1.0]),
            "uniform_random": np.array([0.5, 0.5]),
        }[kind]

    @property
    def parameter_count(self) -> int:
        return 0

    def probabilities(self, inputs: np.ndarray) -> np.ndarray:
        return np.tile(self.distribution, (len(inputs), 1))

    def act(self, inputs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        n = len(inputs)
        if self.kind == "uniform_random":
            return draw(np.tile(self.distribution, (n, 1)), rng)
        return np.full(n, int(np.argmax(self.distribution)), dtype=np.int64)


def fixed_policy(kind: str) -> FixedPolicy:
    return FixedPolicy(kind)


def sample_action(policy: Policy, state: np.ndarray, rng: np.random.Generator) -> int:
    """Draw one action for a single (unbatched) state."""
    state = np.asarray(state, dtype=np.float64)
    if isinstance(policy, NetworkPolicy) and state.shape != policy.input_shape:
        raise RejectedInputError(
            f"State shape {state.shape} does not match actor input {policy.input_shape}"
        )
    return int(policy.act(state[np.newaxis], rng)[0])
