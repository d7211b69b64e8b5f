"""Batched self-play of two independent learners."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..data.models import AGENTS, RunMetrics
from ..envs.coin import CoinGameBatch, pick_counts
from ..envs.matrix import MatrixGameBatch, batch_ndr, perspective
from ..envs.models import GameKind
from ..errors import RejectedInputError
from ..seeds import SeedStreams
from .learner import Learner, build_learner
from .models import AgentView, SQConfig
from .policies import COOPERATE, DEFECT, one_hot_states

logger = logging.getLogger(__name__)

GAME_KINDS = {
    "ipd": GameKind.PRISONERS_DILEMMA,
    "imp": GameKind.MATCHING_PENNIES,
    "ish": GameKind.STAG_HUNT,
}


@dataclass(frozen=True)
class EnvironmentSpec:
    """Which game to play and how."""

    name: str
    episode_length: int = 200
    respawn: str = "coin"
    stationarity: int = 1

    def __post_init__(self):
        if self.name not in (*GAME_KINDS, "coin"):
            raise RejectedInputError(f"Unknown environment: {self.name}")

    @property
    def family(self) -> str:
        return "coin" if self.name == "coin" else "matrix"

    @property
    def kind(self) -> GameKind:
        return GAME_KINDS[self.name]


@dataclass
class EpochOutcome:
    """Both agents' views of one batch plus per-agent epoch metrics."""

    views: Tuple[AgentView, AgentView]
    metrics: Dict[str, Dict[str, Optional[float]]]


def rollout_matrix(
    env: EnvironmentSpec,
    learners: Sequence[Learner],
    batch_size: int,
    agent_rngs: Sequence[np.random.Generator],
    gamma: float,
) -> EpochOutcome:
    """Play ``batch_size`` matrix-game episodes in lockstep."""
    game = MatrixGameBatch(env.kind, batch_size, env.episode_length, env.stationarity)
    state = game.reset()
    moves = None
    while not game.finished:
        if game.is_decision_step(game.t):
            moves = [
                learner.act(one_hot_states(perspective(state, i)), agent_rngs[i])
                for i, learner in enumerate(learners)
            ]
        state = game.step(moves[0], moves[1]).states

    trajectory = game.trajectory()
    mask = np.broadcast_to(trajectory.decision_mask, trajectory.states.shape)
    views, metrics = [], {}
    for i, agent in enumerate(AGENTS):
        actions = trajectory.actions_for(i)
        rewards = trajectory.rewards_for(i)
        views.append(AgentView(
            inputs=one_hot_states(perspective(trajectory.states, i)),
            actions=actions,
            rewards=rewards,
            decision_mask=mask,
        ))
        cooperation = float(np.mean(actions[mask] == COOPERATE))
        metrics[agent] = {
            "ndr": float(np.mean(batch_ndr(rewards, gamma))),
            "cooperation_probability": cooperation,
            "defection_rate": 1.0 - cooperation,
        }
    return EpochOutcome(tuple(views), metrics)


def rollout_coin(
    env: EnvironmentSpec,
    learners: Sequence[Learner],
    oracles: Sequence,
    batch_size: int,
    env_rng: np.random.Generator,
    agent_rngs: Sequence[np.random.Generator],
    gamma: float,
) -> EpochOutcome:
    """Play ``batch_size`` Coin Game episodes with oracle meta-actions.

    Each agent picks a meta-action (consult cooperation or defection oracle)
    from its own observation; the chosen oracle supplies the move.
    """
    length = env.episode_length
    board = CoinGameBatch(batch_size, env.respawn)
    board.reset(env_rng)

    observations = [np.zeros((batch_size, length, 3, 3, 4)) for _ in AGENTS]
    meta = np.zeros((batch_size, length, 2), dtype=np.int64)
    rewards = np.zeros((batch_size, length, 2))
    own_picks = np.zeros(2, dtype=np.int64)
    all_picks = np.zeros(2, dtype=np.int64)
    for t in range(length):
        moves = []
        for i, color in enumerate(("red", "blue")):
            obs = board.observe(color)
            observations[i][:, t] = obs
            meta[:, t, i] = learners[i].act(obs, agent_rngs[i])
            moves.append(oracles[i].moves(obs, meta[:, t, i]))
        result = board.step(moves[0], moves[1], env_rng)
        rewards[:, t] = result.rewards
        for i, picked in enumerate((result.red_picked, result.blue_picked)):
            own, total = pick_counts(picked, result.picked_color, i)
            own_picks[i] += own
            all_picks[i] += total

    views, metrics = [], {}
    for i, agent in enumerate(AGENTS):
        views.append(AgentView(observations[i], meta[:, :, i], rewards[:, :, i]))
        defection = float(np.mean(meta[:, :, i] == DEFECT))
        metrics[agent] = {
            "ndr": float(np.mean(batch_ndr(rewards[:, :, i], gamma))),
            "own_coin_probability": own_picks[i] / all_picks[i] if all_picks[i] else None,
            "defection_rate": defection,
            "cooperation_probability": 1.0 - defection,
        }
    return EpochOutcome(tuple(views), metrics)


def train_pair(
    env: EnvironmentSpec,
    learner_kinds: Sequence[str],
    config: SQConfig,
    seed: int,
    epochs: int,
    oracles: Optional[Sequence] = None,
    log_every: int = 10,
) -> RunMetrics:
    """Train two learners against each other for ``epochs`` update batches.

    Each learner updates from its own view only. Fixed seats are checked to
    leave training with the parameters they started with.

    Returns:
        RunMetrics holding this seed's per-epoch series
    """
    if len(learner_kinds) != 2:
        raise RejectedInputError("train_pair needs exactly two learner kinds")
    if env.family == "coin" and (oracles is None or len(oracles) != 2):
        raise RejectedInputError("Coin Game training needs one oracle pair per agent")

    streams = SeedStreams(seed)
    learners: List[Learner] = [
        build_learner(kind, env.family, config, streams[f"init{i + 1}"], streams[f"kappa{i + 1}"])
        for i, kind in enumerate(learner_kinds)
    ]
    frozen = {i: l.parameter_digest() for i, l in enumerate(learners) if not l.trainable}
    agent_rngs = [streams["agent1"], streams["agent2"]]
    metrics = RunMetrics(seeds=[seed])

    logger.info(
        f"Seed {seed}: {learner_kinds[0]} vs {learner_kinds[1]} on {env.name}, {epochs} epochs"
    )
    for epoch in range(1, epochs + 1):
        if env.family == "matrix":
            outcome = rollout_matrix(env, learners, config.batch_size, agent_rngs, config.gamma)
        else:
            outcome = rollout_coin(
                env, learners, oracles, config.batch_size, streams["env"], agent_rngs, config.gamma
            )
        for learner, view in zip(learners, outcome.views):
            learner.update(view)
        for agent, values in outcome.metrics.items():
            for name, value in values.items():
                metrics.add(epoch, seed, agent, name, value)

        if epoch % log_every == 0 or epoch == epochs:
            summary = ", ".join(
                f"{agent} ndr={values['ndr']:.3f} coop={values['cooperation_probability']:.2f}"
                for agent, values in outcome.metrics.items()
            )
            logger.info(f"Seed {seed} epoch {epoch}/{epochs}: {summary}")

    for index, digest in frozen.items():
        if learners[index].parameter_digest() != digest:
            raise RuntimeError(f"Fixed seat {index + 1} changed its parameters during training")
    return metrics
