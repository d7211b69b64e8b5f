"""Multi-head sequence encoder.

Each of the window's three observations passes through the same conv trunk;
the three feature maps are concatenated and projected to a 100-unit
embedding that feeds a coin-color classifier and two reward regressors.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Union

import numpy as np

from ..envs.coin import OBSERVATION_SHAPE
from ..errors import RejectedInputError
from ..nn import (
    NetworkModel,
    backward,
    backward_full,
    build_network,
    clip_probabilities,
    conv2d,
    dense,
    forward,
    loss_and_gradient,
    make_optimizer,
    optimizer_step,
)
from .models import WINDOW, SequenceDataset, StateSequence

logger = logging.getLogger(__name__)

EMBEDDING_SIZE = 100
PARTS = ("state_net", "merge_net", "color_head", "own_head", "opponent_head")


@dataclass
class EncoderModel:
    """Shared per-state trunk, 100-unit projection and three heads."""

    state_net: NetworkModel
    merge_net: NetworkModel
    color_head: NetworkModel
    own_head: NetworkModel
    opponent_head: NetworkModel
    loss_history: List[float] = field(default_factory=list)

    def __post_init__(self):
        if self.merge_net.output_shape != (EMBEDDING_SIZE,):
            raise RejectedInputError(f"Embedding must have {EMBEDDING_SIZE} units")

    def networks(self) -> Dict[str, NetworkModel]:
        return {name: getattr(self, name) for name in PARTS}

    @property
    def parameter_count(self) -> int:
        return sum(net.parameter_count for net in self.networks().values())


def build_encoder(rng: np.random.Generator, filters=(16, 32)) -> EncoderModel:
    first = conv2d(OBSERVATION_SHAPE, filters[0], kernel_size=3, activation="relu", padding="same")
    second = conv2d(first.output_shape, filters[1], kernel_size=3, activation="relu")
    state_net = build_network([first, second], rng)
    merge_net = build_network(
        [dense(WINDOW * int(np.prod(second.output_shape)), EMBEDDING_SIZE, "linear")], rng
    )
    return EncoderModel(
        state_net,
        merge_net,
        build_network([dense(EMBEDDING_SIZE, 1, "sigmoid")], rng),
        build_network([dense(EMBEDDING_SIZE, 1, "linear")], rng),
        build_network([dense(EMBEDDING_SIZE, 1, "linear")], rng),
    )


def _window_batch(states) -> np.ndarray:
    if isinstance(states, StateSequence):
        return states.states[np.newaxis]
    if isinstance(states, SequenceDataset):
        return states.states
    states = np.asarray(states, dtype=np.float64)
    if states.shape == (WINDOW, *OBSERVATION_SHAPE):
        return states[np.newaxis]
    if states.shape[1:] != (WINDOW, *OBSERVATION_SHAPE):
        raise RejectedInputError(f"Expected windows of shape {(WINDOW, *OBSERVATION_SHAPE)}, got {states.shape}")
    return states


def _merged_input(encoder: EncoderModel, windows: np.ndarray):
    per_state = windows.reshape(-1, *OBSERVATION_SHAPE)
    features = forward(encoder.state_net, per_state)
    return per_state, features, features.reshape(len(windows), -1)


def embed(encoder: EncoderModel, states: Union[StateSequence, SequenceDataset, np.ndarray]) -> np.ndarray:
    """Trunk output before the heads: (100,) for one window, (N, 100) for many."""
    single = isinstance(states, StateSequence) or (
        not isinstance(states, SequenceDataset) and np.shape(states) == (WINDOW, *OBSERVATION_SHAPE)
    )
    windows = _window_batch(states)
    _, _, merged = _merged_input(encoder, windows)
    embedding = forward(encoder.merge_net, merged)
    return embedding[0] if single else embedding


def predict(encoder: EncoderModel, states) -> Dict[str, np.ndarray]:
    """Head outputs: red-coin probability, own reward and opponent reward."""
    embedding = np.atleast_2d(embed(encoder, states))
    return {
        "red_probability": forward(encoder.color_head, embedding)[:, 0],
        "own_reward": forward(encoder.own_head, embedding)[:, 0],
        "opponent_reward": forward(encoder.opponent_head, embedding)[:, 0],
    }


def color_accuracy(encoder: EncoderModel, dataset: SequenceDataset) -> float:
    predicted = predict(encoder, dataset)["red_probability"] >= 0.5
    return float(np.mean(predicted == (dataset.red_picked == 1.0)))


def encoder_loss(encoder: EncoderModel, dataset: SequenceDataset) -> float:
    """BCE(coin color) + MSE(own reward) + MSE(opponent reward)."""
    heads = predict(encoder, dataset)
    color, _ = loss_and_gradient(clip_probabilities(heads["red_probability"]), dataset.red_picked, "bce")
    own, _ = loss_and_gradient(heads["own_reward"], dataset.own_reward, "mse")
    opponent, _ = loss_and_gradient(heads["opponent_reward"], dataset.opponent_reward, "mse")
    return color + own + opponent


def _gradients(encoder: EncoderModel, batch: SequenceDataset):
    """Joint loss and per-network parameter gradients on one minibatch."""
    per_state, features, merged = _merged_input(encoder, batch.states)
    embedding = forward(encoder.merge_net, merged)

    red = forward(encoder.color_head, embedding)[:, 0]
    own = forward(encoder.own_head, embedding)[:, 0]
    opponent = forward(encoder.opponent_head, embedding)[:, 0]
    color_loss, color_grad = loss_and_gradient(clip_probabilities(red), batch.red_picked, "bce")
    own_loss, own_grad = loss_and_gradient(own, batch.own_reward, "mse")
    opponent_loss, opponent_grad = loss_and_gradient(opponent, batch.opponent_reward, "mse")

    grads = {}
    d_embedding = np.zeros_like(embedding)
    for name, grad in (("color_head", color_grad), ("own_head", own_grad), ("opponent_head", opponent_grad)):
        grads[name], d_input = backward_full(getattr(encoder, name), embedding, grad[:, np.newaxis])
        d_embedding += d_input
    grads["merge_net"], d_merged = backward_full(encoder.merge_net, merged, d_embedding)
    grads["state_net"] = backward(encoder.state_net, per_state, d_merged.reshape(features.shape))
    return color_loss + own_loss + opponent_loss, grads


def train_encoder(
    dataset: SequenceDataset,
    epochs: int,
    rng: np.random.Generator,
    lr: float = 0.003,
    minibatch: int = 128,
) -> EncoderModel:
    """Fit the encoder's joint loss with Adam.

    Returns:
        Trained EncoderModel; ``loss_history`` holds the mean minibatch loss per epoch
    """
    if len(dataset) == 0:
        raise RejectedInputError("Cannot train an encoder on an empty dataset")
    if epochs < 1:
        raise RejectedInputError("epochs must be at least 1")
    encoder = build_encoder(rng)
    networks = encoder.networks()
    optimizers = {name: make_optimizer("adam", lr, net) for name, net in networks.items()}
    history = []

    for epoch in range(epochs):
        order = rng.permutation(len(dataset))
        losses = []
        for start in range(0, len(dataset), minibatch):
            batch = dataset.subset(order[start:start + minibatch])
            loss, grads = _gradients(EncoderModel(**networks), batch)
            losses.append(loss)
            for name in PARTS:
                networks[name], optimizers[name] = optimizer_step(
                    networks[name], optimizers[name], grads[name], "descend"
                )
        history.append(float(np.mean(losses)))
        logger.debug(f"Encoder epoch {epoch + 1}/{epochs}: loss {history[-1]:.4f}")

    encoder = EncoderModel(**networks, loss_history=history)
    logger.info(
        f"Trained {dataset.agent} encoder on {len(dataset)} sequences: final loss {history[-1]:.4f}"
    )
    return encoder
