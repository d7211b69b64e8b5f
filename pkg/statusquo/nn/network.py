"""Sequential network model over a flat parameter vector."""

from dataclasses import dataclass, field, replace
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import RejectedInputError
from .layers import LayerSpec, layer_backward, layer_forward

INIT_SCALE = 0.1


@dataclass
class NetworkModel:
    """Ordered layers plus one flat parameter vector.

    Models are plain values: updates produce a new model (see ``with_parameters``).
    """

    layers: List[LayerSpec]
    parameters: np.ndarray
    offsets: List[int] = field(init=False, repr=False)

    def __post_init__(self):
        """Validate layer chaining and parameter length."""
        if not self.layers:
            raise RejectedInputError("A network needs at least one layer")
        for previous, current in zip(self.layers, self.layers[1:]):
            if previous.output_shape != current.input_shape:
                raise RejectedInputError(
                    f"Layer output {previous.output_shape} does not feed input {current.input_shape}"
                )
        self.parameters = np.asarray(self.parameters, dtype=np.float64)
        self.offsets = [0]
        for spec in self.layers:
            self.offsets.append(self.offsets[-1] + spec.parameter_count)
        if self.parameters.shape != (self.parameter_count,):
            raise RejectedInputError(
                f"Expected {self.parameter_count} parameters, got {self.parameters.shape}"
            )

    @property
    def parameter_count(self) -> int:
        return self.offsets[-1] if hasattr(self, "offsets") else sum(
            spec.parameter_count for spec in self.layers
        )

    @property
    def input_shape(self) -> Tuple[int, ...]:
        return self.layers[0].input_shape

    @property
    def output_shape(self) -> Tuple[int, ...]:
        return self.layers[-1].output_shape

    def layer_parameters(self, index: int) -> np.ndarray:
        return self.parameters[self.offsets[index]:self.offsets[index + 1]]

    def with_parameters(self, parameters: np.ndarray) -> "NetworkModel":
        return replace(self, parameters=np.array(parameters, dtype=np.float64))

    def topology(self) -> List[dict]:
        return [spec.to_dict() for spec in self.layers]


def build_network(
    layers: Sequence[LayerSpec], rng: np.random.Generator, scale: float = INIT_SCALE
) -> NetworkModel:
    """Create a network with parameters uniform in [-scale, scale]."""
    count = sum(spec.parameter_count for spec in layers)
    return NetworkModel(list(layers), rng.uniform(-scale, scale, size=count))


def zero_network(layers: Sequence[LayerSpec]) -> NetworkModel:
    count = sum(spec.parameter_count for spec in layers)
    return NetworkModel(list(layers), np.zeros(count))


def _as_batch(model: NetworkModel, x: np.ndarray):
    """Return (batched input, was_single)."""
    x = np.asarray(x, dtype=np.float64)
    shape = model.input_shape
    if x.shape == shape:
        return x[np.newaxis], True
    if x.shape[1:] == shape:
        return x, False
    raise RejectedInputError(f"Input shape {x.shape} does not match network input {shape}")


def _forward_caches(model: NetworkModel, batch: np.ndarray):
    caches = []
    out = batch
    for index, spec in enumerate(model.layers):
        out, cache = layer_forward(spec, model.layer_parameters(index), out)
        caches.append(cache)
    return out, caches


def forward(model: NetworkModel, x: np.ndarray) -> np.ndarray:
    """Evaluate the network.

    Args:
        model: Network to evaluate
        x: One input of ``model.input_shape`` or a batch ``(N, *input_shape)``

    Returns:
        Output of the last layer, unbatched if the input was unbatched
    """
    batch, single = _as_batch(model, x)
    out, _ = _forward_caches(model, batch)
    return out[0] if single else out


def backward_full(model: NetworkModel, x: np.ndarray, output_gradient: np.ndarray):
    """Gradients of ``sum(output * output_gradient)``.

    Returns:
        (parameter gradient, input gradient shaped like ``x``)
    """
    batch, single = _as_batch(model, x)
    grad = np.asarray(output_gradient, dtype=np.float64)
    if single:
        grad = grad[np.newaxis]
    expected = (batch.shape[0], *model.output_shape)
    if grad.shape != expected:
        raise RejectedInputError(f"Output gradient shape {grad.shape} does not match {expected}")

    _, caches = _forward_caches(model, batch)
    pieces = []
    for index in reversed(range(len(model.layers))):
        layer_grad, grad = layer_backward(
            model.layers[index], model.layer_parameters(index), caches[index], grad
        )
        pieces.append(layer_grad)
    parameter_gradient = np.concatenate(pieces[::-1])
    return parameter_gradient, (grad[0] if single else grad)


def backward(model: NetworkModel, x: np.ndarray, output_gradient: np.ndarray) -> np.ndarray:
    """Gradient of ``sum(output * output_gradient)`` w.r.t. the parameters."""
    parameter_gradient, _ = backward_full(model, x, output_gradient)
    return parameter_gradient
