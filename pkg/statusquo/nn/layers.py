"""Layer specifications and per-layer forward/backward kernels.

Tensors are channels-last and carry a leading batch axis: dense layers see
``(N, *input_shape)`` and flatten it, conv layers see ``(N, H, W, C)``.
Parameters of one layer are stored flat: weights (C order) then bias.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit, softmax

from ..errors import RejectedInputError

LAYER_KINDS = ("dense", "conv2d")
ACTIVATIONS = ("relu", "linear", "sigmoid", "softmax")
PADDINGS = ("valid", "same")


@dataclass(frozen=True)
class LayerSpec:
    """Topology of a single layer."""

    kind: str
    input_shape: Tuple[int, ...]
    output_shape: Tuple[int, ...]
    activation: str = "linear"
    kernel_size: Optional[int] = None
    padding: str = "valid"
    bias: bool = True

    def __post_init__(self):
        """Check that the declared output shape follows from the layer kind."""
        object.__setattr__(self, "input_shape", tuple(int(d) for d in self.input_shape))
        object.__setattr__(self, "output_shape", tuple(int(d) for d in self.output_shape))

        if self.kind not in LAYER_KINDS:
            raise RejectedInputError(f"Unknown layer kind: {self.kind}")
        if self.activation not in ACTIVATIONS:
            raise RejectedInputError(f"Unknown activation: {self.activation}")
        if self.padding not in PADDINGS:
            raise RejectedInputError(f"Unknown padding: {self.padding}")

        if self.kind == "dense":
            if len(self.output_shape) != 1:
                raise RejectedInputError("Dense output_shape must be (units,)")
            return

        if self.kernel_size is None or self.kernel_size < 1:
            raise RejectedInputError("conv2d needs a positive kernel_size")
        if len(self.input_shape) != 3 or len(self.output_shape) != 3:
            raise RejectedInputError("conv2d shapes must be (height, width, channels)")
        height, width, _ = self.input_shape
        expected = (*conv_output_hw(height, width, self.kernel_size, self.padding), self.output_shape[2])
        if expected != self.output_shape:
            raise RejectedInputError(
                f"conv2d output_shape {self.output_shape} inconsistent with input "
                f"{self.input_shape}, kernel {self.kernel_size}, padding {self.padding}"
            )

    @property
    def fan_in(self) -> int:
        """Number of inputs feeding one output unit."""
        if self.kind == "dense":
            return int(np.prod(self.input_shape))
        return self.kernel_size * self.kernel_size * self.input_shape[2]

    @property
    def units(self) -> int:
        """Number of output units (dense) or filters (conv)."""
        return self.output_shape[-1]

    @property
    def weight_shape(self) -> Tuple[int, ...]:
        if self.kind == "dense":
            return (self.fan_in, self.units)
        k = self.kernel_size
        return (k, k, self.input_shape[2], self.units)

    @property
    def parameter_count(self) -> int:
        return self.fan_in * self.units + (self.units if self.bias else 0)

    def to_dict(self) -> dict:
        """Topology descriptor used by model files."""
        return {
            "kind": self.kind,
            "input_shape": list(self.input_shape),
            "output_shape": list(self.output_shape),
            "activation": self.activation,
            "kernel_size": self.kernel_size,
            "padding": self.padding,
            "bias": self.bias,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LayerSpec":
        return cls(
            kind=data["kind"],
            input_shape=tuple(data["input_shape"]),
            output_shape=tuple(data["output_shape"]),
            activation=data.get("activation", "linear"),
            kernel_size=data.get("kernel_size"),
            padding=data.get("padding", "valid"),
            bias=data.get("bias", True),
        )


def conv_output_hw(height: int, width: int, kernel_size: int, padding: str) -> Tuple[int, int]:
    """Spatial output size of a stride-1 convolution."""
    if padding == "same":
        return height, width
    out_h, out_w = height - kernel_size + 1, width - kernel_size + 1
    if out_h < 1 or out_w < 1:
        raise RejectedInputError(
            f"kernel {kernel_size} does not fit a {height}x{width} input with valid padding"
        )
    return out_h, out_w


def dense(input_shape, units: int, activation: str = "linear", bias: bool = True) -> LayerSpec:
    """Build a dense LayerSpec."""
    if isinstance(input_shape, int):
        input_shape = (input_shape,)
    return LayerSpec("dense", tuple(input_shape), (units,), activation, bias=bias)


def conv2d(
    input_shape: Tuple[int, int, int],
    filters: int,
    kernel_size: int = 3,
    activation: str = "relu",
    padding: str = "valid",
) -> LayerSpec:
    """Build a conv2d LayerSpec with the output shape filled in."""
    height, width, _ = input_shape
    out_h, out_w = conv_output_hw(height, width, kernel_size, padding)
    return LayerSpec(
        "conv2d", tuple(input_shape), (out_h, out_w, filters), activation, kernel_size, padding
    )


# Activations -----------------------------------------------------------------

def activate(kind: str, z: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return z
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return expit(z)
    return softmax(z, axis=-1)


def activation_backward(kind: str, z: np.ndarray, a: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. pre-activation given gradient w.r.t. activation output."""
    if kind == "linear":
        return grad
    if kind == "relu":
        return grad * (z > 0)
    if kind == "sigmoid":
        return grad * a * (1.0 - a)
    # softmax over the last axis
    return a * (grad - np.sum(grad * a, axis=-1, keepdims=True))


# Kernels -----------------------------------------------------------------------

def _split(spec: LayerSpec, params: np.ndarray):
    n_weights = spec.fan_in * spec.units
    weights = params[:n_weights].reshape(spec.weight_shape)
    bias = params[n_weights:] if spec.bias else 0.0
    return weights, bias


def _join(spec: LayerSpec, d_weights: np.ndarray, d_bias: np.ndarray) -> np.ndarray:
    if not spec.bias:
        return d_weights.ravel()
    return np.concatenate([d_weights.ravel(), d_bias])


def _pad(spec: LayerSpec, x: np.ndarray) -> np.ndarray:
    if spec.padding == "valid":
        return x
    p = spec.kernel_size // 2
    return np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))


def _patches(spec: LayerSpec, x: np.ndarray) -> np.ndarray:
    """im2col: (N, Ho, Wo, k*k*C) patch matrix, row order (ki, kj, c)."""
    k = spec.kernel_size
    windows = sliding_window_view(_pad(spec, x), (k, k), axis=(1, 2))
    # (N, Ho, Wo, C, k, k) -> (N, Ho, Wo, k, k, C)
    windows = windows.transpose(0, 1, 2, 4, 5, 3)
    n, out_h, out_w = windows.shape[:3]
    return windows.reshape(n, out_h, out_w, spec.fan_in)


def layer_forward(spec: LayerSpec, params: np.ndarray, x: np.ndarray):
    """Apply one layer to a batch.

    Returns:
        (activation output, cache for layer_backward)
    """
    weights, bias = _split(spec, params)
    if spec.kind == "dense":
        flat = x.reshape(x.shape[0], -1)
        z = flat @ weights + bias
        cols = flat
    else:
        cols = _patches(spec, x)
        z = cols @ weights.reshape(spec.fan_in, spec.units) + bias
    a = activate(spec.activation, z)
    return a, (x, cols, z, a)


def layer_backward(spec: LayerSpec, params: np.ndarray, cache, grad_out: np.ndarray):
    """Back-propagate through one layer.

    Returns:
        (flat parameter gradient, gradient w.r.t. the layer input)
    """
    x, cols, z, a = cache
    weights, _ = _split(spec, params)
    dz = activation_backward(spec.activation, z, a, grad_out)

    if spec.kind == "dense":
        d_weights = cols.T @ dz
        d_bias = dz.sum(axis=0)
        dx = (dz @ weights.T).reshape(x.shape)
        return _join(spec, d_weights, d_bias), dx

    k = spec.kernel_size
    w2d = weights.reshape(spec.fan_in, spec.units)
    dz2d = dz.reshape(-1, spec.units)
    d_weights = cols.reshape(-1, spec.fan_in).T @ dz2d
    d_bias = dz2d.sum(axis=0)

    n, out_h, out_w = dz.shape[:3]
    channels = spec.input_shape[2]
    d_cols = (dz2d @ w2d.T).reshape(n, out_h, out_w, k, k, channels)
    padded = _pad(spec, x)
    d_padded = np.zeros_like(padded)
    for i in range(k):
        for j in range(k):
            d_padded[:, i:i + out_h, j:j + out_w, :] += d_cols[:, :, :, i, j, :]
    if spec.padding == "same":
        p = k // 2
        d_padded = d_padded[:, p:p + x.shape[1], p:p + x.shape[2], :]
    return _join(spec, d_weights, d_bias), d_padded
