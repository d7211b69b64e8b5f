"""Minimal differentiable-network engine."""

from .layers import LayerSpec, conv2d, dense
from .losses import clip_probabilities, l2_penalty, loss_and_gradient
from .network import NetworkModel, backward, backward_full, build_network, forward, zero_network
from .optim import OptimizerState, make_optimizer, optimizer_step

__all__ = [
    'LayerSpec',
    'NetworkModel',
    'OptimizerState',
    'backward',
    'backward_full',
    'build_network',
    'clip_probabilities',
    'conv2d',
    'dense',
    'forward',
    'l2_penalty',
    'loss_and_gradient',
    'make_optimizer',
    'optimizer_step',
    'zero_network',
]
