"""Minimal neural-network engine: layers, specs, ADAM and a training loop.

Arrays are numpy, channels-last (N, H, W, C); every layer implements its own
forward and reverse-mode backward, checked against finite differences in the
test suite. No autograd framework is involved.
"""

from .layers import (
    AvgPool2d,
    Conv2d,
    FullyConnected,
    Inception,
    L2Normalize,
    MaxPool2d,
    Param,
    Softmax,
)
from .losses import cross_entropy_batch, cross_entropy_loss, l2_normalize, relu, softmax
from .network import InceptionSpec, LayerSpec, Network, build_network, format_kcount
from .optim import Adam, AdamConfig, adam_update
from .train import EpochMetrics, TrainConfig, TrainResult, train

__all__ = [
    "Adam",
    "AdamConfig",
    "AvgPool2d",
    "Conv2d",
    "EpochMetrics",
    "FullyConnected",
    "Inception",
    "InceptionSpec",
    "L2Normalize",
    "LayerSpec",
    "MaxPool2d",
    "Network",
    "Param",
    "Softmax",
    "TrainConfig",
    "TrainResult",
    "adam_update",
    "build_network",
    "format_kcount",
    "cross_entropy_batch",
    "cross_entropy_loss",
    "l2_normalize",
    "relu",
    "softmax",
    "train",
]
