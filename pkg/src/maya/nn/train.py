"""Mini-batch training loop with seeded shuffling and early stopping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import ShapeError, TrainingDivergedError
from .losses import cross_entropy_batch
from .network import Network
from .optim import Adam, AdamConfig


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 64
    max_epochs: int = 50
    seed: int = 0
    patience: int = 5

    def adam(self) -> AdamConfig:
        return AdamConfig(self.learning_rate, self.beta1, self.beta2, self.epsilon)


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float


@dataclass
class TrainResult:
    network: Network
    metrics: list[EpochMetrics] = field(default_factory=list)
    best_epoch: int = 0
    best_val_acc: float = 0.0


def evaluate_batches(
    network: Network, xs: np.ndarray, ys: np.ndarray, batch_size: int
) -> tuple[float, float]:
    """Mean loss and accuracy over a labeled set (inference mode)."""
    total_loss = 0.0
    correct = 0
    for lo in range(0, len(xs), batch_size):
        batch = xs[lo : lo + batch_size]
        labels = ys[lo : lo + batch_size]
        probs = network.forward(batch, train=False)
        loss, _ = cross_entropy_batch(probs, labels)
        total_loss += loss * len(batch)
        correct += int((probs.argmax(axis=1) == labels).sum())
    return total_loss / len(xs), correct / len(xs)


def train(
    network: Network,
    train_x: np.ndarray,
    train_y: np.ndarray,
    val_x: np.ndarray,
    val_y: np.ndarray,
    config: TrainConfig = TrainConfig(),
    log: Optional[Callable[[EpochMetrics], None]] = None,
) -> TrainResult:
    """Optimize the network with mini-batch ADAM.

    Shuffling is seeded per epoch, metrics are recorded every epoch, and the
    loop stops once validation accuracy has not improved for ``patience``
    epochs. The returned network carries the best-validation weights.
    """
    if len(train_x) == 0 or len(val_x) == 0:
        raise ShapeError("train and validation splits must be nonempty")
    if train_x.ndim == 3:
        train_x = train_x[..., None]
    if val_x.ndim == 3:
        val_x = val_x[..., None]

    rng = np.random.default_rng(config.seed)
    optimizer = Adam(network.params(), config.adam())
    result = TrainResult(network=network)
    best_weights = network.get_weights()
    best_key = (-1.0, -np.inf)  # (val accuracy, -val loss)
    best_acc_seen = -1.0
    stale = 0

    for epoch in range(1, config.max_epochs + 1):
        perm = rng.permutation(len(train_x))
        epoch_loss = 0.0
        correct = 0
        for lo in range(0, len(perm), config.batch_size):
            idx = perm[lo : lo + config.batch_size]
            batch = train_x[idx]
            labels = train_y[idx]
            optimizer.zero_grad()
            probs = network.forward(batch, train=True)
            loss, dprobs = cross_entropy_batch(probs, labels)
            if not math.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch offset {lo}",
                    epoch=epoch, offset=lo,
                )
            network.backward(dprobs)
            optimizer.step()
            epoch_loss += loss * len(idx)
            correct += int((probs.argmax(axis=1) == labels).sum())

        val_loss, val_acc = evaluate_batches(network, val_x, val_y, config.batch_size)
        metrics = EpochMetrics(
            epoch=epoch,
            train_loss=epoch_loss / len(train_x),
            train_acc=correct / len(train_x),
            val_loss=val_loss,
            val_acc=val_acc,
        )
        result.metrics.append(metrics)
        if log is not None:
            log(metrics)

        # patience runs on validation accuracy alone; the saved checkpoint
        # additionally prefers the lower validation loss among equal-accuracy
        # epochs, so a saturated run keeps its sharpest weights
        key = (val_acc, -val_loss)
        if key > best_key:
            best_key = key
            best_weights = network.get_weights()
            result.best_epoch = epoch
        if val_acc > best_acc_seen:
            best_acc_seen = val_acc
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break

    network.set_weights(best_weights)
    result.best_val_acc = best_key[0]
    return result
