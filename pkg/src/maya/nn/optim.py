"""ADAM optimizer with bias correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from .layers import Param


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.learning_rate < 0.0:
            raise ShapeError(f"learning rate must be >= 0, got {self.learning_rate}")
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ShapeError("beta1 and beta2 must lie in (0, 1)")


def adam_update(
    value: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    step: int,
    config: AdamConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One bias-corrected ADAM update; ``step`` is the 1-based step counter."""
    if grad.shape != value.shape or m.shape != value.shape or v.shape != value.shape:
        raise ShapeError("parameter/gradient/moment shapes must match")
    m = config.beta1 * m + (1.0 - config.beta1) * grad
    v = config.beta2 * v + (1.0 - config.beta2) * grad * grad
    m_hat = m / (1.0 - config.beta1 ** step)
    v_hat = v / (1.0 - config.beta2 ** step)
    value = value - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return value, m, v


class Adam:
    """Holds per-parameter moment accumulators and the shared step counter."""

    def __init__(self, params: list[Param], config: AdamConfig = AdamConfig()):
        self.params = params
        self.config = config
        self.step_count = 0
        self.m = [np.zeros_like(p.value) for p in params]
        self.v = [np.zeros_like(p.value) for p in params]

    def step(self) -> None:
        self.step_count += 1
        for i, p in enumerate(self.params):
            p.value[...], self.m[i], self.v[i] = adam_update(
                p.value, p.grad, self.m[i], self.v[i], self.step_count, self.config
            )

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad[...] = 0.0
