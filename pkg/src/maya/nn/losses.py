"""Functional activations and the classification loss."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError

PROB_FLOOR = 1e-12


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax(x: np.ndarray) -> np.ndarray:
    """Stabilized softmax over the last axis."""
    x = np.asarray(x, dtype=np.float64)
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def l2_normalize(x: np.ndarray) -> np.ndarray:
    """Scale a vector to unit norm; the zero vector maps to itself."""
    x = np.asarray(x, dtype=np.float64)
    norm = np.linalg.norm(x)
    return x / norm if norm > 0.0 else x.copy()


def cross_entropy_loss(probs: np.ndarray, label: int) -> float:
    """-log(probs[label]) with the probability floored at 1e-12."""
    probs = np.asarray(probs, dtype=np.float64)
    if not 0 <= label < probs.shape[-1]:
        raise ShapeError(f"label {label} out of range for {probs.shape[-1]} classes")
    return float(-np.log(max(float(probs[label]), PROB_FLOOR)))


def cross_entropy_batch(probs: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over a batch plus the gradient wrt probs.

    Probabilities at or below the floor contribute a constant loss and a zero
    gradient (the clamp is flat there).
    """
    n = probs.shape[0]
    picked = probs[np.arange(n), labels]
    clamped = np.maximum(picked, PROB_FLOOR)
    loss = float(-np.log(clamped).mean())
    dprobs = np.zeros_like(probs)
    live = picked > PROB_FLOOR
    dprobs[np.arange(n), labels] = np.where(live, -1.0 / clamped, 0.0) / n
    return loss, dprobs
