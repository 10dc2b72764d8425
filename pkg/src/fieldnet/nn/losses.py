"""Classification losses, with gradients fused through their activations."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .layers import sigmoid, softmax

__all__ = [
    "cross_entropy",
    "binary_cross_entropy",
    "softmax_cross_entropy_with_logits",
    "sigmoid_cross_entropy_with_logits",
]

_PROB_FLOOR = 1e-12


def cross_entropy(probs, target: int) -> float:
    """-log(probs[target]) with the probability clamped to >= 1e-12."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1:
        raise ShapeError(f"expected a probability vector, got shape {probs.shape}")
    if abs(float(probs.sum()) - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {probs.sum()}, expected 1")
    if not 0 <= target < probs.size:
        raise IndexError(f"target {target} out of range for {probs.size} classes")
    return float(-np.log(max(float(probs[target]), _PROB_FLOOR)))


def binary_cross_entropy(p: float, target: int) -> float:
    """-[y log p + (1-y) log(1-p)] with p clamped away from 0 and 1."""
    if target not in (0, 1):
        raise IndexError(f"binary target must be 0 or 1, got {target}")
    p = min(max(float(p), _PROB_FLOOR), 1.0 - _PROB_FLOOR)
    return float(-(target * np.log(p) + (1 - target) * np.log(1.0 - p)))


def softmax_cross_entropy_with_logits(logits: np.ndarray, targets: np.ndarray):
    """Mean categorical CE over a batch of logits, plus its fused gradient.

    The softmax and the log cancel analytically, so the gradient with
    respect to the logits is (probs - onehot) / batch.
    """
    if logits.ndim != 2:
        raise ShapeError(f"expected (batch, classes) logits, got shape {logits.shape}")
    targets = np.asarray(targets, dtype=int)
    rows = np.arange(logits.shape[0])
    probs = softmax(logits)
    loss = float(np.mean(-np.log(np.maximum(probs[rows, targets], _PROB_FLOOR))))
    dlogits = probs
    dlogits[rows, targets] -= 1.0
    return loss, dlogits / logits.shape[0]


def sigmoid_cross_entropy_with_logits(logits: np.ndarray, targets: np.ndarray):
    """Mean binary CE on sigmoid(logits) of shape (batch, 1); gradient is (p - y) / batch."""
    if logits.ndim != 2 or logits.shape[1] != 1:
        raise ShapeError(f"expected (batch, 1) logits, got shape {logits.shape}")
    z = logits[:, 0]
    y = np.asarray(targets, dtype=float)
    # log(1 + e^z) - y*z, evaluated without overflow
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    dlogits = ((sigmoid(z) - y) / z.size)[:, None]
    return loss, dlogits
