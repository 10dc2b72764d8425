"""Mini-batch training loop with seeded shuffling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .losses import sigmoid_cross_entropy_with_logits, softmax_cross_entropy_with_logits
from .optim import Adam

__all__ = ["TrainConfig", "History", "default_batch_size", "train"]

CATEGORICAL_CE = "categorical-ce"
BINARY_CE = "binary-ce"


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run.

    batch_size None resolves per model family: 8 for the CNNs, 20 for the
    recurrent models.
    """

    learning_rate: float = 0.001
    batch_size: int | None = None
    epochs: int = 50
    loss: str = CATEGORICAL_CE
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8


@dataclass
class History:
    """Per-epoch mean training loss and training accuracy."""

    loss: list[float] = field(default_factory=list)
    accuracy: list[float] = field(default_factory=list)


def default_batch_size(model_name: str) -> int:
    return 20 if model_name in ("lstm", "bilstm") else 8


def _stack(data, parallel: bool):
    inputs = [sample for sample, _ in data]
    labels = np.array([int(label) for _, label in data])
    if parallel:
        width = len(inputs[0])
        xs = tuple(np.stack([inp[i] for inp in inputs]) for i in range(width))
    else:
        xs = np.stack(inputs)
    return xs, labels


def _take(xs, idx, parallel: bool):
    if parallel:
        return tuple(x[idx] for x in xs)
    return xs[idx]


def train(model, data, cfg: TrainConfig) -> History:
    """Train a model in place; returns the per-epoch history.

    Batches are formed by a freshly seeded shuffle each epoch, so a given
    (model seed, data, cfg.seed) triple reproduces the history bit for bit.
    """
    if not data:
        raise ValueError("training data is empty")
    if cfg.learning_rate < 0:
        raise ConfigurationError(f"learning rate must be >= 0, got {cfg.learning_rate}")
    if cfg.epochs < 0:
        raise ConfigurationError(f"epoch count must be >= 0, got {cfg.epochs}")
    classes = model.spec.output_classes
    if cfg.loss == CATEGORICAL_CE:
        if model.head != "softmax":
            raise ConfigurationError("categorical cross-entropy needs a softmax head")
        loss_fn = softmax_cross_entropy_with_logits
    elif cfg.loss == BINARY_CE:
        if model.head != "sigmoid":
            raise ConfigurationError("binary cross-entropy needs a sigmoid head")
        loss_fn = sigmoid_cross_entropy_with_logits
    else:
        raise ConfigurationError(f"unknown loss {cfg.loss!r}")

    parallel = model.spec.is_parallel
    xs, labels = _stack(data, parallel)
    if labels.min() < 0 or labels.max() >= classes:
        raise ValueError(
            f"labels must lie in [0, {classes}), got [{labels.min()}, {labels.max()}]"
        )
    batch = cfg.batch_size if cfg.batch_size is not None else default_batch_size(model.spec.name)
    if batch < 1:
        raise ConfigurationError(f"batch size must be >= 1, got {batch}")

    rng = np.random.default_rng(cfg.seed)
    adam = Adam(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon)
    history = History()
    n = labels.size
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total_loss = 0.0
        correct = 0
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            xb = _take(xs, idx, parallel)
            yb = labels[idx]
            logits = model.forward(xb, training=True)
            if model.head == "softmax":
                correct += int(np.sum(np.argmax(logits, axis=1) == yb))
            else:
                correct += int(np.sum((logits[:, 0] >= 0.0) == yb.astype(bool)))
            loss, dlogits = loss_fn(logits, yb)
            total_loss += loss * idx.size
            model.backward(dlogits)
            adam.step(model.parameters(), model.gradients())
        history.loss.append(total_loss / n)
        history.accuracy.append(correct / n)
    return history
