"""Runtime models: parameterized layer stacks built from a ModelSpec.

Model forward passes return raw logits; the output activation named in the
spec (softmax or sigmoid) is applied by ``predict_proba``/``predict`` so the
training loop can fuse it with the loss.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .layers import (
    Conv2D,
    Dense,
    Dropout,
    Flatten,
    MaxPool2x2,
    ReLU,
    Sigmoid,
    TimeDistributedDense,
    concat,
    concat_backward,
    sigmoid,
    softmax,
)
from .recurrent import LSTM, BiLSTM
from .spec import LayerSpec, ModelSpec, iter_shapes, validate_model_spec

__all__ = ["SequentialNetwork", "ParallelNetwork", "build_model", "predict"]


def _instantiate(ls: LayerSpec, in_shape: tuple[int, ...], rng: np.random.Generator):
    kind = ls.kind
    if kind == "conv2d":
        return Conv2D(in_shape[2], ls.filters, ls.kernel, rng)
    if kind == "maxpool2x2":
        return MaxPool2x2()
    if kind == "dense":
        return Dense(in_shape[0], ls.units, rng)
    if kind == "time_dense":
        return TimeDistributedDense(in_shape[1], ls.units, rng)
    if kind == "lstm":
        return LSTM(in_shape[1], ls.units, rng, return_sequences=ls.return_sequences)
    if kind == "bilstm":
        return BiLSTM(in_shape[1], ls.units, rng)
    if kind == "dropout":
        return Dropout(ls.rate, rng)
    if kind == "relu":
        return ReLU()
    if kind == "sigmoid":
        return Sigmoid()
    if kind == "flatten":
        return Flatten()
    raise ValueError(f"no runtime layer for kind {ls.kind!r}")


def _build_chain(layer_specs, input_shape, rng):
    shapes = iter_shapes(input_shape, layer_specs)
    return [_instantiate(ls, shape, rng) for ls, shape in zip(layer_specs, shapes)]


class _Network:
    """Shared plumbing: parameter access, head activation, batched inference."""

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.head = spec.layers[-1].kind  # "softmax" | "sigmoid"

    def _all_layers(self):
        raise NotImplementedError

    def parameters(self) -> list[np.ndarray]:
        return [p for layer in self._all_layers() for p in layer.params]

    def gradients(self) -> list[np.ndarray]:
        return [g for layer in self._all_layers() for g in layer.grads]

    def set_parameters(self, arrays) -> None:
        """Copy values into the existing parameter arrays (shapes must match)."""
        params = self.parameters()
        if len(arrays) != len(params):
            raise ShapeError(f"expected {len(params)} parameter arrays, got {len(arrays)}")
        arrays = [np.asarray(a) for a in arrays]
        for p, a in zip(params, arrays):
            if a.shape != p.shape:
                raise ShapeError(f"parameter shape {a.shape} != expected {p.shape}")
        for p, a in zip(params, arrays):
            p[...] = a

    def predict_proba(self, x) -> np.ndarray:
        """Batched class probabilities: (b, C) for softmax heads, (b, 1) for sigmoid."""
        logits = self.forward(x, training=False)
        return softmax(logits) if self.head == "softmax" else sigmoid(logits)


class SequentialNetwork(_Network):
    """Single-input layer stack (the stacked CNN and both recurrent models)."""

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        super().__init__(spec, rng)
        self.layers = _build_chain(spec.layers[:-1], spec.input_shape, rng)

    def _all_layers(self):
        return self.layers

    def forward(self, x, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[1:] != self.spec.input_shape:
            raise ShapeError(
                f"input shape {x.shape[1:]} != model input {self.spec.input_shape}"
            )
        for layer in self.layers:
            x = layer.forward(x, training)
        return x

    def backward(self, dlogits: np.ndarray) -> np.ndarray:
        grad = dlogits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad


class ParallelNetwork(_Network):
    """Three single-input branches whose features concatenate into one head."""

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        super().__init__(spec, rng)
        self.branches = [
            _build_chain(branch, spec.input_shape, rng) for branch in spec.branches
        ]
        widths = [
            iter_shapes(spec.input_shape, branch)[-1][0] for branch in spec.branches
        ]
        self._widths = widths
        self.head_layers = _build_chain(spec.layers[:-1], (sum(widths),), rng)

    def _all_layers(self):
        for branch in self.branches:
            yield from branch
        yield from self.head_layers

    def forward(self, xs, training: bool = False) -> np.ndarray:
        if not isinstance(xs, (tuple, list)) or len(xs) != len(self.branches):
            raise ShapeError(f"expected {len(self.branches)} input channels")
        outs = []
        for branch, x in zip(self.branches, xs):
            x = np.asarray(x, dtype=float)
            if x.shape[1:] != self.spec.input_shape:
                raise ShapeError(
                    f"branch input shape {x.shape[1:]} != model input {self.spec.input_shape}"
                )
            for layer in branch:
                x = layer.forward(x, training)
            outs.append(x)
        h = concat(outs)
        for layer in self.head_layers:
            h = layer.forward(h, training)
        return h

    def backward(self, dlogits: np.ndarray):
        grad = dlogits
        for layer in reversed(self.head_layers):
            grad = layer.backward(grad)
        parts = concat_backward(grad, self._widths)
        dxs = []
        for branch, part in zip(self.branches, parts):
            for layer in reversed(branch):
                part = layer.backward(part)
            dxs.append(part)
        return tuple(dxs)


def build_model(spec: ModelSpec, seed) -> SequentialNetwork | ParallelNetwork:
    """Materialize a spec into a parameterized model, seeding all randomness.

    The seed drives both weight initialization and the model's dropout
    stream, so identical (spec, seed) pairs produce identical models.
    """
    validate_model_spec(spec)
    rng = np.random.default_rng(seed)
    if spec.is_parallel:
        return ParallelNetwork(spec, rng)
    return SequentialNetwork(spec, rng)


def predict(model, x) -> np.ndarray | float:
    """Class probabilities for a single input sample.

    Softmax heads return a probability vector over the classes; sigmoid
    heads return the scalar probability of class 1.
    """
    if model.spec.is_parallel:
        batched = tuple(np.asarray(c, dtype=float)[None] for c in x)
    else:
        batched = np.asarray(x, dtype=float)[None]
    probs = model.predict_proba(batched)
    if model.head == "sigmoid":
        return float(probs[0, 0])
    return probs[0]
