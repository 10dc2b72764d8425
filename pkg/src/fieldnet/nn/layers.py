"""Dense-tensor layers with analytic backward passes.

Layers operate on arrays with a leading batch axis: images are NHWC,
sequences are (batch, time, features). ``forward`` caches whatever the
backward pass needs; ``backward`` returns the gradient with respect to the
layer input and writes parameter gradients into ``grads``, aligned
index-for-index with ``params``. The functional cores (``conv2d_forward``
etc.) also accept single unbatched samples.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError

__all__ = [
    "Layer",
    "Conv2D",
    "MaxPool2x2",
    "Dense",
    "TimeDistributedDense",
    "ReLU",
    "Sigmoid",
    "Softmax",
    "Dropout",
    "Flatten",
    "glorot_uniform",
    "conv2d_forward",
    "conv2d_backward",
    "maxpool2x2",
    "maxpool2x2_backward",
    "dense_forward",
    "dense_backward",
    "relu",
    "sigmoid",
    "softmax",
    "dropout",
    "concat",
    "concat_backward",
]


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    """Fan-scaled uniform init on +-sqrt(6 / (fan_in + fan_out))."""
    limit = float(np.sqrt(6.0 / (fan_in + fan_out)))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    """Base class; parameter-free layers keep empty param/grad lists."""

    def __init__(self):
        self.params: list[np.ndarray] = []
        self.grads: list[np.ndarray] = []

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# convolution


def _im2col(x: np.ndarray, k: int) -> np.ndarray:
    """Unfold NHWC into rows of flattened k*k*c patches, one per output pixel."""
    view = sliding_window_view(x, (k, k), axis=(1, 2))  # (b, oh, ow, c, k, k)
    view = view.transpose(0, 1, 2, 4, 5, 3)  # (b, oh, ow, k, k, c)
    return np.ascontiguousarray(view).reshape(-1, k * k * x.shape[3])


def conv2d_forward(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Valid (unpadded) cross-correlation of NHWC input with (k, k, c, f) kernels."""
    single = x.ndim == 3
    if single:
        x = x[None]
    if x.ndim != 4 or kernels.ndim != 4:
        raise ShapeError("conv2d expects (h, w, c) or (b, h, w, c) input and (k, k, c, f) kernels")
    b, h, w, c = x.shape
    k, k2, kc, f = kernels.shape
    if k != k2:
        raise ShapeError(f"kernels must be square, got {k}x{k2}")
    if kc != c:
        raise ShapeError(f"kernel channels {kc} != input channels {c}")
    if k > h or k > w:
        raise ShapeError(f"kernel side {k} exceeds input {h}x{w}")
    if bias.shape != (f,):
        raise ShapeError(f"bias shape {bias.shape} != ({f},)")
    oh, ow = h - k + 1, w - k + 1
    out = _im2col(x, k) @ kernels.reshape(k * k * c, f) + bias
    out = out.reshape(b, oh, ow, f)
    return out[0] if single else out


def conv2d_backward(grad: np.ndarray, x: np.ndarray, kernels: np.ndarray):
    """Gradients of the valid cross-correlation: (d_input, d_kernels, d_bias)."""
    single = x.ndim == 3
    if single:
        x = x[None]
        grad = grad[None]
    b, h, w, c = x.shape
    k = kernels.shape[0]
    f = kernels.shape[3]
    oh, ow = h - k + 1, w - k + 1
    if grad.shape != (b, oh, ow, f):
        raise ShapeError(f"upstream gradient shape {grad.shape} != {(b, oh, ow, f)}")
    flat = grad.reshape(-1, f)
    d_kernels = (_im2col(x, k).T @ flat).reshape(kernels.shape)
    d_bias = flat.sum(axis=0)
    dx = np.zeros_like(x)
    for di in range(k):
        for dj in range(k):
            dx[:, di:di + oh, dj:dj + ow, :] += grad @ kernels[di, dj].T
    if single:
        dx = dx[0]
    return dx, d_kernels, d_bias


class Conv2D(Layer):
    """Valid cross-correlation with per-filter bias."""

    def __init__(self, in_channels: int, filters: int, kernel: int, rng: np.random.Generator):
        super().__init__()
        fan_in = kernel * kernel * in_channels
        fan_out = kernel * kernel * filters
        self.kernels = glorot_uniform(rng, (kernel, kernel, in_channels, filters), fan_in, fan_out)
        self.bias = np.zeros(filters)
        self.params = [self.kernels, self.bias]
        self.grads = [np.zeros_like(self.kernels), np.zeros_like(self.bias)]

    def forward(self, x, training=False):
        self._x = x
        return conv2d_forward(x, self.kernels, self.bias)

    def backward(self, grad):
        dx, dk, db = conv2d_backward(grad, self._x, self.kernels)
        self.grads[0][...] = dk
        self.grads[1][...] = db
        return dx


# ---------------------------------------------------------------------------
# pooling


def maxpool2x2(x: np.ndarray):
    """2x2 max pool with stride 2; odd trailing rows/columns are dropped.

    Returns (pooled, argmax_idx). argmax_idx picks, per window, the first
    maximal element in row-major window order; the backward pass routes the
    upstream gradient there and nowhere else.
    """
    single = x.ndim == 3
    if single:
        x = x[None]
    b, h, w, c = x.shape
    oh, ow = h // 2, w // 2
    if oh == 0 or ow == 0:
        raise ShapeError(f"input {h}x{w} too small for 2x2 pooling")
    windows = (
        x[:, : 2 * oh, : 2 * ow, :]
        .reshape(b, oh, 2, ow, 2, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(b, oh, ow, 4, c)
    )
    idx = windows.argmax(axis=3)
    out = np.take_along_axis(windows, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    if single:
        return out[0], idx[0]
    return out, idx


def maxpool2x2_backward(grad: np.ndarray, argmax_idx: np.ndarray, input_shape) -> np.ndarray:
    """Scatter the upstream gradient back to each window's argmax position."""
    single = len(input_shape) == 3
    if single:
        grad = grad[None]
        argmax_idx = argmax_idx[None]
        input_shape = (1,) + tuple(input_shape)
    b, h, w, c = input_shape
    oh, ow = h // 2, w // 2
    windows = np.zeros((b, oh, ow, 4, c))
    np.put_along_axis(windows, argmax_idx[:, :, :, None, :], grad[:, :, :, None, :], axis=3)
    dx = np.zeros(input_shape)
    dx[:, : 2 * oh, : 2 * ow, :] = (
        windows.reshape(b, oh, ow, 2, 2, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(b, 2 * oh, 2 * ow, c)
    )
    return dx[0] if single else dx


class MaxPool2x2(Layer):
    def forward(self, x, training=False):
        self._input_shape = x.shape
        out, self._idx = maxpool2x2(x)
        return out

    def backward(self, grad):
        return maxpool2x2_backward(grad, self._idx, self._input_shape)


# ---------------------------------------------------------------------------
# dense


def dense_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Affine map x @ W + b for (d,) or (b, d) input."""
    if x.shape[-1] != weights.shape[0]:
        raise ShapeError(f"input width {x.shape[-1]} != weight rows {weights.shape[0]}")
    if bias.shape != (weights.shape[1],):
        raise ShapeError(f"bias shape {bias.shape} != ({weights.shape[1]},)")
    return x @ weights + bias


def dense_backward(grad: np.ndarray, x: np.ndarray, weights: np.ndarray):
    """Gradients of the affine map: (d_input, d_weights, d_bias)."""
    single = x.ndim == 1
    if single:
        x = x[None]
        grad = grad[None]
    d_weights = x.T @ grad
    d_bias = grad.sum(axis=0)
    dx = grad @ weights.T
    return (dx[0] if single else dx), d_weights, d_bias


class Dense(Layer):
    def __init__(self, in_features: int, units: int, rng: np.random.Generator):
        super().__init__()
        self.weights = glorot_uniform(rng, (in_features, units), in_features, units)
        self.bias = np.zeros(units)
        self.params = [self.weights, self.bias]
        self.grads = [np.zeros_like(self.weights), np.zeros_like(self.bias)]

    def forward(self, x, training=False):
        self._x = x
        return dense_forward(x, self.weights, self.bias)

    def backward(self, grad):
        dx, dw, db = dense_backward(grad, self._x, self.weights)
        self.grads[0][...] = dw
        self.grads[1][...] = db
        return dx


class TimeDistributedDense(Layer):
    """Dense map applied independently at every timestep of (b, t, d) input."""

    def __init__(self, in_features: int, units: int, rng: np.random.Generator):
        super().__init__()
        self.weights = glorot_uniform(rng, (in_features, units), in_features, units)
        self.bias = np.zeros(units)
        self.params = [self.weights, self.bias]
        self.grads = [np.zeros_like(self.weights), np.zeros_like(self.bias)]

    def forward(self, x, training=False):
        if x.ndim != 3:
            raise ShapeError(f"expected (batch, time, features) input, got shape {x.shape}")
        self._x = x
        return x @ self.weights + self.bias

    def backward(self, grad):
        self.grads[0][...] = np.einsum("btd,btu->du", self._x, grad)
        self.grads[1][...] = grad.sum(axis=(0, 1))
        return grad @ self.weights.T


# ---------------------------------------------------------------------------
# activations


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: np.ndarray) -> np.ndarray:
    """Stable softmax over the last axis (max-subtraction before exp)."""
    shifted = x - np.max(x, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class ReLU(Layer):
    def forward(self, x, training=False):
        self._mask = x > 0.0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad):
        return np.where(self._mask, grad, 0.0)


class Sigmoid(Layer):
    def forward(self, x, training=False):
        self._y = sigmoid(x)
        return self._y

    def backward(self, grad):
        return grad * self._y * (1.0 - self._y)


class Softmax(Layer):
    def forward(self, x, training=False):
        self._y = softmax(x)
        return self._y

    def backward(self, grad):
        y = self._y
        return y * (grad - np.sum(grad * y, axis=-1, keepdims=True))


# ---------------------------------------------------------------------------
# regularization / reshaping


def dropout(x: np.ndarray, p: float, training: bool, rng: np.random.Generator) -> np.ndarray:
    """Inverted dropout: zero with probability p, scale survivors by 1/(1-p).

    Identity at inference time and for p == 0.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must lie in [0, 1), got {p}")
    if not training or p == 0.0:
        return x
    keep = rng.random(x.shape) >= p
    return x * keep / (1.0 - p)


class Dropout(Layer):
    def __init__(self, rate: float, rng: np.random.Generator):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout probability must lie in [0, 1), got {rate}")
        self.rate = rate
        self.rng = rng

    def forward(self, x, training=False):
        if not training or self.rate == 0.0:
            self._scale = None
            return x
        keep = self.rng.random(x.shape) >= self.rate
        self._scale = keep / (1.0 - self.rate)
        return x * self._scale

    def backward(self, grad):
        if self._scale is None:
            return grad
        return grad * self._scale


class Flatten(Layer):
    def forward(self, x, training=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._shape)


# ---------------------------------------------------------------------------
# concatenation (used by the multi-branch model head)


def concat(tensors) -> np.ndarray:
    """Order-preserving concatenation of vectors, or of batched vectors, along features."""
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat needs at least one input")
    ndim = tensors[0].ndim
    if ndim not in (1, 2) or any(t.ndim != ndim for t in tensors):
        raise ShapeError("concat expects all inputs to be vectors or batched vectors")
    return np.concatenate(tensors, axis=-1)


def concat_backward(grad: np.ndarray, widths) -> list[np.ndarray]:
    """Split the upstream gradient back into per-input segments."""
    if sum(widths) != grad.shape[-1]:
        raise ShapeError(f"gradient width {grad.shape[-1]} != sum of segments {sum(widths)}")
    cuts = np.cumsum(widths)[:-1]
    return np.split(grad, cuts, axis=-1)
