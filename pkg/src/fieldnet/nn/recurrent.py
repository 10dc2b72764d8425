"""Gated recurrent layers with backpropagation through time."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .layers import Layer, glorot_uniform, sigmoid

__all__ = ["LSTM", "BiLSTM"]


class LSTM(Layer):
    """Standard LSTM cell unrolled over time, zero initial hidden/cell state.

    Gates are sigmoid, candidate and output squashing are tanh. Input and
    recurrent weights use the concatenated layout (d, 4u) / (u, 4u) with
    column blocks ordered input, forget, candidate, output.
    """

    def __init__(self, input_dim: int, units: int, rng: np.random.Generator,
                 return_sequences: bool = True):
        super().__init__()
        self.units = units
        self.return_sequences = return_sequences
        self.w_in = glorot_uniform(rng, (input_dim, 4 * units), input_dim, units)
        self.w_rec = glorot_uniform(rng, (units, 4 * units), units, units)
        self.bias = np.zeros(4 * units)
        self.params = [self.w_in, self.w_rec, self.bias]
        self.grads = [np.zeros_like(p) for p in self.params]

    def forward(self, x, training=False):
        single = x.ndim == 2
        if single:
            x = x[None]
        if x.ndim != 3 or x.shape[2] != self.w_in.shape[0]:
            raise ShapeError(
                f"expected (batch, time, {self.w_in.shape[0]}) input, got shape {x.shape}"
            )
        b, t, _ = x.shape
        u = self.units
        h = np.zeros((b, u))
        c = np.zeros((b, u))
        seq = np.empty((b, t, u))
        self._cache = []
        self._single = single
        self._input_shape = x.shape
        for step in range(t):
            xt = x[:, step]
            h_prev, c_prev = h, c
            z = xt @ self.w_in + h_prev @ self.w_rec + self.bias
            i = sigmoid(z[:, :u])
            f = sigmoid(z[:, u:2 * u])
            g = np.tanh(z[:, 2 * u:3 * u])
            o = sigmoid(z[:, 3 * u:])
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h = o * tc
            seq[:, step] = h
            self._cache.append((xt, h_prev, c_prev, i, f, g, o, tc))
        out = seq if self.return_sequences else h
        return out[0] if single else out

    def backward(self, grad):
        if self._single:
            grad = grad[None]
        b, t, d = self._input_shape
        u = self.units
        if self.return_sequences:
            gseq = grad
        else:
            gseq = np.zeros((b, t, u))
            gseq[:, -1] = grad
        d_win = np.zeros_like(self.w_in)
        d_wrec = np.zeros_like(self.w_rec)
        d_bias = np.zeros_like(self.bias)
        dx = np.empty((b, t, d))
        dh_next = np.zeros((b, u))
        dc_next = np.zeros((b, u))
        for step in reversed(range(t)):
            xt, h_prev, c_prev, i, f, g, o, tc = self._cache[step]
            dh = gseq[:, step] + dh_next
            do = dh * tc
            dc = dc_next + dh * o * (1.0 - tc * tc)
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * c_prev * f * (1.0 - f),
                    dc * i * (1.0 - g * g),
                    do * o * (1.0 - o),
                ],
                axis=1,
            )
            dc_next = dc * f
            d_win += xt.T @ dz
            d_wrec += h_prev.T @ dz
            d_bias += dz.sum(axis=0)
            dx[:, step] = dz @ self.w_in.T
            dh_next = dz @ self.w_rec.T
        self.grads[0][...] = d_win
        self.grads[1][...] = d_wrec
        self.grads[2][...] = d_bias
        return dx[0] if self._single else dx


class BiLSTM(Layer):
    """Bidirectional LSTM returning per-timestep features of total width `units`.

    One cell runs forward in time, a second runs over the reversed sequence,
    and their outputs are concatenated, so each direction carries units/2
    features.
    """

    def __init__(self, input_dim: int, units: int, rng: np.random.Generator):
        super().__init__()
        if units % 2 != 0:
            raise ShapeError(f"bidirectional width must be even, got {units}")
        self.units = units
        self.forward_cell = LSTM(input_dim, units // 2, rng, return_sequences=True)
        self.backward_cell = LSTM(input_dim, units // 2, rng, return_sequences=True)
        self.params = self.forward_cell.params + self.backward_cell.params
        self.grads = self.forward_cell.grads + self.backward_cell.grads

    def forward(self, x, training=False):
        single = x.ndim == 2
        if single:
            x = x[None]
        self._single = single
        out_fwd = self.forward_cell.forward(x, training)
        out_bwd = self.backward_cell.forward(x[:, ::-1], training)[:, ::-1]
        out = np.concatenate([out_fwd, out_bwd], axis=2)
        return out[0] if single else out

    def backward(self, grad):
        if self._single:
            grad = grad[None]
        half = self.units // 2
        dx_fwd = self.forward_cell.backward(grad[:, :, :half])
        dx_bwd = self.backward_cell.backward(grad[:, ::-1, half:])[:, ::-1]
        dx = dx_fwd + dx_bwd
        return dx[0] if self._single else dx
