"""Verify analytic backward passes against central finite differences.

Every layer in the engine carries a hand-derived backward pass; this script
spot-checks a convolution and an LSTM against numerical gradients, the same
way the test suite does at scale.
"""

import numpy as np

from fieldnet.nn import LSTM, conv2d_backward, conv2d_forward


def numerical_gradient(f, x, h=1e-5):
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        ix = it.multi_index
        keep = x[ix]
        x[ix] = keep + h
        up = f()
        x[ix] = keep - h
        down = f()
        x[ix] = keep
        grad[ix] = (up - down) / (2 * h)
    return grad


def rel_error(a, b):
    return np.max(np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-8))


rng = np.random.default_rng(0)

print("convolution (5x5x2 input, 3x3 kernels, 4 filters)")
x = rng.normal(size=(5, 5, 2))
kernels = rng.normal(size=(3, 3, 2, 4))
bias = rng.normal(size=4)
weighting = rng.normal(size=(3, 3, 4))
loss = lambda: float(np.sum(conv2d_forward(x, kernels, bias) * weighting))
dx, dk, db = conv2d_backward(weighting, x, kernels)
print(f"  d_input  rel error: {rel_error(dx, numerical_gradient(loss, x)):.2e}")
print(f"  d_kernel rel error: {rel_error(dk, numerical_gradient(loss, kernels)):.2e}")
print(f"  d_bias   rel error: {rel_error(db, numerical_gradient(loss, bias)):.2e}")

print("\nlstm (3 features, 4 units, 5 timesteps, backprop through time)")
layer = LSTM(3, 4, rng, return_sequences=True)
seq = rng.normal(size=(2, 5, 3))
weighting = rng.normal(size=(2, 5, 4))
loss = lambda: float(np.sum(layer.forward(seq) * weighting))
layer.forward(seq)
d_seq = layer.backward(weighting)
print(f"  d_input  rel error: {rel_error(d_seq, numerical_gradient(loss, seq)):.2e}")
for name, param, grad in zip(("w_in", "w_rec", "bias"), layer.params, layer.grads):
    print(f"  d_{name:<6} rel error: {rel_error(grad, numerical_gradient(loss, param)):.2e}")
