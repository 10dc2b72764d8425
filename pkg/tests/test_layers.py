"""Layer forward oracles and finite-difference gradient checks."""

import numpy as np
import pytest
from conftest import check_gradients, max_rel_error, numerical_gradient

from fieldnet.errors import ShapeError
from fieldnet.nn import (
    Conv2D,
    Dense,
    Dropout,
    Flatten,
    MaxPool2x2,
    ReLU,
    Sigmoid,
    Softmax,
    TimeDistributedDense,
    concat,
    concat_backward,
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    dropout,
    maxpool2x2,
    maxpool2x2_backward,
    relu,
    sigmoid,
    softmax,
)


def oracle_conv2d(x, kernels, bias):
    """Literal quadruple-loop valid cross-correlation, one sample."""
    h, w, c = x.shape
    k = kernels.shape[0]
    f = kernels.shape[3]
    out = np.zeros((h - k + 1, w - k + 1, f))
    for i in range(h - k + 1):
        for j in range(w - k + 1):
            for fi in range(f):
                acc = bias[fi]
                for di in range(k):
                    for dj in range(k):
                        for ci in range(c):
                            acc += x[i + di, j + dj, ci] * kernels[di, dj, ci, fi]
                out[i, j, fi] = acc
    return out


class TestConvForward:
    def test_sum_of_ones(self):
        x = np.ones((3, 3, 1))
        kernels = np.ones((2, 2, 1, 1))
        out = conv2d_forward(x, kernels, np.zeros(1))
        assert np.array_equal(out, np.full((2, 2, 1), 4.0))

    def test_one_by_one_identity(self):
        x = np.random.default_rng(0).normal(size=(4, 4, 1))
        kernels = np.ones((1, 1, 1, 1))
        assert np.allclose(conv2d_forward(x, kernels, np.zeros(1)), x)

    def test_matches_quadruple_loop_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(5, 5, 2))
        kernels = rng.normal(size=(3, 3, 2, 4))
        bias = rng.normal(size=4)
        got = conv2d_forward(x, kernels, bias)
        assert np.max(np.abs(got - oracle_conv2d(x, kernels, bias))) <= 1e-12

    def test_batched_matches_per_sample(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(3, 6, 6, 2))
        kernels = rng.normal(size=(3, 3, 2, 5))
        bias = rng.normal(size=5)
        batched = conv2d_forward(x, kernels, bias)
        for b in range(3):
            assert np.allclose(batched[b], conv2d_forward(x[b], kernels, bias))

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            conv2d_forward(np.zeros((4, 4, 2)), np.zeros((3, 3, 3, 1)), np.zeros(1))
        with pytest.raises(ShapeError):
            conv2d_forward(np.zeros((2, 2, 1)), np.zeros((3, 3, 1, 1)), np.zeros(1))
        with pytest.raises(ShapeError):
            conv2d_forward(np.zeros((4, 4, 1)), np.zeros((3, 3, 1, 2)), np.zeros(3))


class TestConvBackward:
    def test_zero_upstream_gives_zero_gradients(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(4, 4, 2))
        kernels = rng.normal(size=(2, 2, 2, 3))
        dx, dk, db = conv2d_backward(np.zeros((3, 3, 3)), x, kernels)
        assert not dx.any() and not dk.any() and not db.any()

    def test_bias_gradient_is_channel_sum(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(2, 5, 5, 1))
        kernels = rng.normal(size=(2, 2, 1, 3))
        grad = rng.normal(size=(2, 4, 4, 3))
        _, _, db = conv2d_backward(grad, x, kernels)
        assert np.allclose(db, grad.sum(axis=(0, 1, 2)))

    def test_finite_differences(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(3, 3, 1))
        kernels = rng.normal(size=(2, 2, 1, 2))
        bias = rng.normal(size=2)
        weighting = rng.normal(size=(2, 2, 2))

        def loss():
            return float(np.sum(conv2d_forward(x, kernels, bias) * weighting))

        dx, dk, db = conv2d_backward(weighting, x, kernels)
        check_gradients(loss, [x, kernels, bias], [dx, dk, db])


class TestMaxPool:
    def test_single_window(self):
        out, _ = maxpool2x2(np.array([[1.0, 2.0], [3.0, 4.0]])[:, :, None])
        assert np.array_equal(out, [[[4.0]]])

    def test_odd_edges_dropped(self):
        out, _ = maxpool2x2(np.zeros((5, 5, 3)))
        assert out.shape == (2, 2, 3)

    def test_tie_routes_to_first_in_scan_order(self):
        x = np.full((2, 2, 1), 7.0)
        out, idx = maxpool2x2(x)
        dx = maxpool2x2_backward(np.array([[[5.0]]]), idx, x.shape)
        expected = np.zeros((2, 2, 1))
        expected[0, 0, 0] = 5.0
        assert np.array_equal(dx, expected)

    def test_gradient_routes_to_argmax_only(self):
        rng = np.random.default_rng(6)
        x = rng.permutation(16).astype(float).reshape(4, 4, 1)
        out, idx = maxpool2x2(x)
        grad = rng.normal(size=out.shape)
        dx = maxpool2x2_backward(grad, idx, x.shape)
        assert np.count_nonzero(dx) == out.size
        assert np.allclose(dx.sum(), grad.sum())
        for i in range(2):
            for j in range(2):
                window = x[2 * i:2 * i + 2, 2 * j:2 * j + 2, 0]
                mask = dx[2 * i:2 * i + 2, 2 * j:2 * j + 2, 0] != 0
                assert window[mask] == window.max()


class TestDense:
    def test_identity_weights(self):
        x = np.array([1.0, -2.0, 3.0])
        assert np.array_equal(dense_forward(x, np.eye(3), np.zeros(3)), x)

    def test_zero_weights_give_bias(self):
        bias = np.array([0.5, -0.5])
        out = dense_forward(np.ones(4), np.zeros((4, 2)), bias)
        assert np.array_equal(out, bias)

    def test_finite_differences(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=4)
        weights = rng.normal(size=(4, 3))
        bias = rng.normal(size=3)
        weighting = rng.normal(size=3)

        def loss():
            return float(np.sum(dense_forward(x, weights, bias) * weighting))

        dx, dw, db = dense_backward(weighting, x, weights)
        check_gradients(loss, [x, weights, bias], [dx, dw, db])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            dense_forward(np.zeros(3), np.zeros((4, 2)), np.zeros(2))


class TestActivations:
    def test_relu_values(self):
        assert np.array_equal(relu(np.array([-1.0, 2.0])), [0.0, 2.0])

    def test_softmax_uniform(self):
        assert np.allclose(softmax(np.zeros(3)), [1 / 3, 1 / 3, 1 / 3], atol=1e-15)

    def test_softmax_large_inputs_stable(self):
        out = softmax(np.array([1000.0, 1000.0]))
        assert np.allclose(out, [0.5, 0.5])
        assert np.isfinite(out).all()

    def test_softmax_sums_to_one_and_shift_invariant(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(5, 7))
        out = softmax(x)
        assert np.max(np.abs(out.sum(axis=1) - 1.0)) <= 1e-12
        shifted = softmax(x + 3.7)
        assert np.max(np.abs(out - shifted)) <= 1e-12

    def test_sigmoid_extremes(self):
        out = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
        assert np.allclose(out, [0.0, 0.5, 1.0])

    @pytest.mark.parametrize("layer_cls", [ReLU, Sigmoid, Softmax])
    def test_activation_gradients(self, layer_cls):
        rng = np.random.default_rng(9)
        layer = layer_cls()
        x = rng.normal(size=(3, 5)) + 0.1  # keep relu inputs away from the kink
        weighting = rng.normal(size=(3, 5))

        def loss():
            return float(np.sum(layer.forward(x) * weighting))

        layer.forward(x)
        dx = layer.backward(weighting)
        assert max_rel_error(dx, numerical_gradient(loss, x)) <= 1e-4


class TestDropout:
    def test_p_zero_is_identity(self):
        x = np.random.default_rng(10).normal(size=(4, 4))
        rng = np.random.default_rng(0)
        assert np.array_equal(dropout(x, 0.0, True, rng), x)

    def test_inference_is_identity(self):
        x = np.random.default_rng(11).normal(size=(4, 4))
        rng = np.random.default_rng(0)
        assert np.array_equal(dropout(x, 0.9, False, rng), x)

    def test_mean_preserved_at_half_rate(self):
        rng = np.random.default_rng(12)
        x = np.ones(100_000)
        out = dropout(x, 0.5, True, rng)
        assert abs(out.mean() - 1.0) <= 0.05
        kept = out != 0.0
        assert np.allclose(out[kept], 2.0)

    def test_invalid_rate(self):
        with pytest.raises(ValueError):
            dropout(np.zeros(3), 1.0, True, np.random.default_rng(0))

    def test_layer_backward_uses_same_mask(self):
        rng = np.random.default_rng(13)
        layer = Dropout(0.5, rng)
        x = np.ones((200,))
        out = layer.forward(x, training=True)
        grad = layer.backward(np.ones_like(x))
        assert np.array_equal(out, grad)  # both equal mask / (1-p)


class TestFlattenConcat:
    def test_flatten_round_trip(self):
        layer = Flatten()
        x = np.arange(24.0).reshape(2, 3, 4)
        out = layer.forward(x)
        assert out.shape == (2, 12)
        assert np.array_equal(layer.backward(out), x)

    def test_concat_widths(self):
        parts = [np.ones((2, 576)), np.ones((2, 576)), np.ones((2, 576))]
        assert concat(parts).shape == (2, 1728)

    def test_concat_single_input_identity(self):
        x = np.arange(5.0)
        assert np.array_equal(concat([x]), x)

    def test_concat_backward_reassembles(self):
        rng = np.random.default_rng(14)
        widths = [3, 5, 2]
        grad = rng.normal(size=(4, 10))
        parts = concat_backward(grad, widths)
        assert [p.shape[1] for p in parts] == widths
        assert np.array_equal(np.concatenate(parts, axis=1), grad)

    def test_concat_rejects_mixed_rank(self):
        with pytest.raises(ShapeError):
            concat([np.zeros((2, 3)), np.zeros(3)])


class TestTimeDistributedDense:
    def test_equals_per_timestep_dense(self):
        rng = np.random.default_rng(15)
        layer = TimeDistributedDense(3, 4, rng)
        x = rng.normal(size=(2, 6, 3))
        out = layer.forward(x)
        assert out.shape == (2, 6, 4)
        for t in range(6):
            step = dense_forward(x[:, t], layer.weights, layer.bias)
            assert np.allclose(out[:, t], step)

    def test_finite_differences(self):
        rng = np.random.default_rng(16)
        layer = TimeDistributedDense(2, 3, rng)
        x = rng.normal(size=(2, 4, 2))
        weighting = rng.normal(size=(2, 4, 3))

        def loss():
            return float(np.sum(layer.forward(x) * weighting))

        layer.forward(x)
        dx = layer.backward(weighting)
        check_gradients(loss, [x, layer.weights, layer.bias],
                        [dx, layer.grads[0], layer.grads[1]])


class TestLayerClasses:
    def test_conv_layer_uses_functional_core(self):
        rng = np.random.default_rng(17)
        layer = Conv2D(2, 3, 3, rng)
        x = rng.normal(size=(2, 5, 5, 2))
        assert np.array_equal(layer.forward(x), conv2d_forward(x, layer.kernels, layer.bias))

    def test_dense_layer_gradient_shapes(self):
        rng = np.random.default_rng(18)
        layer = Dense(4, 2, rng)
        x = rng.normal(size=(3, 4))
        layer.forward(x)
        layer.backward(np.ones((3, 2)))
        assert layer.grads[0].shape == layer.weights.shape
        assert layer.grads[1].shape == layer.bias.shape

    def test_maxpool_layer_round_trip(self):
        rng = np.random.default_rng(19)
        layer = MaxPool2x2()
        x = rng.normal(size=(2, 6, 6, 3))
        out = layer.forward(x)
        assert out.shape == (2, 3, 3, 3)
        dx = layer.backward(np.ones_like(out))
        assert dx.shape == x.shape
