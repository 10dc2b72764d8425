"""Self-contained neural-network engine: layers, losses, Adam, and models."""

from .layers import (
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
from .losses import (
    binary_cross_entropy,
    cross_entropy,
    sigmoid_cross_entropy_with_logits,
    softmax_cross_entropy_with_logits,
)
from .model import ParallelNetwork, SequentialNetwork, build_model, predict
from .optim import Adam, AdamState, adam_step, init_adam_state
from .recurrent import BiLSTM, LSTM
from .spec import (
    LayerSpec,
    ModelSpec,
    build_bilstm,
    build_lstm,
    build_parallel_cnn,
    build_single_cnn,
    iter_shapes,
    validate_model_spec,
)
from .train import History, TrainConfig, default_batch_size, train

__all__ = [
    "Conv2D", "Dense", "Dropout", "Flatten", "MaxPool2x2", "ReLU", "Sigmoid",
    "Softmax", "TimeDistributedDense", "LSTM", "BiLSTM",
    "concat", "concat_backward", "conv2d_backward", "conv2d_forward",
    "dense_backward", "dense_forward", "dropout", "maxpool2x2",
    "maxpool2x2_backward", "relu", "sigmoid", "softmax",
    "binary_cross_entropy", "cross_entropy",
    "sigmoid_cross_entropy_with_logits", "softmax_cross_entropy_with_logits",
    "ParallelNetwork", "SequentialNetwork", "build_model", "predict",
    "Adam", "AdamState", "adam_step", "init_adam_state",
    "LayerSpec", "ModelSpec", "build_bilstm", "build_lstm",
    "build_parallel_cnn", "build_single_cnn", "iter_shapes", "validate_model_spec",
    "History", "TrainConfig", "default_batch_size", "train",
]
