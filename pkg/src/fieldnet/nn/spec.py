"""Architecture descriptions and the four model builders.

A ModelSpec is a declarative layer chain (plus branch chains for the
multi-branch CNN) that can be validated for shape compatibility before any
parameters are allocated. The final layer of every chain is the output
activation: softmax over C classes, or sigmoid on a single unit for binary
heads.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from ..errors import ConfigurationError, ShapeError

__all__ = [
    "LayerSpec",
    "ModelSpec",
    "iter_shapes",
    "validate_model_spec",
    "build_single_cnn",
    "build_parallel_cnn",
    "build_lstm",
    "build_bilstm",
]

RECURRENT_MODELS = ("lstm", "bilstm")


@dataclass(frozen=True)
class LayerSpec:
    """One layer in an architecture chain; unused fields stay None."""

    kind: str
    filters: int | None = None
    kernel: int | None = None
    units: int | None = None
    rate: float | None = None
    return_sequences: bool = True


@dataclass(frozen=True)
class ModelSpec:
    """Named architecture: a sequential chain, or three branches plus a head."""

    name: str
    input_shape: tuple[int, ...]
    layers: tuple[LayerSpec, ...]
    branches: tuple[tuple[LayerSpec, ...], ...] = ()
    output_classes: int = 3

    @property
    def is_parallel(self) -> bool:
        return bool(self.branches)

    @property
    def is_recurrent(self) -> bool:
        return self.name in RECURRENT_MODELS

    @property
    def head_width(self) -> int:
        return 1 if self.output_classes == 2 else self.output_classes


def _next_shape(shape: tuple[int, ...], ls: LayerSpec) -> tuple[int, ...]:
    kind = ls.kind
    if kind == "conv2d":
        if len(shape) != 3:
            raise ShapeError(f"conv2d needs (h, w, c) input, got {shape}")
        h, w, c = shape
        k = ls.kernel
        if k is None or ls.filters is None or k < 1 or ls.filters < 1:
            raise ConfigurationError("conv2d needs positive kernel and filter count")
        if k > h or k > w:
            raise ShapeError(f"kernel {k} exceeds input {h}x{w}")
        return (h - k + 1, w - k + 1, ls.filters)
    if kind == "maxpool2x2":
        if len(shape) != 3:
            raise ShapeError(f"maxpool2x2 needs (h, w, c) input, got {shape}")
        h, w, c = shape
        if h < 2 or w < 2:
            raise ShapeError(f"input {h}x{w} too small for 2x2 pooling")
        return (h // 2, w // 2, c)
    if kind == "dense":
        if len(shape) != 1:
            raise ShapeError(f"dense needs a flat input, got {shape}")
        if ls.units is None or ls.units < 1:
            raise ConfigurationError("dense needs a positive unit count")
        return (ls.units,)
    if kind == "time_dense":
        if len(shape) != 2:
            raise ShapeError(f"time_dense needs (time, features) input, got {shape}")
        if ls.units is None or ls.units < 1:
            raise ConfigurationError("time_dense needs a positive unit count")
        return (shape[0], ls.units)
    if kind == "lstm":
        if len(shape) != 2:
            raise ShapeError(f"lstm needs (time, features) input, got {shape}")
        if ls.units is None or ls.units < 1:
            raise ConfigurationError("lstm needs a positive unit count")
        return (shape[0], ls.units) if ls.return_sequences else (ls.units,)
    if kind == "bilstm":
        if len(shape) != 2:
            raise ShapeError(f"bilstm needs (time, features) input, got {shape}")
        if ls.units is None or ls.units < 2 or ls.units % 2 != 0:
            raise ConfigurationError("bilstm needs a positive even unit count")
        return (shape[0], ls.units)
    if kind == "dropout":
        if ls.rate is None or not 0.0 <= ls.rate < 1.0:
            raise ConfigurationError(f"dropout probability must lie in [0, 1), got {ls.rate}")
        return shape
    if kind == "flatten":
        return (prod(shape),)
    if kind in ("relu", "sigmoid", "softmax"):
        return shape
    raise ConfigurationError(f"unknown layer kind {ls.kind!r}")


def iter_shapes(input_shape, layers) -> list[tuple[int, ...]]:
    """Shapes threaded through a chain: input shape first, output shape last."""
    shapes = [tuple(input_shape)]
    for pos, ls in enumerate(layers):
        try:
            shapes.append(_next_shape(shapes[-1], ls))
        except (ShapeError, ConfigurationError) as exc:
            raise type(exc)(f"layer {pos} ({ls.kind}): {exc}") from None
    return shapes


def validate_model_spec(spec: ModelSpec) -> None:
    """Verify chain compatibility and the output head against output_classes."""
    if spec.output_classes < 2:
        raise ConfigurationError(f"need at least 2 output classes, got {spec.output_classes}")
    if spec.is_parallel:
        widths = []
        for branch in spec.branches:
            shape = iter_shapes(spec.input_shape, branch)[-1]
            if len(shape) != 1:
                raise ShapeError(f"branch must end in a flat feature vector, got {shape}")
            widths.append(shape[0])
        head_input = (sum(widths),)
        out = iter_shapes(head_input, spec.layers)[-1]
    else:
        out = iter_shapes(spec.input_shape, spec.layers)[-1]
    if not spec.layers or spec.layers[-1].kind not in ("softmax", "sigmoid"):
        raise ConfigurationError("the final layer must be a softmax or sigmoid head")
    expected_head = "sigmoid" if spec.output_classes == 2 else "softmax"
    if spec.layers[-1].kind != expected_head:
        raise ConfigurationError(
            f"{spec.output_classes}-class model needs a {expected_head} head, "
            f"got {spec.layers[-1].kind}"
        )
    if out != (spec.head_width,):
        raise ShapeError(f"output shape {out} != ({spec.head_width},)")


def _conv(filters: int) -> LayerSpec:
    return LayerSpec("conv2d", filters=filters, kernel=3)


def _dense(units: int) -> LayerSpec:
    return LayerSpec("dense", units=units)


_RELU = LayerSpec("relu")
_POOL = LayerSpec("maxpool2x2")
_FLAT = LayerSpec("flatten")
_DROP = LayerSpec("dropout", rate=0.5)


def _head(classes: int) -> list[LayerSpec]:
    if classes == 2:
        return [_dense(1), LayerSpec("sigmoid")]
    return [_dense(classes), LayerSpec("softmax")]


def build_single_cnn(m: int, classes: int = 3) -> ModelSpec:
    """Stacked CNN over one m-by-m field image.

    Two 3x3 convolutions (32 then 64 filters) with ReLU, a 2x2 max-pool,
    then dense layers of 576, 32, and 8 units before the C-way output head
    (sigmoid on one unit when C == 2).
    """
    layers = [
        _conv(32), _RELU,
        _conv(64), _RELU,
        _POOL, _FLAT,
        _dense(576), _RELU,
        _dense(32), _RELU,
        _dense(8), _RELU,
        *_head(classes),
    ]
    spec = ModelSpec("single-cnn", (m, m, 1), tuple(layers), output_classes=classes)
    validate_model_spec(spec)
    return spec


def build_parallel_cnn(m: int, classes: int = 3) -> ModelSpec:
    """Three-branch CNN over the (gasf, gadf, mtf) image triple.

    Each branch mirrors the single CNN's convolutional trunk and ends in a
    576-unit dense layer; the concatenated 1728-wide feature vector feeds
    dense layers of 128, 32, and 8 units before the output head.
    """
    branch = (
        _conv(32), _RELU,
        _conv(64), _RELU,
        _POOL, _FLAT,
        _dense(576), _RELU,
    )
    head = [
        _dense(128), _RELU,
        _dense(32), _RELU,
        _dense(8), _RELU,
        *_head(classes),
    ]
    spec = ModelSpec(
        "parallel-cnn", (m, m, 1), tuple(head),
        branches=(branch, branch, branch), output_classes=classes,
    )
    validate_model_spec(spec)
    return spec


def _recurrent_spec(name: str, m: int, classes: int, layer1: LayerSpec,
                    layer2: LayerSpec) -> ModelSpec:
    layers = [
        LayerSpec("time_dense", units=32), _RELU,
        layer1, _DROP,
        layer2, _DROP,
        _FLAT,
        _dense(64), _RELU,
        _dense(32), _RELU,
        *_head(classes),
    ]
    spec = ModelSpec(name, (m, 1), tuple(layers), output_classes=classes)
    validate_model_spec(spec)
    return spec


def build_lstm(m: int, classes: int = 3) -> ModelSpec:
    """Two-layer LSTM over the raw length-m series.

    A 32-unit dense map is applied per timestep, then LSTMs of 64 and 32
    units (both returning sequences, each followed by 0.5 dropout), then the
    flattened features pass dense layers of 64 and 32 units before the head.
    """
    return _recurrent_spec(
        "lstm", m, classes,
        LayerSpec("lstm", units=64), LayerSpec("lstm", units=32),
    )


def build_bilstm(m: int, classes: int = 3) -> ModelSpec:
    """Bidirectional variant of the two-layer LSTM.

    The recurrent layers have total widths 128 and 64 (half per direction);
    everything else matches the unidirectional network.
    """
    return _recurrent_spec(
        "bilstm", m, classes,
        LayerSpec("bilstm", units=128), LayerSpec("bilstm", units=64),
    )
