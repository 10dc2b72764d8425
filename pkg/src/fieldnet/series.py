"""Time-series containers and preprocessing.

Provides the 1D building blocks that feed the spatial encoders: linear
detrending, z-score normalization, min-max rescaling onto [-1, 1],
label-driven segmentation, and length normalization by linear resampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError

__all__ = [
    "TimeSeries",
    "Segment",
    "detrend_linear",
    "zscore",
    "rescale_minmax",
    "segment_by_label",
    "resample_to_length",
    "preprocess",
]


def _as_float_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1D sequence of samples, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite reals")
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Ordered sequence of real samples with optional per-sample class labels."""

    values: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_array(self.values))
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != len(self.values):
                raise ValueError(
                    f"labels length {len(labels)} != values length {len(self.values)}"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Segment:
    """Contiguous-in-label samples sharing one class label, with provenance."""

    values: np.ndarray
    class_label: str
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_array(self.values))
        if len(self.values) < 2:
            raise DegenerateInputError(
                f"segment {self.source_id!r} (label {self.class_label!r}) has "
                f"{len(self.values)} sample(s); at least 2 required"
            )

    def __len__(self) -> int:
        return len(self.values)


def _coerce(series) -> tuple[np.ndarray, tuple[str, ...] | None]:
    """Accept a TimeSeries, Segment, or plain 1D sequence."""
    if isinstance(series, TimeSeries):
        return series.values, series.labels
    if isinstance(series, Segment):
        return series.values, None
    return _as_float_array(series), None


def _require_length(values: np.ndarray, op: str) -> None:
    if len(values) < 2:
        raise DegenerateInputError(f"{op} requires at least 2 samples, got {len(values)}")


def detrend_linear(series) -> TimeSeries:
    """Remove the least-squares straight-line trend over sample index.

    The fit minimizes sum((values - (a + b*i))**2) over intercept a and
    slope b; the returned residuals sum to zero up to rounding.
    """
    values, labels = _coerce(series)
    _require_length(values, "detrend_linear")
    idx = np.arange(len(values), dtype=float)
    idx_centered = idx - idx.mean()
    mean = values.mean()
    slope = np.dot(idx_centered, values - mean) / np.dot(idx_centered, idx_centered)
    residuals = values - mean - slope * idx_centered
    return TimeSeries(residuals, labels)


def zscore(series) -> TimeSeries:
    """Center to mean 0 and scale to unit population standard deviation.

    A constant series has no scale and maps to all zeros.
    """
    values, labels = _coerce(series)
    _require_length(values, "zscore")
    centered = values - values.mean()
    scale = np.max(np.abs(centered))
    if scale == 0.0:
        return TimeSeries(np.zeros_like(values), labels)
    unit = centered / scale  # pre-scale so squaring cannot under/overflow
    std = scale * np.sqrt(np.mean(unit * unit))  # population convention (divide by N)
    out = centered / std
    out -= out.mean()  # absorb rounding so the zero-mean contract holds when values >> spread
    return TimeSeries(out, labels)


def rescale_minmax(series) -> TimeSeries:
    """Affinely map values onto [-1, 1]; the minimum maps to -1, the maximum to +1.

    A constant series maps to all zeros so that downstream arccos stays
    well-defined.
    """
    values, labels = _coerce(series)
    _require_length(values, "rescale_minmax")
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return TimeSeries(np.zeros_like(values), labels)
    return TimeSeries(2.0 * (values - lo) / (hi - lo) - 1.0, labels)


def preprocess(series) -> TimeSeries:
    """Standard pipeline applied before any encoding: detrend, then z-score."""
    return zscore(detrend_linear(series))


def segment_by_label(series: TimeSeries, source_id: str = "") -> list[Segment]:
    """Split a labeled series into one segment per distinct label.

    Samples keep their original temporal order within each segment; the
    segments appear in order of first label appearance. Any label carried
    by fewer than 2 samples is rejected.
    """
    if not isinstance(series, TimeSeries) or series.labels is None:
        raise ValueError("segment_by_label requires a TimeSeries with per-sample labels")
    grouped: dict[str, list[float]] = {}
    for value, label in zip(series.values, series.labels):
        grouped.setdefault(label, []).append(value)
    segments = []
    for label, vals in grouped.items():
        if len(vals) < 2:
            raise DegenerateInputError(
                f"label {label!r} has only {len(vals)} sample(s); segments need >= 2"
            )
        segments.append(Segment(np.array(vals), label, source_id))
    return segments


def _resample_values(values: np.ndarray, m: int) -> np.ndarray:
    if m == len(values):
        return values.copy()
    positions = np.linspace(0.0, len(values) - 1.0, m)
    return np.interp(positions, np.arange(len(values), dtype=float), values)


def resample_to_length(segment: Segment, m: int) -> Segment:
    """Linearly interpolate a segment onto m equally spaced points.

    The interpolation grid spans the original index range, so the first and
    last samples are preserved exactly and m == len(segment) is the identity.
    """
    if m < 2:
        raise DegenerateInputError(f"target length must be >= 2, got {m}")
    _require_length(segment.values, "resample_to_length")
    return Segment(_resample_values(segment.values, m), segment.class_label, segment.source_id)
