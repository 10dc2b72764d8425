"""Spatial encodings of 1D segments into square field matrices.

Three encodings are produced per segment:

* GASF — pairwise cosine of summed polar angles, ``cos(psi_i + psi_j)``
* GADF — pairwise sine of differenced polar angles, ``sin(psi_i - psi_j)``
* MTF  — pairwise quantile-bin transition probability, looked up from a
  row-stochastic first-order transition matrix

where ``psi_i = arccos(z_i)`` for a series rescaled onto [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BinningError, DegenerateInputError, DomainError
from .series import Segment, TimeSeries, rescale_minmax, resample_to_length

__all__ = [
    "GASF",
    "GADF",
    "MTF",
    "FIELD_KINDS",
    "PolarSeries",
    "FieldMatrix",
    "TransitionMatrix",
    "EncodedSample",
    "to_polar",
    "gasf",
    "gadf",
    "quantile_bins",
    "transition_matrix",
    "mtf",
    "encode_sample",
]

GASF = "gasf"
GADF = "gadf"
MTF = "mtf"
FIELD_KINDS = (GASF, GADF, MTF)

# absorbs floating-point drift from rescaling; larger violations are caller bugs
_CLAMP_TOL = 1e-9


def _values_of(series) -> np.ndarray:
    if isinstance(series, (TimeSeries, Segment)):
        return series.values
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1D sequence, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PolarSeries:
    """Angular encoding of a rescaled series: psi_i = arccos(z_i), r_i = i/n.

    The radii are kept for completeness but do not enter the GASF/GADF
    arithmetic, which uses only the angles.
    """

    psi: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class FieldMatrix:
    """Square encoding matrix tagged with its kind (gasf | gadf | mtf)."""

    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"field matrix must be square, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix of first-order quantile-bin transitions.

    Row a, column b holds the probability that a sample in bin a+1 is
    immediately followed by a sample in bin b+1.
    """

    q: int
    probs: np.ndarray


@dataclass(frozen=True)
class EncodedSample:
    """The three aligned field matrices for one segment plus its label."""

    gasf: FieldMatrix
    gadf: FieldMatrix
    mtf: FieldMatrix
    class_label: str
    source_id: str = ""

    def __post_init__(self):
        sides = {self.gasf.n, self.gadf.n, self.mtf.n}
        if len(sides) != 1:
            raise ValueError(f"field matrices disagree on side length: {sorted(sides)}")

    @property
    def n(self) -> int:
        return self.gasf.n

    def channels(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Matrices in canonical channel order (gasf, gadf, mtf)."""
        return self.gasf.values, self.gadf.values, self.mtf.values


def to_polar(series) -> PolarSeries:
    """Encode a [-1, 1]-rescaled series into polar angles and radii.

    psi_i = arccos(z_i) lies in [0, pi]; r_i = i/n for i = 1..n. Values that
    exceed the domain by no more than 1e-9 are clamped; anything further out
    means the caller forgot to rescale and raises DomainError.
    """
    values = _values_of(series)
    if values.size == 0:
        raise DegenerateInputError("cannot encode an empty series")
    if values.min() < -1.0 - _CLAMP_TOL or values.max() > 1.0 + _CLAMP_TOL:
        raise DomainError(
            f"values in [{values.min()}, {values.max()}] lie outside [-1, 1]; "
            "rescale before polar encoding"
        )
    clamped = np.clip(values, -1.0, 1.0)
    n = values.size
    return PolarSeries(psi=np.arccos(clamped), r=np.arange(1, n + 1) / n)


def gasf(polar: PolarSeries) -> FieldMatrix:
    """Gramian angular summation field: values[i][j] = cos(psi_i + psi_j)."""
    psi = polar.psi
    if psi.size == 0:
        raise DegenerateInputError("polar series is empty")
    return FieldMatrix(GASF, np.cos(psi[:, None] + psi[None, :]))


def gadf(polar: PolarSeries) -> FieldMatrix:
    """Gramian angular difference field: values[i][j] = sin(psi_i - psi_j)."""
    psi = polar.psi
    if psi.size == 0:
        raise DegenerateInputError("polar series is empty")
    return FieldMatrix(GADF, np.sin(psi[:, None] - psi[None, :]))


def quantile_bins(segment, q: int) -> np.ndarray:
    """Assign each sample a rank-based bin index in [1, q].

    Samples sorted by (value, original index) are split into q contiguous
    groups whose sizes differ by at most one, so bin assignment is monotone
    in value and ties break by position. With length >= q every bin is
    non-empty.
    """
    values = _values_of(segment)
    if len(values) < 2:
        raise DegenerateInputError(f"binning requires at least 2 samples, got {len(values)}")
    if q < 2:
        raise BinningError(f"bin count must be >= 2, got {q}")
    if q > len(values):
        raise BinningError(f"cannot split {len(values)} samples into {q} bins")
    order = np.argsort(values, kind="stable")
    bins = np.empty(len(values), dtype=int)
    bins[order] = np.arange(len(values)) * q // len(values) + 1
    return bins


def transition_matrix(bins, q: int) -> TransitionMatrix:
    """Count adjacent bin transitions and normalize each source-bin row to 1.

    Entry (a, b) is the probability that bin a+1 is followed by bin b+1 in
    the next time step. A bin with no outgoing transitions gets the uniform
    row 1/q so the matrix is row-stochastic for every input.
    """
    bins = np.asarray(bins, dtype=int)
    if bins.ndim != 1 or bins.size < 2:
        raise DegenerateInputError("need at least 2 bin indices to count transitions")
    if bins.min() < 1 or bins.max() > q:
        raise BinningError(f"bin indices must lie in [1, {q}], got [{bins.min()}, {bins.max()}]")
    counts = np.zeros((q, q))
    np.add.at(counts, (bins[:-1] - 1, bins[1:] - 1), 1.0)
    totals = counts.sum(axis=1, keepdims=True)
    probs = np.where(totals > 0.0, counts / np.maximum(totals, 1.0), 1.0 / q)
    return TransitionMatrix(q, probs)


def mtf(segment, q: int) -> FieldMatrix:
    """Markov transition field: values[i][j] = W[bin(x_i)][bin(x_j)].

    W is the row-stochastic transition matrix of the segment's quantile
    bins, so every pair of positions with equal bins shares one entry.
    """
    values = _values_of(segment)
    bins = quantile_bins(values, q)
    w = transition_matrix(bins, q)
    idx = bins - 1
    return FieldMatrix(MTF, w.probs[np.ix_(idx, idx)])


def encode_sample(segment: Segment, m: int = 16, q: int = 8) -> EncodedSample:
    """Encode one segment into aligned m-by-m GASF, GADF, and MTF matrices.

    The segment is resampled to length m; the GAF pair is computed on the
    min-max rescaled samples, while the MTF bins the resampled samples
    directly (quantile bins are invariant to the affine rescale).
    """
    if m < 2:
        raise DegenerateInputError(f"image side must be >= 2, got {m}")
    if not 2 <= q <= m:
        raise BinningError(f"bin count must satisfy 2 <= q <= m, got q={q} m={m}")
    resampled = resample_to_length(segment, m)
    polar = to_polar(rescale_minmax(resampled.values))
    return EncodedSample(
        gasf=gasf(polar),
        gadf=gadf(polar),
        mtf=mtf(resampled.values, q),
        class_label=segment.class_label,
        source_id=segment.source_id,
    )
