"""Dataset ingestion, binary field/checkpoint formats, PNG export, the
synthetic segment generator, and report rendering.

File formats (all multi-byte integers and reals little-endian):

* dataset  — text, one segment per row: ``source_id,label,v1,v2,...`` with a
  literal ``source_id,label,v1,v2,...`` header line
* field    — magic ``FLD1``, kind byte (0=gasf, 1=gadf, 2=mtf), side n as
  uint32, then n*n float64 values in row-major order
* checkpoint — magic ``CKP1``, length-prefixed model name, tensor count,
  then per tensor: rank uint32, dims uint32 each, float64 values
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import FormatError, ShapeError
from .fields import FIELD_KINDS, FieldMatrix
from .series import Segment

__all__ = [
    "FIELD_MAGIC",
    "CHECKPOINT_MAGIC",
    "load_dataset",
    "save_dataset",
    "save_field",
    "load_field",
    "export_png",
    "ClassParams",
    "SyntheticSpec",
    "DEFAULT_CLASS_PARAMS",
    "generate_synthetic",
    "save_checkpoint",
    "load_checkpoint",
    "load_checkpoint_into",
    "render_matrix_report",
]

FIELD_MAGIC = b"FLD1"
CHECKPOINT_MAGIC = b"CKP1"
DATASET_HEADER = "source_id,label,v1,v2,..."

_KIND_CODES = {kind: code for code, kind in enumerate(FIELD_KINDS)}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}


# ---------------------------------------------------------------------------
# dataset text format


def save_dataset(segments, path) -> None:
    """Write segments as one text row each, values in full repr precision."""
    lines = [DATASET_HEADER]
    for seg in segments:
        values = ",".join(repr(float(v)) for v in seg.values)
        lines.append(f"{seg.source_id},{seg.class_label},{values}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_dataset(path) -> list[Segment]:
    """Parse a dataset file into segments, reporting errors by row and column."""
    text = Path(path).read_text()
    lines = [line for line in text.splitlines()]
    if not lines:
        raise FormatError(f"{path}: empty dataset file")
    if not lines[0].startswith("source_id,label"):
        raise FormatError(f"{path}: row 1: expected header starting 'source_id,label'")
    segments = []
    for row, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) < 4:
            raise FormatError(
                f"{path}: row {row}: needs source_id, label, and at least 2 values"
            )
        source_id, label = cells[0], cells[1]
        values = []
        for col, token in enumerate(cells[2:], start=3):
            try:
                value = float(token)
            except ValueError:
                raise FormatError(
                    f"{path}: row {row}, column {col}: {token!r} is not a number"
                ) from None
            if not np.isfinite(value):
                raise FormatError(f"{path}: row {row}, column {col}: value must be finite")
            values.append(value)
        segments.append(Segment(np.array(values), label, source_id))
    if not segments:
        raise FormatError(f"{path}: empty dataset file")
    return segments


# ---------------------------------------------------------------------------
# binary field format


def save_field(field: FieldMatrix, path) -> None:
    payload = field.values.astype("<f8").tobytes()
    header = FIELD_MAGIC + bytes([_KIND_CODES[field.kind]]) + struct.pack("<I", field.n)
    Path(path).write_bytes(header + payload)


def load_field(path) -> FieldMatrix:
    blob = Path(path).read_bytes()
    if len(blob) < 9 or blob[:4] != FIELD_MAGIC:
        raise FormatError(f"{path}: not a field file (bad magic)")
    code = blob[4]
    if code not in _CODE_KINDS:
        raise FormatError(f"{path}: unknown field kind byte {code}")
    (n,) = struct.unpack("<I", blob[5:9])
    expected = 9 + 8 * n * n
    if len(blob) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for side {n}, got {len(blob)}")
    values = np.frombuffer(blob[9:], dtype="<f8").reshape(n, n)
    return FieldMatrix(_CODE_KINDS[code], values.copy())


def export_png(field: FieldMatrix, path) -> None:
    """8-bit grayscale render: gasf/gadf map [-1, 1] to [0, 255], mtf maps [0, 1]."""
    lo = 0.0 if field.kind == "mtf" else -1.0
    scaled = (field.values - lo) / (1.0 - lo) * 255.0
    pixels = np.rint(np.clip(scaled, 0.0, 255.0)).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path)


# ---------------------------------------------------------------------------
# synthetic segments


@dataclass(frozen=True)
class ClassParams:
    """Generator parameters for one class of synthetic segments."""

    label: str
    ar_coeff: float
    frequency: float  # cycles per step
    noise_scale: float


DEFAULT_CLASS_PARAMS = (
    ClassParams("coco", 0.2, 0.1, 0.3),
    ClassParams("imagenet", 0.5, 0.2, 0.3),
    ClassParams("sun", 0.8, 0.3, 0.3),
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Desk-scale stand-in for extracted voxel series.

    Each class produces sinusoids of a class-specific frequency (random
    phase per segment) riding on AR(1) noise with a class-specific
    autocorrelation, so spectral content and transition dynamics both carry
    class signal. samples_per_class may be one int or a per-class sequence.
    """

    classes: tuple[ClassParams, ...] = DEFAULT_CLASS_PARAMS
    samples_per_class: int | tuple[int, ...] = 100
    segment_length: int = 13
    seed: int = 7

    def counts(self) -> tuple[int, ...]:
        if isinstance(self.samples_per_class, int):
            return (self.samples_per_class,) * len(self.classes)
        counts = tuple(int(c) for c in self.samples_per_class)
        if len(counts) != len(self.classes):
            raise ValueError(
                f"{len(counts)} per-class counts for {len(self.classes)} classes"
            )
        return counts


def generate_synthetic(spec: SyntheticSpec) -> list[Segment]:
    """Generate seeded class-labeled segments; a pure function of the spec."""
    for params in spec.classes:
        if not abs(params.ar_coeff) < 1.0:
            raise ValueError(f"AR coefficient must satisfy |a| < 1, got {params.ar_coeff}")
        if params.noise_scale < 0.0:
            raise ValueError(f"noise scale must be >= 0, got {params.noise_scale}")
    if spec.segment_length < 2:
        raise ValueError(f"segment length must be >= 2, got {spec.segment_length}")
    counts = spec.counts()
    if min(counts) < 1:
        raise ValueError("samples per class must be >= 1")
    rng = np.random.default_rng(spec.seed)
    steps = np.arange(spec.segment_length)
    segments = []
    for params, count in zip(spec.classes, counts):
        for i in range(count):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            shocks = rng.normal(0.0, 1.0, spec.segment_length) * params.noise_scale
            ar = np.empty(spec.segment_length)
            level = 0.0
            for t in range(spec.segment_length):
                level = params.ar_coeff * level + shocks[t]
                ar[t] = level
            values = np.sin(2.0 * np.pi * params.frequency * steps + phase) + ar
            segments.append(Segment(values, params.label, f"synth/{params.label}/{i:04d}"))
    return segments


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(model, path) -> None:
    """Serialize a model's parameter arrays (float64, shape-tagged)."""
    name = model.spec.name.encode("utf-8")
    parts = [CHECKPOINT_MAGIC, struct.pack("<I", len(name)), name]
    params = model.parameters()
    parts.append(struct.pack("<I", len(params)))
    for p in params:
        parts.append(struct.pack("<I", p.ndim))
        parts.append(struct.pack(f"<{p.ndim}I", *p.shape))
        parts.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path) -> tuple[str, list[np.ndarray]]:
    """Read back (model name, parameter arrays); raises FormatError on damage."""
    blob = Path(path).read_bytes()
    if len(blob) < 8 or blob[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"{path}: not a checkpoint file (bad magic)")
    offset = 4

    def take(count: int) -> bytes:
        nonlocal offset
        if offset + count > len(blob):
            raise FormatError(f"{path}: truncated checkpoint")
        chunk = blob[offset:offset + count]
        offset += count
        return chunk

    (name_len,) = struct.unpack("<I", take(4))
    name = take(name_len).decode("utf-8")
    (tensor_count,) = struct.unpack("<I", take(4))
    arrays = []
    for _ in range(tensor_count):
        (rank,) = struct.unpack("<I", take(4))
        shape = struct.unpack(f"<{rank}I", take(4 * rank))
        size = int(np.prod(shape, dtype=np.int64)) if rank else 1
        data = np.frombuffer(take(8 * size), dtype="<f8")
        arrays.append(data.reshape(shape).copy())
    if offset != len(blob):
        raise FormatError(f"{path}: {len(blob) - offset} trailing bytes")
    return name, arrays


def load_checkpoint_into(model, path) -> None:
    """Load a checkpoint into a model, validating shapes and the model name."""
    name, arrays = load_checkpoint(path)
    params = model.parameters()
    if len(arrays) != len(params):
        raise ShapeError(
            f"{path}: checkpoint has {len(arrays)} tensors, model needs {len(params)}"
        )
    for p, a in zip(params, arrays):
        if a.shape != p.shape:
            raise ShapeError(f"{path}: tensor shape {a.shape} != expected {p.shape}")
    if name != model.spec.name:
        raise FormatError(f"{path}: checkpoint is for model {name!r}, not {model.spec.name!r}")
    model.set_parameters(arrays)


# ---------------------------------------------------------------------------
# report document


def _matrix_table(reports, tasks, rows) -> list[str]:
    by_key = {(r.model, r.features, r.task): r for r in reports}
    label_width = max(len(f"{model}[{feats}]") for model, feats in rows)
    header = "model".ljust(label_width) + "".join(f"  {task:>16}" for task in tasks)
    lines = [header]
    for model, feats in rows:
        cells = []
        for task in tasks:
            report = by_key.get((model, feats, task))
            cells.append(f"{report.mean_accuracy:.4f}" if report else "-")
        label = f"{model}[{feats}]".ljust(label_width)
        lines.append(label + "".join(f"  {cell:>16}" for cell in cells))
    return lines


def render_matrix_report(reports, *, tasks=None, rows=None) -> str:
    """Render experiment reports as one deterministic text document.

    Leads with the mean-accuracy matrix (model/feature rows crossed with
    task columns, '-' for cells not run), followed by one detail block per
    experiment in input order.
    """
    from .evaluation import MATRIX_ROWS, TASKS  # local import to avoid a cycle

    reports = list(reports)
    tasks = list(tasks) if tasks is not None else list(TASKS)
    rows = list(rows) if rows is not None else list(MATRIX_ROWS)
    lines = ["fieldnet experiment report", "=" * 26, ""]
    if reports:
        cfg = reports[0].config
        lines.append(
            "config: seed={seed} m={m} q={q} epochs={epochs} k={k}".format(**cfg)
        )
        lines.append("")
    lines.append("mean accuracy by model row and task column")
    lines.append("")
    lines.extend(_matrix_table(reports, tasks, rows))
    for report in reports:
        lines.append("")
        lines.append(f"task={report.task} model={report.model} features={report.features}")
        lines.append(f"  classes: {','.join(report.classes)}")
        folds = " ".join(f"{acc:.4f}" for acc in report.fold_accuracies)
        lines.append(f"  fold accuracy: {folds}")
        lines.append(f"  mean accuracy: {report.mean_accuracy:.4f}")
        lines.append("  confusion (rows true, columns predicted):")
        for cls, row in zip(report.classes, report.confusion):
            counts = " ".join(str(int(c)) for c in row)
            lines.append(f"    {cls}: {counts}")
    return "\n".join(lines) + "\n"
