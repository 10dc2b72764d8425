"""Stratified k-fold cross-validation, metrics, and the experiment matrix runner.

An experiment pairs one classification task with one (model, feature set)
row. Tasks select which class labels participate; feature sets select how
segments are turned into model inputs:

* ``raw``      — preprocessed 1D series for the recurrent models
* ``mtf`` / ``gasf`` / ``gadf`` — one field image for the single CNN
* ``mtf+gaf``  — all three field images for the parallel CNN
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, StratificationError
from .fields import encode_sample
from .nn.model import build_model
from .nn.spec import (
    ModelSpec,
    build_bilstm,
    build_lstm,
    build_parallel_cnn,
    build_single_cnn,
)
from .nn.train import BINARY_CE, CATEGORICAL_CE, TrainConfig, train
from .series import Segment, preprocess, resample_to_length

__all__ = [
    "TASKS",
    "MATRIX_ROWS",
    "REFERENCE_MEAN_ACCURACY",
    "FoldPlan",
    "ExperimentReport",
    "stratified_kfold",
    "accuracy",
    "confusion",
    "prepare_inputs",
    "model_spec_for",
    "run_experiment",
]

TASKS: dict[str, tuple[str, ...]] = {
    "3class": ("coco", "imagenet", "sun"),
    "imagenet-vs-sun": ("imagenet", "sun"),
    "imagenet-vs-coco": ("imagenet", "coco"),
    "coco-vs-sun": ("coco", "sun"),
}

FEATURE_SETS = ("raw", "mtf", "gasf", "gadf", "mtf+gaf")

MODEL_FEATURES: dict[str, tuple[str, ...]] = {
    "lstm": ("raw",),
    "bilstm": ("raw",),
    "single-cnn": ("mtf", "gasf", "gadf"),
    "parallel-cnn": ("mtf+gaf",),
}

# The experiment matrix: every (model, feature) row crossed with every task.
MATRIX_ROWS: tuple[tuple[str, str], ...] = (
    ("lstm", "raw"),
    ("bilstm", "raw"),
    ("single-cnn", "mtf"),
    ("single-cnn", "gasf"),
    ("single-cnn", "gadf"),
    ("parallel-cnn", "mtf+gaf"),
)

# Benchmark mean accuracies reported for real BOLD-derived voxel series, kept
# for cell-by-cell comparison once such data is supplied. Synthetic runs are
# not expected to match these numbers.
REFERENCE_MEAN_ACCURACY: dict[tuple[str, str, str], float] = {
    ("lstm", "raw", "3class"): 0.75,
    ("lstm", "raw", "imagenet-vs-sun"): 0.98,
    ("lstm", "raw", "imagenet-vs-coco"): 0.63,
    ("lstm", "raw", "coco-vs-sun"): 0.98,
    ("bilstm", "raw", "3class"): 0.76,
    ("bilstm", "raw", "imagenet-vs-sun"): 0.99,
    ("bilstm", "raw", "imagenet-vs-coco"): 0.64,
    ("bilstm", "raw", "coco-vs-sun"): 0.99,
    ("single-cnn", "mtf", "3class"): 0.87,
    ("single-cnn", "mtf", "imagenet-vs-sun"): 0.99,
    ("single-cnn", "mtf", "imagenet-vs-coco"): 0.71,
    ("single-cnn", "mtf", "coco-vs-sun"): 0.99,
    ("single-cnn", "gasf", "3class"): 0.87,
    ("single-cnn", "gasf", "imagenet-vs-sun"): 0.99,
    ("single-cnn", "gasf", "imagenet-vs-coco"): 0.84,
    ("single-cnn", "gasf", "coco-vs-sun"): 0.98,
    ("single-cnn", "gadf", "3class"): 0.85,
    ("single-cnn", "gadf", "imagenet-vs-sun"): 0.99,
    ("single-cnn", "gadf", "imagenet-vs-coco"): 0.86,
    ("single-cnn", "gadf", "coco-vs-sun"): 0.99,
    ("parallel-cnn", "mtf+gaf", "3class"): 0.94,
    ("parallel-cnn", "mtf+gaf", "imagenet-vs-sun"): 0.99,
    ("parallel-cnn", "mtf+gaf", "imagenet-vs-coco"): 0.88,
    ("parallel-cnn", "mtf+gaf", "coco-vs-sun"): 0.98,
}


@dataclass(frozen=True)
class FoldPlan:
    """Per-sample fold assignment partitioning a dataset into k folds."""

    k: int
    assignments: np.ndarray

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def stratified_kfold(labels, k: int, seed) -> FoldPlan:
    """Assign samples to k folds, keeping per-class counts within 1 of equal.

    Samples of each class are shuffled with the seeded generator and dealt
    round-robin across folds; classes are visited in sorted label order so a
    fixed seed yields a fixed plan.
    """
    if k < 2:
        raise StratificationError(f"fold count must be >= 2, got {k}")
    labels = np.asarray(labels)
    if labels.size == 0:
        raise StratificationError("cannot stratify an empty label sequence")
    rng = np.random.default_rng(seed)
    assignments = np.empty(labels.size, dtype=int)
    for cls in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == cls)
        if idx.size < k:
            raise StratificationError(
                f"class {cls!r} has {idx.size} sample(s); stratified {k}-fold needs >= {k}"
            )
        shuffled = rng.permutation(idx)
        assignments[shuffled] = np.arange(idx.size) % k
    return FoldPlan(k, assignments)


def accuracy(predictions, truths) -> float:
    """Fraction of matching entries."""
    predictions = np.asarray(predictions)
    truths = np.asarray(truths)
    if predictions.shape != truths.shape:
        raise ValueError(f"length mismatch: {predictions.shape} vs {truths.shape}")
    return float(np.mean(predictions == truths))


def confusion(predictions, truths, classes: int) -> np.ndarray:
    """Counts matrix with true classes on rows and predicted classes on columns."""
    predictions = np.asarray(predictions, dtype=int)
    truths = np.asarray(truths, dtype=int)
    if predictions.shape != truths.shape:
        raise ValueError(f"length mismatch: {predictions.shape} vs {truths.shape}")
    matrix = np.zeros((classes, classes), dtype=int)
    np.add.at(matrix, (truths, predictions), 1)
    return matrix


@dataclass(frozen=True)
class ExperimentReport:
    """Cross-validated result for one (task, model, features) experiment."""

    task: str
    model: str
    features: str
    classes: tuple[str, ...]
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    confusion: np.ndarray
    config: dict


def model_spec_for(model_kind: str, m: int, classes: int) -> ModelSpec:
    builders = {
        "lstm": build_lstm,
        "bilstm": build_bilstm,
        "single-cnn": build_single_cnn,
        "parallel-cnn": build_parallel_cnn,
    }
    if model_kind not in builders:
        raise ConfigurationError(f"unknown model kind {model_kind!r}")
    return builders[model_kind](m, classes)


def prepare_inputs(segments, feature_set: str, m: int, q: int) -> list:
    """Turn segments into model inputs for one feature set.

    Every segment is detrended and z-scored first. Raw features are the
    preprocessed series resampled to length m (an (m, 1) column); field
    features are (m, m, 1) images; ``mtf+gaf`` yields the
    (gasf, gadf, mtf) triple for the parallel model.
    """
    if feature_set not in FEATURE_SETS:
        raise ConfigurationError(f"unknown feature set {feature_set!r}")
    inputs = []
    for seg in segments:
        pre = Segment(preprocess(seg.values).values, seg.class_label, seg.source_id)
        if feature_set == "raw":
            inputs.append(resample_to_length(pre, m).values[:, None])
            continue
        enc = encode_sample(pre, m, q)
        if feature_set == "mtf+gaf":
            inputs.append(tuple(c[:, :, None] for c in enc.channels()))
        else:
            matrix = getattr(enc, feature_set).values
            inputs.append(matrix[:, :, None])
    return inputs


def _fold_seed(seed: int, fold: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(fold,))
    return int(ss.generate_state(1, np.uint64)[0])


def _predicted_classes(model, inputs, parallel: bool) -> np.ndarray:
    if parallel:
        batch = tuple(np.stack([inp[i] for inp in inputs]) for i in range(3))
    else:
        batch = np.stack(inputs)
    probs = model.predict_proba(batch)
    if model.head == "sigmoid":
        return (probs[:, 0] >= 0.5).astype(int)
    return np.argmax(probs, axis=1)


def _run_fold(payload):
    """Train on one fold's training split and score its test split."""
    spec, inputs, labels, train_idx, test_idx, cfg, seed = payload
    model = build_model(spec, seed)
    fold_cfg = replace(cfg, seed=seed)
    train(model, [(inputs[i], labels[i]) for i in train_idx], fold_cfg)
    preds = _predicted_classes(model, [inputs[i] for i in test_idx], spec.is_parallel)
    truths = labels[test_idx]
    return accuracy(preds, truths), confusion(preds, truths, spec.output_classes)


def run_experiment(dataset, task: str, model_kind: str, feature_set: str,
                   cfg: TrainConfig, *, m: int = 16, q: int = 8, k: int = 10,
                   workers: int = 1) -> ExperimentReport:
    """Run one stratified k-fold experiment and aggregate its report.

    The dataset is filtered to the task's classes, encoded once per the
    feature set, and evaluated with one freshly seeded model per fold. The
    loss is chosen from the task (binary CE for two-class tasks), and fold
    results merge in fold order so reports are deterministic for a seed.
    """
    if task not in TASKS:
        raise ConfigurationError(f"unknown task {task!r}; expected one of {sorted(TASKS)}")
    if model_kind not in MODEL_FEATURES:
        raise ConfigurationError(f"unknown model kind {model_kind!r}")
    if feature_set not in MODEL_FEATURES[model_kind]:
        raise ConfigurationError(
            f"model {model_kind!r} does not accept feature set {feature_set!r}; "
            f"valid: {MODEL_FEATURES[model_kind]}"
        )
    classes = TASKS[task]
    selected = [seg for seg in dataset if seg.class_label in classes]
    present = {seg.class_label for seg in selected}
    missing = [c for c in classes if c not in present]
    if missing:
        raise ConfigurationError(f"dataset lacks classes {missing} required by task {task!r}")

    inputs = prepare_inputs(selected, feature_set, m, q)
    labels = np.array([classes.index(seg.class_label) for seg in selected])
    spec = model_spec_for(model_kind, m, len(classes))
    cfg = replace(cfg, loss=BINARY_CE if len(classes) == 2 else CATEGORICAL_CE)
    plan = stratified_kfold([seg.class_label for seg in selected], k, cfg.seed)

    payloads = [
        (spec, inputs, labels, plan.train_indices(fold), plan.test_indices(fold),
         cfg, _fold_seed(cfg.seed, fold))
        for fold in range(k)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_fold, payloads))
    else:
        results = [_run_fold(p) for p in payloads]

    fold_accs = tuple(acc for acc, _ in results)
    total_confusion = np.zeros((len(classes), len(classes)), dtype=int)
    for _, c in results:
        total_confusion += c
    return ExperimentReport(
        task=task,
        model=model_kind,
        features=feature_set,
        classes=classes,
        fold_accuracies=fold_accs,
        mean_accuracy=float(np.mean(fold_accs)),
        confusion=total_confusion,
        config={"seed": cfg.seed, "m": m, "q": q, "epochs": cfg.epochs, "k": k},
    )
