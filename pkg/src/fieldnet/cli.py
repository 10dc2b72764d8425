"""Command-line front end: synth | encode | train | eval.

Every subcommand is deterministic for fixed flags and inputs, exits 0 on
success, and reports any failure as a single ``error: ...`` line on stderr
with a nonzero exit status.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .data_io import (
    DEFAULT_CLASS_PARAMS,
    ClassParams,
    SyntheticSpec,
    export_png,
    generate_synthetic,
    load_dataset,
    render_matrix_report,
    save_checkpoint,
    save_dataset,
    save_field,
)
from .errors import ConfigurationError, FieldnetError
from .evaluation import (
    MATRIX_ROWS,
    MODEL_FEATURES,
    TASKS,
    model_spec_for,
    prepare_inputs,
    run_experiment,
)
from .fields import encode_sample
from .nn.model import build_model
from .nn.train import BINARY_CE, CATEGORICAL_CE, TrainConfig, train
from .series import preprocess

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """Argparse variant whose usage errors are single-line diagnostics."""

    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _add_common_train_flags(p):
    p.add_argument("--m", type=int, default=16, help="image side / resampled length (default 16)")
    p.add_argument("--q", type=int, default=8, help="quantile bin count (default 8)")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch", type=int, default=None,
                   help="batch size (default 8 for CNNs, 20 for recurrent models)")
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fieldnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate a synthetic dataset file")
    p.add_argument("--classes", type=int, default=3, choices=(2, 3))
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--len", dest="length", type=int, default=13)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("encode", help="encode every dataset row into field files")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--png", action="store_true", help="also export grayscale PNGs")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("train", help="train one model on one task")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--model", required=True, choices=sorted(MODEL_FEATURES))
    p.add_argument("--task", required=True, choices=sorted(TASKS))
    p.add_argument("--features", default=None,
                   help="raw | mtf | gasf | gadf | mtf+gaf (default per model)")
    _add_common_train_flags(p)
    p.add_argument("--out", default=None, help="checkpoint path (default <model>.ckpt)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="run the cross-validated experiment matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--matrix", default="full", choices=("full",))
    p.add_argument("--rows", default=None,
                   help="comma list like 'lstm,single-cnn:gasf,parallel-cnn' (default all)")
    p.add_argument("--tasks", default=None, help="comma list of tasks (default all)")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--workers", type=int, default=1,
                   help="fold-level worker processes (default 1)")
    _add_common_train_flags(p)
    p.add_argument("--out", default=None, help="report path (default stdout)")
    p.set_defaults(func=_cmd_eval)
    return parser


def _cmd_synth(args) -> int:
    if args.per_class < 1:
        raise ConfigurationError(f"--per-class must be >= 1, got {args.per_class}")
    classes = tuple(
        ClassParams(p.label, p.ar_coeff, p.frequency, args.noise)
        for p in DEFAULT_CLASS_PARAMS[: args.classes]
    )
    spec = SyntheticSpec(classes=classes, samples_per_class=args.per_class,
                         segment_length=args.length, seed=args.seed)
    segments = generate_synthetic(spec)
    save_dataset(segments, args.out)
    print(f"wrote {len(segments)} segments to {args.out}")
    return 0


def _sanitize(token: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", token) or "row"


def _cmd_encode(args) -> int:
    segments = load_dataset(args.infile)
    if not 2 <= args.q <= args.m:
        raise ConfigurationError(f"need 2 <= q <= m, got q={args.q} m={args.m}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for i, seg in enumerate(segments):
        pre = preprocess(seg.values)
        enc = encode_sample(
            type(seg)(pre.values, seg.class_label, seg.source_id), args.m, args.q
        )
        stem = f"{i:05d}_{_sanitize(seg.source_id)}"
        for field in (enc.gasf, enc.gadf, enc.mtf):
            save_field(field, out_dir / f"{stem}_{field.kind}.fld")
            if args.png:
                export_png(field, out_dir / f"{stem}_{field.kind}.png")
            written += 1
    print(f"wrote {written} field files to {out_dir}")
    return 0


def _resolve_features(model: str, features: str | None) -> str:
    if features is None:
        return MODEL_FEATURES[model][0]
    if features not in MODEL_FEATURES[model]:
        raise ConfigurationError(
            f"model {model!r} does not accept feature set {features!r}; "
            f"valid: {MODEL_FEATURES[model]}"
        )
    return features


def _cmd_train(args) -> int:
    segments = load_dataset(args.infile)
    features = _resolve_features(args.model, args.features)
    classes = TASKS[args.task]
    selected = [seg for seg in segments if seg.class_label in classes]
    missing = [c for c in classes if c not in {s.class_label for s in selected}]
    if missing:
        raise ConfigurationError(f"dataset lacks classes {missing} for task {args.task!r}")
    inputs = prepare_inputs(selected, features, args.m, args.q)
    labels = [classes.index(seg.class_label) for seg in selected]
    spec = model_spec_for(args.model, args.m, len(classes))
    cfg = TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch,
        epochs=args.epochs,
        loss=BINARY_CE if len(classes) == 2 else CATEGORICAL_CE,
        seed=args.seed,
    )
    model = build_model(spec, args.seed)
    history = train(model, list(zip(inputs, labels)), cfg)
    for epoch, (loss, acc) in enumerate(zip(history.loss, history.accuracy), start=1):
        print(f"epoch {epoch}/{cfg.epochs} loss={loss:.6f} accuracy={acc:.4f}")
    out = args.out or f"{args.model}.ckpt"
    save_checkpoint(model, out)
    print(f"wrote checkpoint to {out}")
    return 0


def _parse_rows(tokens: str | None):
    if tokens is None:
        return list(MATRIX_ROWS)
    rows = []
    for token in tokens.split(","):
        token = token.strip()
        if not token:
            continue
        model, _, features = token.partition(":")
        if model not in MODEL_FEATURES:
            raise ConfigurationError(f"unknown model {model!r} in --rows")
        if features:
            _resolve_features(model, features)
            rows.append((model, features))
        else:
            rows.extend((model, f) for f in MODEL_FEATURES[model])
    if not rows:
        raise ConfigurationError("--rows selected no experiments")
    return rows


def _cmd_eval(args) -> int:
    if args.k < 2:
        raise ConfigurationError(f"fold count must be >= 2, got {args.k}")
    if not 2 <= args.q <= args.m:
        raise ConfigurationError(f"need 2 <= q <= m, got q={args.q} m={args.m}")
    segments = load_dataset(args.infile)
    rows = _parse_rows(args.rows)
    if args.tasks is None:
        tasks = list(TASKS)
    else:
        tasks = [t.strip() for t in args.tasks.split(",") if t.strip()]
        unknown = [t for t in tasks if t not in TASKS]
        if unknown:
            raise ConfigurationError(f"unknown tasks {unknown}")
        if not tasks:
            raise ConfigurationError("--tasks selected no tasks")
    cfg = TrainConfig(learning_rate=args.lr, batch_size=args.batch,
                      epochs=args.epochs, seed=args.seed)
    reports = []
    for task in tasks:
        for model, features in rows:
            reports.append(
                run_experiment(segments, task, model, features, cfg,
                               m=args.m, q=args.q, k=args.k, workers=args.workers)
            )
    document = render_matrix_report(reports, tasks=tasks, rows=rows)
    if args.out:
        Path(args.out).write_text(document)
        print(f"wrote report to {args.out}")
    else:
        print(document, end="")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FieldnetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
