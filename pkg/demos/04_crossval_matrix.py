"""Small cross-validated experiment matrix, rendered as the report document.

Runs two model rows on two tasks with 3 folds and few epochs so it finishes
in well under a minute; the full 6-row x 4-task matrix is what
``fieldnet eval --matrix full`` produces with the same machinery.
"""

from fieldnet import TrainConfig, run_experiment
from fieldnet.data_io import SyntheticSpec, generate_synthetic, render_matrix_report

segments = generate_synthetic(SyntheticSpec(samples_per_class=30, seed=7))
cfg = TrainConfig(epochs=2, seed=7)

rows = [("lstm", "raw"), ("single-cnn", "gadf")]
tasks = ["coco-vs-sun", "3class"]
reports = [
    run_experiment(segments, task, model, features, cfg, m=13, q=8, k=3)
    for task in tasks
    for model, features in rows
]

print(render_matrix_report(reports, tasks=tasks, rows=rows))
