"""Walk one segment per class from raw samples to its three field images.

Generates a short synthetic segment for each class, preprocesses it
(detrend + z-score), encodes it as GASF / GADF / MTF matrices, prints the
headline properties of each matrix, and writes grayscale PNGs plus binary
field files under demo_out/.
"""

from pathlib import Path

import numpy as np

from fieldnet import encode_sample, preprocess
from fieldnet.data_io import SyntheticSpec, export_png, generate_synthetic, save_field
from fieldnet.series import Segment

OUT = Path(__file__).parent / "demo_out"
OUT.mkdir(exist_ok=True)

spec = SyntheticSpec(samples_per_class=1, segment_length=13, seed=7)
for segment in generate_synthetic(spec):
    pre = preprocess(segment.values)
    encoded = encode_sample(Segment(pre.values, segment.class_label), m=16, q=8)
    print(f"\nclass {segment.class_label!r}  (13 raw samples -> three 16x16 matrices)")
    g = encoded.gasf.values
    print(f"  gasf: symmetric={np.array_equal(g, g.T)}  "
          f"range=[{g.min():+.3f}, {g.max():+.3f}]")
    d = encoded.gadf.values
    print(f"  gadf: antisymmetric={np.allclose(d, -d.T)}  zero diagonal="
          f"{not np.any(np.diag(d))}")
    m = encoded.mtf.values
    print(f"  mtf : entries in [0, 1]={bool((m >= 0).all() and (m <= 1).all())}  "
          f"distinct values={len(np.unique(m))}")
    for field in (encoded.gasf, encoded.gadf, encoded.mtf):
        save_field(field, OUT / f"{segment.class_label}_{field.kind}.fld")
        export_png(field, OUT / f"{segment.class_label}_{field.kind}.png")

print(f"\nwrote field files and PNGs to {OUT}")
