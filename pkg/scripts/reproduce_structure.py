"""Run the full analysis on a synthetic 12-line, 7-ink document with all
three clustering algorithms and compare each against the ground truth.

    python scripts/reproduce_structure.py --out runs/structure
    python scripts/reproduce_structure.py --rows 240 --cols 200 --bands 40   # quick
"""
import argparse
import json
import time
from pathlib import Path

import numpy as np

from inkcount import synth
from inkcount.clustering import label_agreement
from inkcount.pipeline import PipelineConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/structure")
    ap.add_argument("--rows", type=int, default=synth.REFERENCE_ROWS)
    ap.add_argument("--cols", type=int, default=synth.REFERENCE_COLS)
    ap.add_argument("--bands", type=int, default=synth.REFERENCE_BANDS)
    ap.add_argument("--inks", type=int, default=7)
    ap.add_argument("--lines", type=int, default=12)
    ap.add_argument("--noise", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    doc = synth.generate(synth.SynthConfig(
        n_inks=args.inks, n_lines=args.lines, rows=args.rows, cols=args.cols,
        bands=args.bands, noise=args.noise, seed=args.seed,
    ))
    out = Path(args.out)
    synth.save(doc, out / "document")
    print(f"cube {doc.cube.shape}, noise sigma {doc.noise_sigma:.4f}, line inks {doc.line_ink}")

    summary = {}
    k = "auto"
    for algorithm in ("kmeans", "fcm", "agglomerative"):
        t0 = time.perf_counter()
        cfg = PipelineConfig(input="synthetic", output_dir=str(out / algorithm), algorithm=algorithm,
                             k=k, seed=args.seed)
        res = run(cfg, cube=doc.cube)
        coords = np.argwhere(res.mask)
        agree = label_agreement(doc.truth[coords[:, 0], coords[:, 1]], res.labels)
        elapsed = time.perf_counter() - t0
        summary[algorithm] = {"lines": len(res.lines), "k": res.k, "agreement": agree, "seconds": elapsed}
        if res.silhouette_table:
            table = ", ".join(f"{kk}:{v:.3f}" for kk, v in res.silhouette_table.items())
            print(f"silhouette sweep: {table}")
            k = res.k  # later algorithms reuse the selected count
        print(f"{algorithm:>13}: {len(res.lines)} lines, k = {res.k}, agreement {agree:.4f}, {elapsed:.1f} s")

    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
