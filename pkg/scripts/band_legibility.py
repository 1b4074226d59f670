"""Per-band separation between ink and paper, for seeing which bands show
the text clearly and where it fades.

Contrast is (paper mean - ink mean) / pooled std, using the Otsu mask of
the grayscale mean as the ink/paper split.

    python scripts/band_legibility.py path/to/cube.hdr
    python scripts/band_legibility.py --synthetic
"""
import argparse

import numpy as np

from inkcount import envi, synth
from inkcount.cube import to_grayscale
from inkcount.segmentation import ink_mask


def band_contrast(cube, mask):
    data = np.asarray(cube.data, dtype=np.float64)
    ink, paper = data[mask], data[~mask]
    pooled = np.sqrt(0.5 * (ink.var(axis=0) + paper.var(axis=0)))
    return (paper.mean(axis=0) - ink.mean(axis=0)) / np.where(pooled > 0, pooled, np.inf)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("cube", nargs="?")
    ap.add_argument("--synthetic", action="store_true", help="use a generated 7-ink document")
    ap.add_argument("--every", type=int, default=10, help="print every n-th band")
    args = ap.parse_args()
    if args.synthetic == bool(args.cube):
        ap.error("give a cube path or --synthetic")

    cube = synth.generate().cube if args.synthetic else envi.load(args.cube)[1]
    mask = ink_mask(to_grayscale(cube).pixels)
    contrast = band_contrast(cube, mask)
    wl = cube.wavelengths or tuple(range(cube.bands))

    for b in range(0, cube.bands, args.every):
        bar = "#" * int(max(contrast[b], 0))
        print(f"band {b + 1:4d} {wl[b]:8.2f}  {contrast[b]:7.2f} {bar}")
    best = int(np.argmax(contrast))
    faded = np.flatnonzero(contrast < 0.1 * contrast[best])
    print(f"clearest band: {best + 1} ({wl[best]:.2f})")
    later = faded[faded > best]
    if len(later):
        print(f"text fades below 10% of peak contrast from band {later[0] + 1} ({wl[later[0]]:.2f})")


if __name__ == "__main__":
    main()
