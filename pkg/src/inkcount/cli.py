"""Command-line interface: ``inkcount {info,analyze,synth,band,lines}``.

Exit codes: 0 success, 1 analysis failure (no ink, degenerate clustering),
2 usage, I/O or parse errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import envi, synth
from .cube import crop, get_band
from .netpbm import encode_pgm
from .pipeline import PipelineConfig, PipelineError, _binarization_source, load_config_file, parse_rect, run
from .segmentation import auto_margin, ink_mask, segment_lines


class CLIError(Exception):
    def __init__(self, message: str, code: int = 2):
        self.code = code
        super().__init__(message)


def _load(path):
    try:
        return envi.load(path)
    except (OSError, ValueError) as exc:
        raise CLIError(f"cannot read {path}: {exc}") from None


def summarize_header(header: envi.EnviHeader) -> str:
    text = f"{header.lines} × {header.samples} × {header.bands}, {header.interleave.upper()}, {header.data_type}"
    if header.wavelengths is not None:
        text += f", {header.wavelengths[0]:.2f}–{header.wavelengths[-1]:.2f} nm"
    return text


def cmd_info(args) -> int:
    header, _ = _load(args.cube)
    print(summarize_header(header))
    print(f"rows (lines):  {header.lines}")
    print(f"samples:       {header.samples}")
    print(f"bands:         {header.bands}")
    print(f"interleave:    {header.interleave.upper()}")
    print(f"data type:     {header.data_type} ({header.dtype.itemsize * 8} bits, {header.byte_order}-endian)")
    print(f"header offset: {header.header_offset}")
    if header.wavelengths is not None:
        units = header.wavelength_units or "nm"
        print(f"wavelengths:   {header.wavelengths[0]} – {header.wavelengths[-1]} ({units})")
    return 0


def cmd_analyze(args) -> int:
    values = {}
    if args.config:
        try:
            values.update(load_config_file(args.config))
        except (OSError, ValueError) as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}") from None
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "func", "config", "verbose")}
    values.update(flags)
    try:
        cfg = PipelineConfig.from_mapping(values)
    except (TypeError, ValueError) as exc:
        raise CLIError(f"bad configuration: {exc}") from None
    try:
        result = run(cfg)
    except PipelineError as exc:
        print(f"error in stage {exc}", file=sys.stderr)
        return exc.exit_code
    print(f"{len(result.lines)} lines, {int(result.mask.sum())} ink pixels, "
          f"k = {result.k} ({cfg.algorithm}); report in {result.output_dir / 'report.json'}")
    return 0


def cmd_synth(args) -> int:
    cfg = synth.SynthConfig(
        n_inks=args.inks, n_lines=args.lines, rows=args.rows, cols=args.cols, bands=args.bands,
        wl_start=args.wl_start, wl_end=args.wl_end, noise=args.noise, seed=args.seed,
    )
    try:
        doc = synth.generate(cfg)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    paths = synth.save(doc, args.output, interleave=args.interleave)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def cmd_band(args) -> int:
    _, cube = _load(args.cube)
    try:
        band = get_band(cube, args.index)
    except IndexError as exc:
        raise CLIError(str(exc)) from None
    out = Path(args.output or f"band_{args.index:03d}.pgm")
    out.write_bytes(encode_pgm(band.pixels))
    if args.csv:
        rows = [",".join(repr(float(v)) for v in row) for row in band.pixels]
        Path(args.csv).write_text("\n".join(rows) + "\n")
    print(f"band {args.index}" + (f" ({band.wavelength:.2f} nm)" if band.wavelength else "") + f" -> {out}")
    return 0


def cmd_lines(args) -> int:
    _, cube = _load(args.cube)
    try:
        if args.crop == "auto":
            cube = crop(cube, *auto_margin(ink_mask(_binarization_source(cube, args.band))))
        elif args.crop != "none":
            cube = crop(cube, *parse_rect(args.crop))
        mask = ink_mask(_binarization_source(cube, args.band))
    except (IndexError, ValueError) as exc:
        raise CLIError(str(exc)) from None
    records = [r.to_record() for r in segment_lines(mask, args.min_gap_rows, args.min_ink_per_row)]
    text = json.dumps(records, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inkcount", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log pipeline progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print the header summary of an ENVI cube")
    p.add_argument("cube")
    p.set_defaults(func=cmd_info)

    # analyze flags default to SUPPRESS so config-file values survive unless overridden
    S = argparse.SUPPRESS
    p = sub.add_parser("analyze", help="segment ink, split lines, cluster spectra, write a report",
                       argument_default=S)
    p.add_argument("input", help="ENVI cube (.hdr or payload path)")
    p.add_argument("-o", "--output-dir", dest="output_dir")
    p.add_argument("--config", default=None, help="JSON or key=value file; flags take precedence")
    p.add_argument("--crop", help="'none', 'auto' (trim sparse margins) or 'top,left,height,width'")
    p.add_argument("--auto-margin", dest="crop", action="store_const", const="auto")
    p.add_argument("--band", type=int, help="binarize this band instead of the grayscale mean")
    p.add_argument("--algorithm", choices=["kmeans", "fcm", "agglomerative"])
    p.add_argument("-k", "--k", dest="k", help="cluster count or 'auto'")
    p.add_argument("--k-min", dest="k_min", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--m", type=float, help="fuzzy c-means fuzziness (> 1)")
    p.add_argument("--linkage", choices=["single", "complete", "average"])
    p.add_argument("--restarts", type=int, help="k-means restarts")
    p.add_argument("--subsample", type=int, help="agglomerative subsample size")
    p.add_argument("--silhouette-sample", dest="silhouette_sample", type=int)
    p.add_argument("--include-background", dest="include_background", action="store_true")
    p.add_argument("--min-gap-rows", dest="min_gap_rows", type=int)
    p.add_argument("--min-ink-per-row", dest="min_ink_per_row", type=int)
    p.add_argument("--margin-density", dest="margin_density", type=float)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="generate a synthetic document cube with ground truth")
    p.add_argument("output", help="output base path (writes .hdr/.raw/_truth.json/_truth.pgm)")
    p.add_argument("--inks", type=int, default=7)
    p.add_argument("--lines", type=int, default=12)
    p.add_argument("--rows", type=int, default=synth.REFERENCE_ROWS)
    p.add_argument("--cols", type=int, default=synth.REFERENCE_COLS)
    p.add_argument("--bands", type=int, default=synth.REFERENCE_BANDS)
    p.add_argument("--wl-start", dest="wl_start", type=float, default=synth.REFERENCE_WL_START)
    p.add_argument("--wl-end", dest="wl_end", type=float, default=synth.REFERENCE_WL_END)
    p.add_argument("--noise", type=float, default=0.01, help="noise sigma as a fraction of the signal range")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--interleave", choices=envi.INTERLEAVES, default="bsq")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("band", help="export one band as an 8-bit PGM")
    p.add_argument("cube")
    p.add_argument("index", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--csv", help="also write the exact band values as CSV")
    p.set_defaults(func=cmd_band)

    p = sub.add_parser("lines", help="emit detected text-line spans as JSON")
    p.add_argument("cube")
    p.add_argument("--crop", default="none")
    p.add_argument("--band", type=int, default=None)
    p.add_argument("--min-gap-rows", dest="min_gap_rows", type=int, default=3)
    p.add_argument("--min-ink-per-row", dest="min_ink_per_row", type=int, default=5)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_lines)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"inkcount: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
