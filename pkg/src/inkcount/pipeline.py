"""End-to-end ink analysis: load, crop, binarize, split lines, cluster, report."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import envi, report
from .clustering import (
    agglomerative,
    cluster_centroids,
    cut_dendrogram,
    estimate_ink_count,
    fcm,
    kmeans,
    nearest_centroid_labels,
)
from .cube import HyperCube, crop, get_band, mean_spectrum, to_grayscale
from .netpbm import encode_pbm, encode_pgm
from .segmentation import auto_margin, extract_samples, ink_mask, segment_lines

log = logging.getLogger(__name__)

ALGORITHMS = ("kmeans", "fcm", "agglomerative")

# output file names, relative to the output directory
REPORT_FILE = "report.json"
LABEL_MAP_FILE = "label_map.ppm"
MASK_FILE = "ink_mask.pbm"
GRAYSCALE_FILE = "grayscale.pgm"
LINES_FILE = "lines.json"
LINE_SPECTRA_FILE = "line_spectra.csv"
CLUSTER_SPECTRA_FILE = "cluster_spectra.csv"


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str, exit_code: int = 1):
        self.stage = stage
        self.exit_code = exit_code
        super().__init__(f"{stage}: {message}")


class NoInkDetected(PipelineError):
    def __init__(self):
        super().__init__("threshold", "no ink detected", exit_code=1)


@dataclass
class PipelineConfig:
    input: str | None = None
    output_dir: str = "out"
    crop: str = "none"  # "none", "auto", or "top,left,height,width"
    band: int | None = None  # binarize this band instead of the grayscale mean
    algorithm: str = "kmeans"
    k: int | str = 7  # or "auto"
    k_min: int = 2
    k_max: int = 10
    seed: int = 0
    tol: float = 1e-5
    max_iter: int = 300
    m: float = 2.0
    linkage: str = "average"
    restarts: int = 10
    subsample: int = 5000
    silhouette_sample: int = 4000
    include_background: bool = False
    min_gap_rows: int = 3
    min_ink_per_row: int = 5
    margin_density: float = 0.001

    def __post_init__(self):
        if isinstance(self.k, str) and self.k != "auto":
            self.k = int(self.k)

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.k == "auto":
            if not 2 <= self.k_min < self.k_max:
                raise ValueError("k=auto needs 2 <= k_min < k_max")
        elif self.k < 1:
            raise ValueError("k must be >= 1")
        if self.crop not in ("none", "auto"):
            parse_rect(self.crop)
        if self.m <= 1:
            raise ValueError("m must be > 1")
        if self.restarts < 1 or self.max_iter < 1 or self.subsample < 2:
            raise ValueError("restarts and max_iter must be >= 1, subsample >= 2")
        if self.min_gap_rows < 1 or self.min_ink_per_row < 1:
            raise ValueError("min_gap_rows and min_ink_per_row must be >= 1")

    def echo(self) -> dict:
        """Resolved settings for the report; the output location is left out
        so reruns elsewhere give identical reports."""
        d = asdict(self)
        d.pop("output_dir")
        return d

    @classmethod
    def from_mapping(cls, values: dict) -> "PipelineConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = set(values) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: _coerce(known[k], v) for k, v in values.items()})


def _coerce(f, value):
    if not isinstance(value, str):
        return value
    default = f.default
    if f.name == "k":
        return value if value == "auto" else int(value)
    if f.name == "band":
        return None if value.lower() in ("", "none") else int(value)
    if isinstance(default, bool):
        return value.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def load_config_file(path: str | Path) -> dict:
    """Read a JSON object or ``key = value`` lines (``#`` comments allowed)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def parse_rect(spec: str) -> tuple[int, int, int, int]:
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != 4:
        raise ValueError(f"crop rectangle must be 'top,left,height,width', got {spec!r}")
    return tuple(int(p) for p in parts)


@dataclass
class AnalysisResult:
    status: str
    output_dir: Path
    crop: tuple[int, int, int, int]
    mask: np.ndarray
    lines: list = field(default_factory=list)
    k: int | None = None
    labels: np.ndarray | None = None
    label_map: np.ndarray | None = None
    silhouette_table: dict | None = None
    report_text: str = ""


def _binarization_source(cube: HyperCube, band: int | None) -> np.ndarray:
    return (to_grayscale(cube) if band is None else get_band(cube, band)).pixels


def _run_clustering(X: np.ndarray, k: int, cfg: PipelineConfig) -> dict:
    if cfg.algorithm == "kmeans":
        res = kmeans(X, k, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol, n_init=cfg.restarts)
        return dict(
            labels=res.labels, objective=res.objective, iterations=res.iterations,
            converged=res.converged, objective_trace=res.trace,
            params={"restarts": cfg.restarts, "tol": cfg.tol, "max_iter": cfg.max_iter, "seed": cfg.seed},
        )
    if cfg.algorithm == "fcm":
        res = fcm(X, k, m=cfg.m, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol)
        return dict(
            labels=res.labels, objective=res.objective, iterations=res.iterations,
            converged=res.converged, objective_trace=res.trace,
            params={"m": cfg.m, "tol": cfg.tol, "max_iter": cfg.max_iter, "seed": cfg.seed},
        )

    # agglomerative on a seeded subsample, the rest joins the nearest cluster mean
    n = len(X)
    if n > cfg.subsample:
        rng = np.random.default_rng(cfg.seed)
        subset = np.sort(rng.choice(n, size=cfg.subsample, replace=False))
    else:
        subset = np.arange(n)
    tree = agglomerative(X[subset], cfg.linkage)
    sub_labels = cut_dendrogram(tree, k)
    centroids = cluster_centroids(X[subset], sub_labels, k)
    labels = nearest_centroid_labels(X, centroids)
    labels[subset] = sub_labels
    diff = X - cluster_centroids(X, labels, k)[labels]
    return dict(
        labels=labels, objective=float(np.einsum("ij,ij->", diff, diff)),
        iterations=len(tree.merges), converged=True, objective_trace=[],
        params={"linkage": cfg.linkage, "subsample": int(len(subset)), "seed": cfg.seed},
    )


def run(cfg: PipelineConfig, cube: HyperCube | None = None, header: envi.EnviHeader | None = None) -> AnalysisResult:
    """Execute the analysis and write every artifact into ``cfg.output_dir``.

    Raises NoInkDetected (after writing an empty report) when the mask is
    empty, and PipelineError naming the failing stage otherwise.
    """
    try:
        cfg.validate()
    except ValueError as exc:
        raise PipelineError("config", str(exc), exit_code=2) from None

    if cube is None:
        try:
            header, cube = envi.load(cfg.input)
        except (OSError, ValueError) as exc:
            raise PipelineError("load", str(exc), exit_code=2) from None
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    try:
        if cfg.crop == "none":
            rect = (0, 0, cube.rows, cube.cols)
        elif cfg.crop == "auto":
            rect = auto_margin(ink_mask(_binarization_source(cube, cfg.band)), cfg.margin_density)
        else:
            rect = parse_rect(cfg.crop)
        if rect != (0, 0, cube.rows, cube.cols):
            cube = crop(cube, *rect)
    except (IndexError, ValueError) as exc:
        raise PipelineError("crop", str(exc)) from None
    log.info("crop %s -> %dx%dx%d", rect, cube.rows, cube.cols, cube.bands)

    try:
        source = _binarization_source(cube, cfg.band)
    except IndexError as exc:
        raise PipelineError("grayscale", str(exc)) from None
    mask = ink_mask(source)
    (out / GRAYSCALE_FILE).write_bytes(encode_pgm(source))
    (out / MASK_FILE).write_bytes(encode_pbm(mask))

    lines = segment_lines(mask, cfg.min_gap_rows, cfg.min_ink_per_row)
    line_spectra = [mean_spectrum(cube, r.mask) for r in lines]
    (out / LINES_FILE).write_text(json.dumps([r.to_record() for r in lines], indent=2) + "\n")
    if lines:
        (out / LINE_SPECTRA_FILE).write_text(report.spectra_csv(
            {f"line_{r.index}": s.values for r, s in zip(lines, line_spectra)},
            cube.wavelengths, cube.bands,
        ))
    log.info("%d ink pixels, %d lines", int(mask.sum()), len(lines))

    metadata = {
        "status": "ok",
        "header": report.header_record(header),
        "config": cfg.echo(),
        "crop": dict(zip(("top", "left", "height", "width"), map(int, rect))),
        "ink_pixels": int(mask.sum()),
    }
    result = AnalysisResult("ok", out, rect, mask, lines)

    if not mask.any():
        metadata["status"] = "no_ink"
        result.status = "no_ink"
        result.report_text = report.export_report(metadata, lines, line_spectra)
        (out / REPORT_FILE).write_text(result.report_text)
        raise NoInkDetected()

    sample_mask = np.ones_like(mask) if cfg.include_background else mask
    samples = extract_samples(cube, sample_mask)
    X = samples.values

    try:
        silhouette_table = None
        k_selection = "fixed"
        if cfg.k == "auto":
            k_max = min(cfg.k_max, len(X) - 1)
            k, silhouette_table = estimate_ink_count(
                X, cfg.k_min, k_max, seed=cfg.seed, n_init=cfg.restarts,
                sample_size=cfg.silhouette_sample, max_iter=cfg.max_iter, tol=cfg.tol,
            )
            k_selection = "silhouette"
        else:
            k = cfg.k
        if k > len(X):
            raise ValueError(f"k = {k} exceeds the {len(X)} available samples")
        clustered = _run_clustering(X, k, cfg)
    except ValueError as exc:
        raise PipelineError("cluster", str(exc)) from None
    labels = clustered.pop("labels")
    log.info("%s with k=%d (%s)", cfg.algorithm, k, k_selection)

    label_map = report.build_label_map(sample_mask, samples.coords, labels)
    (out / LABEL_MAP_FILE).write_bytes(report.render_label_map(label_map, report.palette_for(k)))
    spectra = report.cluster_mean_spectra(X, labels, k, cube.wavelengths)
    (out / CLUSTER_SPECTRA_FILE).write_text(report.spectra_csv(
        {f"cluster_{j + 1}": None if s is None else s.values for j, s in enumerate(spectra)},
        cube.wavelengths, cube.bands,
    ))
    clustered.update(
        algorithm=cfg.algorithm, k=k, k_selection=k_selection,
        cluster_sizes=np.bincount(labels, minlength=k), cluster_spectra=spectra,
    )
    result.report_text = report.export_report(
        metadata, lines, line_spectra, clustered, silhouette_table, LABEL_MAP_FILE
    )
    (out / REPORT_FILE).write_text(result.report_text)

    result.k = k
    result.labels = labels
    result.label_map = label_map
    result.silhouette_table = silhouette_table
    return result
