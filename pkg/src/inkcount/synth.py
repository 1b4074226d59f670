"""Synthetic handwritten-document cubes with known inks.

Reflectance model, per wavelength ``w`` (nm), with ``s(x) = 1 / (1 + exp(-x))``:

    paper(w) = 0.55 + 0.35 * s((w - 540) / 30)
    ink_i(w) = floor_i + (paper(w) - floor_i) * s((w - w0_i) / 10)

Each ink is dark (``floor_i`` between 0.05 and 0.22) in the visible range and
ramps up to the paper curve past its own inflection wavelength ``w0_i``; the
inflections are spread evenly over 645-725 nm, so every ink is legible near
band 60 of a 149-band 478-901 nm cube and has faded into the paper by about
band 98. Line ``l`` is written in ink ``l % n_inks``.

Strokes are cursive-like sine traces, a few pixels thick, grouped into words
along evenly spaced text lines. Gaussian noise with standard deviation
``noise * (max - min)`` of the noiseless signal is added to every sample.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import envi
from .cube import HyperCube
from .netpbm import encode_pgm_raw

# dimensions and wavelength range of the reference document cube
REFERENCE_ROWS = 650
REFERENCE_COLS = 512
REFERENCE_BANDS = 149
REFERENCE_WL_START = 478.7825462
REFERENCE_WL_END = 900.9723394


@dataclass
class SynthConfig:
    n_inks: int = 7
    n_lines: int = 12
    rows: int = REFERENCE_ROWS
    cols: int = REFERENCE_COLS
    bands: int = REFERENCE_BANDS
    wl_start: float = REFERENCE_WL_START
    wl_end: float = REFERENCE_WL_END
    noise: float = 0.01
    seed: int = 0

    def validate(self) -> None:
        if min(self.n_inks, self.n_lines, self.rows, self.cols, self.bands) < 1:
            raise ValueError("ink count, line count and dimensions must be positive")
        if self.n_inks > self.n_lines:
            raise ValueError(f"{self.n_inks} inks cannot all appear on {self.n_lines} lines")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")
        if self.bands > 1 and not self.wl_end > self.wl_start:
            raise ValueError("wl_end must exceed wl_start")
        if (self.rows * 0.9) / self.n_lines < 12:
            raise ValueError(f"{self.rows} rows are too few for {self.n_lines} separable text lines")
        if self.cols < 40:
            raise ValueError("need at least 40 columns")


@dataclass
class SynthDocument:
    config: SynthConfig
    cube: HyperCube
    truth: np.ndarray  # 0 paper, i + 1 for ink i
    paper: np.ndarray
    inks: np.ndarray  # (n_inks, bands)
    line_ink: list[int]
    line_spans: list[tuple[int, int]]
    noise_sigma: float


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def wavelength_grid(cfg: SynthConfig) -> np.ndarray:
    if cfg.bands == 1:
        return np.array([cfg.wl_start])
    return np.linspace(cfg.wl_start, cfg.wl_end, cfg.bands)


def prototypes(n_inks: int, wavelengths: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Paper spectrum and one spectrum per ink, as documented above."""
    w = np.asarray(wavelengths, dtype=np.float64)
    paper = 0.55 + 0.35 * _sigmoid((w - 540.0) / 30.0)
    if n_inks == 1:
        inflections = np.array([685.0])
        floors = np.array([0.1])
    else:
        inflections = np.linspace(645.0, 725.0, n_inks)
        # decouple darkness from inflection order
        floors = 0.05 + 0.17 * ((np.arange(n_inks) * 3) % n_inks) / (n_inks - 1)
    inks = floors[:, None] + (paper - floors[:, None]) * _sigmoid((w - inflections[:, None]) / 10.0)
    return paper, inks


def _draw_line(canvas: np.ndarray, value: int, center: float, amp: int, thick: int, x_lo: int, x_hi: int, rng) -> None:
    period = max(6, 2 * amp)
    x = x_lo + int(rng.integers(0, period // 2 + 1))
    rows = canvas.shape[0]
    while x < x_hi - period:
        width = int(rng.integers(2 * period, 5 * period + 1))
        end = min(x + width, x_hi)
        phase = rng.uniform(0, 2 * np.pi)
        xs = np.arange(x, end + 1)
        ys = center + amp * np.sin(2 * np.pi * (xs - x) / period + phase)
        for col, y0, y1 in zip(xs[:-1], ys[:-1], ys[1:]):
            top = int(round(min(y0, y1))) - thick // 2
            bottom = int(round(max(y0, y1))) + (thick - thick // 2)
            canvas[max(top, 0) : min(bottom, rows), col] = value
        x = end + int(rng.integers(period // 2, period + 1))


def generate(cfg: SynthConfig | None = None) -> SynthDocument:
    cfg = cfg or SynthConfig()
    cfg.validate()
    layout_seed, noise_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    layout_rng = np.random.default_rng(layout_seed)
    noise_rng = np.random.default_rng(noise_seed)

    wl = wavelength_grid(cfg)
    paper, inks = prototypes(cfg.n_inks, wl)

    margin = cfg.rows * 0.05
    pitch = (cfg.rows - 2 * margin) / cfg.n_lines
    amp = max(2, int(pitch * 0.25))
    thick = max(2, int(round(pitch * 0.06)))
    x_lo, x_hi = int(cfg.cols * 0.06), int(cfg.cols * 0.94)

    truth = np.zeros((cfg.rows, cfg.cols), dtype=np.int32)
    line_ink = [line % cfg.n_inks for line in range(cfg.n_lines)]
    spans = []
    for line, ink in enumerate(line_ink):
        center = margin + (line + 0.5) * pitch
        _draw_line(truth, ink + 1, center, amp, thick, x_lo, x_hi, layout_rng)
        hit = np.flatnonzero((truth == ink + 1).any(axis=1) & (np.abs(np.arange(cfg.rows) - center) <= pitch / 2))
        spans.append((int(hit[0]), int(hit[-1]) + 1))

    table = np.vstack([paper, inks])  # row 0 paper, row i+1 ink i
    sigma = cfg.noise * float(table.max() - table.min()) if table.size > 1 else cfg.noise

    data = np.empty((cfg.rows, cfg.cols, cfg.bands), dtype=np.float32)
    for b in range(cfg.bands):
        band = table[:, b][truth]
        if sigma > 0:
            band = band + noise_rng.normal(0.0, sigma, size=band.shape)
        data[:, :, b] = np.clip(band, 0.0, None)

    cube = HyperCube(data, wavelengths=tuple(wl))
    return SynthDocument(cfg, cube, truth, paper, inks, line_ink, spans, sigma)


def save(doc: SynthDocument, path: str | Path, interleave: str = "bsq") -> dict[str, Path]:
    """Write the ENVI pair plus ``<name>_truth.json`` and ``<name>_truth.pgm``."""
    base = Path(path)
    if base.suffix.lower() in (".hdr", ".raw"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    hdr, raw = envi.save(base, doc.cube, interleave=interleave, data_type="float32")

    pgm = base.parent / f"{base.name}_truth.pgm"
    pgm.write_bytes(encode_pgm_raw(doc.truth))
    truth = {
        "config": asdict(doc.config),
        "noise_sigma": doc.noise_sigma,
        "line_ink": doc.line_ink,
        "line_spans": [list(s) for s in doc.line_spans],
        "wavelengths": [float(w) for w in doc.cube.wavelengths],
        "paper_spectrum": [float(v) for v in doc.paper],
        "ink_spectra": [[float(v) for v in row] for row in doc.inks],
        "label_image": pgm.name,
    }
    js = base.parent / f"{base.name}_truth.json"
    js.write_text(json.dumps(truth, indent=2) + "\n")
    return {"header": hdr, "raw": raw, "truth_json": js, "truth_pgm": pgm}
