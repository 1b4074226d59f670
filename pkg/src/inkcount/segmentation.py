"""Ink/paper separation and text-line splitting.

Masks are plain boolean numpy arrays, ``True`` where a pixel is ink.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cube import BandImage, EmptySelectionError, HyperCube

N_BINS = 256


class DegenerateImageError(ValueError):
    """The image is constant, so no threshold separates two classes."""


@dataclass(frozen=True, eq=False)
class LineRegion:
    index: int
    row_start: int
    row_end: int  # exclusive
    mask: np.ndarray

    @property
    def ink_pixels(self) -> int:
        return int(self.mask.sum())

    def to_record(self) -> dict:
        return {
            "index": self.index,
            "row_start": self.row_start,
            "row_end": self.row_end,
            "ink_pixels": self.ink_pixels,
        }


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """Spectra of selected pixels, one row per pixel in raster order.

    ``coords[i]`` is the (row, col) the i-th spectrum came from.
    """

    values: np.ndarray
    coords: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def _pixels(image) -> np.ndarray:
    return np.asarray(image.pixels if isinstance(image, BandImage) else image, dtype=np.float64)


def _histogram(pixels: np.ndarray) -> tuple[np.ndarray, float, float]:
    lo, hi = float(pixels.min()), float(pixels.max())
    if hi <= lo:
        raise DegenerateImageError("constant image has a single-bin histogram")
    norm = (pixels - lo) / (hi - lo)
    bins = np.minimum((norm * N_BINS).astype(np.int64), N_BINS - 1)
    return np.bincount(bins.ravel(), minlength=N_BINS), lo, hi


def between_class_variance(hist: np.ndarray) -> np.ndarray:
    """Otsu criterion for every split "bins <= k | bins > k", k = 0..N-2."""
    p = hist.astype(np.float64) / hist.sum()
    levels = np.arange(len(hist), dtype=np.float64)
    w0 = np.cumsum(p)[:-1]
    mu = np.cumsum(p * levels)[:-1]
    mu_total = float(np.dot(p, levels))
    w1 = 1.0 - w0
    with np.errstate(divide="ignore", invalid="ignore"):
        var = (mu_total * w0 - mu) ** 2 / (w0 * w1)
    var[(w0 <= 0) | (w1 <= 0)] = 0.0
    return var


def otsu_threshold(image) -> float:
    """Otsu threshold over a 256-bin histogram of min-max normalized values.

    Empty bins between the two classes give a plateau of equal criterion
    values; the threshold is placed mid-plateau rather than at its first
    edge, which keeps faint ink away from the cut.

    Raises DegenerateImageError for a constant image.
    """
    pixels = _pixels(image)
    if pixels.size == 0:
        raise ValueError("empty image")
    hist, lo, hi = _histogram(pixels)
    var = between_class_variance(hist)
    best = var.max()
    first = int(np.argmax(var))
    last = first
    while last + 1 < len(var) and var[last + 1] == best:
        last += 1
    edge = (first + last) / 2 + 1  # upper edge of the mid-plateau bin, in bin units
    return lo + (hi - lo) * edge / N_BINS


def binarize(image, threshold: float) -> np.ndarray:
    """Ink is dark on bright paper: ``pixel < threshold``."""
    return _pixels(image) < threshold


def ink_mask(image) -> np.ndarray:
    """Otsu binarization; a constant image yields an all-background mask."""
    pixels = _pixels(image)
    try:
        t = otsu_threshold(pixels)
    except DegenerateImageError:
        return np.zeros(pixels.shape, dtype=bool)
    return binarize(pixels, t)


def invert(mask: np.ndarray) -> np.ndarray:
    return ~np.asarray(mask, dtype=bool)


def horizontal_projection(mask: np.ndarray) -> np.ndarray:
    return np.asarray(mask, dtype=bool).sum(axis=1)


def segment_lines(mask: np.ndarray, min_gap_rows: int = 3, min_ink_per_row: int = 5) -> list[LineRegion]:
    """Split an ink mask into text lines from its horizontal projection.

    Rows with at least ``min_ink_per_row`` ink pixels form runs; runs
    separated by fewer than ``min_gap_rows`` rows are merged.
    """
    if min_gap_rows < 1 or min_ink_per_row < 1:
        raise ValueError("min_gap_rows and min_ink_per_row must be >= 1")
    mask = np.asarray(mask, dtype=bool)
    active = horizontal_projection(mask) >= min_ink_per_row

    padded = np.concatenate([[False], active, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    runs = [[int(s), int(e)] for s, e in zip(edges[::2], edges[1::2])]

    merged: list[list[int]] = []
    for start, end in runs:
        if merged and start - merged[-1][1] < min_gap_rows:
            merged[-1][1] = end
        else:
            merged.append([start, end])

    regions = []
    for i, (start, end) in enumerate(merged):
        line_mask = np.zeros_like(mask)
        line_mask[start:end] = mask[start:end]
        regions.append(LineRegion(i, start, end, line_mask))
    return regions


def extract_samples(cube: HyperCube, mask: np.ndarray) -> SampleMatrix:
    """Spectra under ``mask`` in raster order, as float64."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (cube.rows, cube.cols):
        raise ValueError(f"mask shape {mask.shape} does not match image plane {(cube.rows, cube.cols)}")
    coords = np.argwhere(mask)
    if len(coords) == 0:
        raise EmptySelectionError("mask selects no pixels")
    values = cube.data[coords[:, 0], coords[:, 1], :].astype(np.float64)
    return SampleMatrix(values, coords)


def extract_line_samples(cube: HyperCube, region: LineRegion) -> SampleMatrix:
    return extract_samples(cube, region.mask)


def auto_margin(mask: np.ndarray, min_density: float = 0.001) -> tuple[int, int, int, int]:
    """Bounding rectangle (top, left, height, width) after trimming border
    rows/cols whose ink density is below ``min_density``.

    A mask with no qualifying rows or columns returns the full frame.
    """
    mask = np.asarray(mask, dtype=bool)
    rows = np.flatnonzero(mask.mean(axis=1) >= min_density)
    cols = np.flatnonzero(mask.mean(axis=0) >= min_density)
    if len(rows) == 0 or len(cols) == 0:
        return 0, 0, mask.shape[0], mask.shape[1]
    return int(rows[0]), int(cols[0]), int(rows[-1] - rows[0] + 1), int(cols[-1] - cols[0] + 1)
