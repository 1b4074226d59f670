"""In-memory hyperspectral cube: band access, cropping and spectral means."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EmptySelectionError(ValueError):
    """A mask or region selected no pixels."""


@dataclass(frozen=True, eq=False)
class HyperCube:
    """Reflectance cube addressed ``data[row, col, band]``.

    The array is made read-only on construction; operations return new cubes.
    """

    data: np.ndarray
    wavelengths: tuple[float, ...] | None = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3 or 0 in data.shape:
            raise ValueError(f"cube data must be a non-empty 3-D array, got shape {data.shape}")
        if data.dtype.kind != "f":
            data = data.astype(np.float64)
        if not np.isfinite(data).all():
            raise ValueError("cube contains NaN or Inf")
        if self.wavelengths is not None:
            wl = tuple(float(w) for w in self.wavelengths)
            if len(wl) != data.shape[2]:
                raise ValueError("wavelength count does not match band count")
            object.__setattr__(self, "wavelengths", wl)
        if data.flags.writeable:
            data = data.view()
            data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def bands(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def wavelength(self, band: int) -> float | None:
        return None if self.wavelengths is None else self.wavelengths[band]


@dataclass(frozen=True, eq=False)
class BandImage:
    pixels: np.ndarray
    band_index: int | None = None
    wavelength: float | None = None

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True, eq=False)
class SpectralSignature:
    values: np.ndarray
    wavelengths: tuple[float, ...] | None = None

    def __len__(self):
        return len(self.values)


def get_band(cube: HyperCube, index: int) -> BandImage:
    if not 0 <= index < cube.bands:
        raise IndexError(f"band index {index} outside [0, {cube.bands})")
    return BandImage(cube.data[:, :, index], band_index=index, wavelength=cube.wavelength(index))


def crop(cube: HyperCube, top: int, left: int, height: int, width: int) -> HyperCube:
    if height < 1 or width < 1 or top < 0 or left < 0:
        raise IndexError("crop rectangle must have positive size and non-negative origin")
    if top + height > cube.rows or left + width > cube.cols:
        raise IndexError(
            f"crop rectangle ({top}, {left}, {height}, {width}) exceeds "
            f"image plane {cube.rows}x{cube.cols}"
        )
    sub = cube.data[top : top + height, left : left + width, :]
    return HyperCube(np.ascontiguousarray(sub), wavelengths=cube.wavelengths)


def to_grayscale(cube: HyperCube) -> BandImage:
    """Unweighted per-pixel mean over all bands, accumulated in float64."""
    return BandImage(cube.data.mean(axis=2, dtype=np.float64))


def spectrum_at(cube: HyperCube, row: int, col: int) -> SpectralSignature:
    if not (0 <= row < cube.rows and 0 <= col < cube.cols):
        raise IndexError(f"pixel ({row}, {col}) outside image plane {cube.rows}x{cube.cols}")
    return SpectralSignature(cube.data[row, col, :].astype(np.float64), cube.wavelengths)


def mean_spectrum(cube: HyperCube, mask: np.ndarray) -> SpectralSignature:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (cube.rows, cube.cols):
        raise ValueError(f"mask shape {mask.shape} does not match image plane {(cube.rows, cube.cols)}")
    if not mask.any():
        raise EmptySelectionError("mask selects no pixels")
    values = cube.data[mask].mean(axis=0, dtype=np.float64)
    return SpectralSignature(values, cube.wavelengths)
