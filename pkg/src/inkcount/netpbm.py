"""Minimal binary netpbm (P4 / P5 / P6) encode and decode."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def encode_pbm(mask: np.ndarray) -> bytes:
    """P4 bitmap; a set bit (black) marks a True pixel."""
    mask = np.asarray(mask, dtype=bool)
    rows, cols = mask.shape
    body = np.packbits(mask, axis=1).tobytes()  # each row padded to a whole byte
    return f"P4\n{cols} {rows}\n".encode("ascii") + body


def encode_pgm(image: np.ndarray) -> bytes:
    """P5 8-bit greymap, min-max normalized (a constant image maps to 0)."""
    image = np.asarray(image, dtype=np.float64)
    lo, hi = image.min(), image.max()
    if hi > lo:
        scaled = np.round((image - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(image)
    return encode_pgm_raw(scaled.astype(np.uint8))


def encode_pgm_raw(image: np.ndarray) -> bytes:
    """P5 from an array already in 0..255, no rescaling."""
    image = np.asarray(image)
    if image.min(initial=0) < 0 or image.max(initial=0) > 255:
        raise ValueError("raw PGM values must lie in 0..255")
    rows, cols = image.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + image.astype(np.uint8).tobytes()


def encode_ppm(rgb: np.ndarray) -> bytes:
    rgb = np.asarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("rgb must have shape (rows, cols, 3)")
    rows, cols = rgb.shape[:2]
    return f"P6\n{cols} {rows}\n255\n".encode("ascii") + rgb.tobytes()


def _tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    out, pos = [], 0
    while len(out) < count:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while data[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        out.append(data[start:pos])
    return out, pos + 1  # one whitespace byte ends the header


def decode(data: bytes) -> np.ndarray:
    """Decode P4 (bool), P5 (uint8) or P6 (uint8 rgb) bytes."""
    magic = data[:2]
    if magic == b"P4":
        (_, w, h), pos = _tokens(data, 3)
        w, h = int(w), int(h)
        packed = np.frombuffer(data, dtype=np.uint8, offset=pos).reshape(h, -1)
        return np.unpackbits(packed, axis=1)[:, :w].astype(bool)
    if magic in (b"P5", b"P6"):
        (_, w, h, maxval), pos = _tokens(data, 4)
        if int(maxval) > 255:
            raise ValueError("16-bit netpbm not supported")
        w, h = int(w), int(h)
        px = np.frombuffer(data, dtype=np.uint8, offset=pos)
        return px.reshape(h, w) if magic == b"P5" else px.reshape(h, w, 3)
    raise ValueError(f"unsupported netpbm magic {magic!r}")


def read(path: str | Path) -> np.ndarray:
    return decode(Path(path).read_bytes())
