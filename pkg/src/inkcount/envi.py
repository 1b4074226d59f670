"""Reading and writing ENVI header/raw-binary cube pairs.

The header grammar is the usual ENVI ``key = value`` text with ``{ ... }``
lists that may span several lines. Keys are matched case-insensitively and
with internal whitespace collapsed, so ``Data Type``, ``data  type`` and
``DATA TYPE`` are the same key. Anything not recognized is kept verbatim in
:attr:`EnviHeader.extra`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cube import HyperCube

INTERLEAVES = ("bsq", "bil", "bip")

# ENVI "data type" codes -> numpy dtype names
DATA_TYPES = {
    1: "uint8",
    2: "int16",
    3: "int32",
    4: "float32",
    5: "float64",
    12: "uint16",
    13: "uint32",
    14: "int64",
    15: "uint64",
}
DATA_TYPE_CODES = {name: code for code, name in DATA_TYPES.items()}

REQUIRED_KEYS = ("samples", "lines", "bands", "data type", "interleave")
_KNOWN_KEYS = set(REQUIRED_KEYS) | {
    "byte order",
    "header offset",
    "wavelength",
    "wavelength units",
}


class EnviError(ValueError):
    """Base class for ENVI header and payload errors."""


class MissingKeyError(EnviError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"missing required header key: {key!r}")


class HeaderParseError(EnviError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class ConsistencyError(EnviError):
    """Header fields contradict each other (e.g. wavelength count vs bands)."""


class SizeMismatchError(EnviError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"raw payload too short: expected {expected} bytes, got {actual}"
        )


class UnsupportedFormatError(EnviError):
    pass


@dataclass(frozen=True)
class EnviHeader:
    samples: int
    lines: int
    bands: int
    interleave: str = "bsq"
    data_type: str = "float32"
    byte_order: str = "little"
    header_offset: int = 0
    wavelengths: tuple[float, ...] | None = None
    wavelength_units: str | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("samples", "lines", "bands"):
            if getattr(self, name) < 1:
                raise ConsistencyError(f"{name} must be >= 1")
        if self.interleave not in INTERLEAVES:
            raise HeaderParseError(f"unknown interleave {self.interleave!r}")
        if self.data_type not in DATA_TYPE_CODES:
            raise UnsupportedFormatError(f"unsupported data type {self.data_type!r}")
        if self.byte_order not in ("little", "big"):
            raise HeaderParseError(f"unknown byte order {self.byte_order!r}")
        if self.header_offset < 0:
            raise ConsistencyError("header offset must be >= 0")
        if self.wavelengths is not None:
            if len(self.wavelengths) != self.bands:
                raise ConsistencyError(
                    f"wavelength list has {len(self.wavelengths)} entries "
                    f"but bands = {self.bands}"
                )
            w = np.asarray(self.wavelengths)
            if np.any(np.diff(w) <= 0):
                raise ConsistencyError("wavelengths must be strictly increasing")

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.data_type).newbyteorder(
            "<" if self.byte_order == "little" else ">"
        )

    @property
    def payload_bytes(self) -> int:
        return self.samples * self.lines * self.bands * self.dtype.itemsize


def _normalize_key(key: str) -> str:
    return " ".join(key.lower().split())


def _split_entries(text: str):
    """Yield (line_number, key, raw_value) with brace lists joined."""
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i].strip()
        i += 1
        if not line or line.startswith(";") or line.upper() == "ENVI":
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise HeaderParseError(f"expected 'key = value', got {line!r}", lineno)
        value = value.strip()
        if value.startswith("{"):
            while "}" not in value:
                if i >= len(lines):
                    raise HeaderParseError("unterminated '{' list", lineno)
                value += "\n" + lines[i].strip()
                i += 1
        yield lineno, _normalize_key(key), value


def _brace_items(value: str) -> list[str]:
    inner = value.strip()
    if inner.startswith("{"):
        inner = inner[1 : inner.rindex("}")]
    return [item.strip() for item in inner.split(",") if item.strip()]


def _as_int(value: str, key: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise HeaderParseError(f"{key!r} is not an integer: {value!r}", lineno) from None


def parse_header(text: str) -> EnviHeader:
    """Parse ENVI header text into an :class:`EnviHeader`.

    Raises
    ------
    MissingKeyError
        One of samples/lines/bands/data type/interleave is absent.
    HeaderParseError
        Malformed line or non-numeric dimension (carries the line number).
    ConsistencyError
        Wavelength count differs from ``bands`` or is not increasing.
    """
    if not text or not text.strip():
        raise HeaderParseError("empty header")

    raw: dict[str, tuple[int, str]] = {}
    extra: dict[str, object] = {}
    for lineno, key, value in _split_entries(text):
        if key in _KNOWN_KEYS:
            raw[key] = (lineno, value)
        elif value.startswith("{") and key != "description":
            extra[key] = _brace_items(value)
        else:
            extra[key] = value.strip("{}").strip() if key == "description" else value

    for key in REQUIRED_KEYS:
        if key not in raw:
            raise MissingKeyError(key)

    dims = {k: _as_int(raw[k][1], k, raw[k][0]) for k in ("samples", "lines", "bands")}

    lineno, value = raw["data type"]
    code = _as_int(value, "data type", lineno)
    if code not in DATA_TYPES:
        raise UnsupportedFormatError(f"unsupported ENVI data type code {code}")

    lineno, value = raw["interleave"]
    interleave = value.strip().lower()
    if interleave not in INTERLEAVES:
        raise HeaderParseError(f"unknown interleave {value!r}", lineno)

    byte_order = "little"
    if "byte order" in raw:
        lineno, value = raw["byte order"]
        flag = _as_int(value, "byte order", lineno)
        if flag not in (0, 1):
            raise HeaderParseError(f"byte order must be 0 or 1, got {flag}", lineno)
        byte_order = "big" if flag == 1 else "little"

    offset = 0
    if "header offset" in raw:
        offset = _as_int(raw["header offset"][1], "header offset", raw["header offset"][0])

    wavelengths = None
    if "wavelength" in raw:
        lineno, value = raw["wavelength"]
        try:
            wavelengths = tuple(float(v) for v in _brace_items(value))
        except ValueError:
            raise HeaderParseError("non-numeric wavelength entry", lineno) from None
        if len(wavelengths) != dims["bands"]:
            raise ConsistencyError(
                f"wavelength list has {len(wavelengths)} entries "
                f"but bands = {dims['bands']}"
            )

    units = raw["wavelength units"][1] if "wavelength units" in raw else None

    return EnviHeader(
        samples=dims["samples"],
        lines=dims["lines"],
        bands=dims["bands"],
        interleave=interleave,
        data_type=DATA_TYPES[code],
        byte_order=byte_order,
        header_offset=offset,
        wavelengths=wavelengths,
        wavelength_units=units,
        extra=extra,
    )


def format_header(header: EnviHeader) -> str:
    """Render a header as ENVI text. ``parse_header(format_header(h)) == h``."""
    out = [
        "ENVI",
        f"samples = {header.samples}",
        f"lines = {header.lines}",
        f"bands = {header.bands}",
        f"header offset = {header.header_offset}",
        "file type = ENVI Standard",
        f"data type = {DATA_TYPE_CODES[header.data_type]}",
        f"interleave = {header.interleave}",
        f"byte order = {1 if header.byte_order == 'big' else 0}",
    ]
    if header.wavelength_units:
        out.append(f"wavelength units = {header.wavelength_units}")
    if header.wavelengths is not None:
        # repr() round-trips float64 exactly
        body = ",\n ".join(repr(float(w)) for w in header.wavelengths)
        out.append("wavelength = {\n " + body + "}")
    for key, value in header.extra.items():
        if key in ("file type",):
            continue
        if isinstance(value, list):
            out.append(f"{key} = {{{', '.join(value)}}}")
        elif key == "description":
            out.append(f"{key} = {{{value}}}")
        else:
            out.append(f"{key} = {value}")
    return "\n".join(out) + "\n"


def read_cube(header: EnviHeader, raw: bytes) -> HyperCube:
    """Decode a raw payload into a cube addressed (row, col, band).

    float32 payloads stay float32 (bit-exact); every other type is promoted
    to float64.
    """
    expected = header.header_offset + header.payload_bytes
    if len(raw) < expected:
        raise SizeMismatchError(expected, len(raw))

    count = header.samples * header.lines * header.bands
    flat = np.frombuffer(raw, dtype=header.dtype, count=count, offset=header.header_offset)
    rows, cols, bands = header.lines, header.samples, header.bands
    if header.interleave == "bsq":
        data = flat.reshape(bands, rows, cols).transpose(1, 2, 0)
    elif header.interleave == "bil":
        data = flat.reshape(rows, bands, cols).transpose(0, 2, 1)
    else:
        data = flat.reshape(rows, cols, bands)

    target = np.float32 if header.data_type == "float32" else np.float64
    data = np.ascontiguousarray(data, dtype=np.dtype(target))
    return HyperCube(data, wavelengths=header.wavelengths)


def _check_representable(values: np.ndarray, data_type: str) -> None:
    dt = np.dtype(data_type)
    if dt.kind in "iu":
        info = np.iinfo(dt)
        if values.size and (values.min() < info.min or values.max() > info.max):
            raise ValueError(f"cube values overflow {data_type}")
        if not np.all(np.equal(np.mod(values, 1), 0)):
            raise ValueError(f"cube values are not integral; cannot store as {data_type}")
    elif dt == np.float32:
        if values.size and np.abs(values).max() > np.finfo(np.float32).max:
            raise ValueError("cube values overflow float32")


def write_cube(
    cube: HyperCube,
    interleave: str = "bsq",
    data_type: str = "float32",
    byte_order: str = "little",
) -> tuple[str, bytes]:
    """Serialize a cube to (header text, payload bytes)."""
    interleave = interleave.lower()
    if interleave not in INTERLEAVES:
        raise HeaderParseError(f"unknown interleave {interleave!r}")
    if data_type not in DATA_TYPE_CODES:
        raise UnsupportedFormatError(f"unsupported data type {data_type!r}")
    _check_representable(cube.data, data_type)

    header = EnviHeader(
        samples=cube.cols,
        lines=cube.rows,
        bands=cube.bands,
        interleave=interleave,
        data_type=data_type,
        byte_order=byte_order,
        wavelengths=cube.wavelengths,
        wavelength_units="Nanometers" if cube.wavelengths is not None else None,
    )
    data = cube.data
    if interleave == "bsq":
        data = data.transpose(2, 0, 1)
    elif interleave == "bil":
        data = data.transpose(0, 2, 1)
    payload = np.ascontiguousarray(data, dtype=header.dtype).tobytes()
    return format_header(header), payload


def _raw_path(hdr_path: Path) -> Path:
    stem = hdr_path.with_suffix("")
    for candidate in (stem, stem.with_suffix(".raw"), stem.with_suffix(".img"), stem.with_suffix(".dat")):
        if candidate.is_file():
            return candidate
    raise FileNotFoundError(f"no raw payload found next to {hdr_path}")


def load(path: str | Path) -> tuple[EnviHeader, HyperCube]:
    """Load an ENVI pair given either the ``.hdr`` or the payload path."""
    path = Path(path)
    if path.suffix.lower() == ".hdr":
        hdr_path = path
        raw_path = _raw_path(path)
    else:
        hdr_path = path.with_suffix(".hdr")
        if not hdr_path.is_file():
            hdr_path = Path(str(path) + ".hdr")
        raw_path = path
    header = parse_header(hdr_path.read_text())
    return header, read_cube(header, raw_path.read_bytes())


def save(
    path: str | Path,
    cube: HyperCube,
    interleave: str = "bsq",
    data_type: str = "float32",
) -> tuple[Path, Path]:
    """Write ``<path>.hdr`` and ``<path>.raw``; returns both paths."""
    base = Path(path)
    if base.suffix.lower() in (".hdr", ".raw"):
        base = base.with_suffix("")
    text, payload = write_cube(cube, interleave, data_type)
    hdr_path = base.with_suffix(".hdr")
    raw_path = base.with_suffix(".raw")
    hdr_path.write_text(text)
    raw_path.write_bytes(payload)
    return hdr_path, raw_path
