"""Label maps, per-cluster spectra, rendered maps, CSV spectra and the JSON report."""
from __future__ import annotations

import csv
import io
import json
from typing import Sequence

import numpy as np

from .cube import SpectralSignature
from .netpbm import encode_ppm

# label 0 (paper) is white; ink labels 1..12 use the Okabe-Ito set followed
# by four Tol "muted" colours
DEFAULT_PALETTE: tuple[tuple[int, int, int], ...] = (
    (255, 255, 255),
    (0, 114, 178),
    (230, 159, 0),
    (0, 158, 115),
    (213, 94, 0),
    (86, 180, 233),
    (204, 121, 167),
    (240, 228, 66),
    (0, 0, 0),
    (136, 34, 85),
    (68, 170, 153),
    (153, 153, 51),
    (136, 204, 238),
)


class LabelMapError(ValueError):
    pass


def palette_for(k: int) -> list[tuple[int, int, int]]:
    """Default palette extended by cycling the ink colours when k > 12."""
    inks = DEFAULT_PALETTE[1:]
    return [DEFAULT_PALETTE[0]] + [inks[i % len(inks)] for i in range(k)]


def build_label_map(mask: np.ndarray, coords, labels) -> np.ndarray:
    """Label image: 0 for non-ink, ``label + 1`` at each ink coordinate."""
    mask = np.asarray(mask, dtype=bool)
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if len(coords) != len(labels):
        raise LabelMapError(f"{len(coords)} coordinates but {len(labels)} labels")
    out = np.zeros(mask.shape, dtype=np.int32)
    if len(coords) == 0:
        return out
    r, c = coords[:, 0], coords[:, 1]
    inside = (r >= 0) & (r < mask.shape[0]) & (c >= 0) & (c < mask.shape[1])
    if not inside.all() or not mask[r, c].all():
        raise LabelMapError("labeled coordinate outside the ink mask")
    if labels.min() < 0:
        raise LabelMapError("labels must be non-negative")
    out[r, c] = labels + 1
    return out


def cluster_mean_spectra(samples, labels, k: int, wavelengths=None) -> list[SpectralSignature | None]:
    """Mean spectrum per cluster; ``None`` marks an empty cluster."""
    X = np.asarray(getattr(samples, "values", samples), dtype=np.float64)
    labels = np.asarray(labels)
    out = []
    for j in range(k):
        members = X[labels == j]
        out.append(SpectralSignature(members.mean(axis=0), wavelengths) if len(members) else None)
    return out


def render_label_map(label_map: np.ndarray, palette: Sequence[Sequence[int]] = DEFAULT_PALETTE) -> bytes:
    label_map = np.asarray(label_map)
    pal = np.asarray(palette, dtype=np.uint8).reshape(-1, 3)
    top = int(label_map.max(initial=0))
    if len(pal) < top + 1:
        raise ValueError(f"palette has {len(pal)} colours but the map uses label {top}")
    return encode_ppm(pal[label_map])


def spectra_csv(columns: dict[str, Sequence[float] | None], wavelengths=None, bands: int | None = None) -> str:
    """CSV with a wavelength (or band index) column then one column per series.

    Absent series (None) are written as empty cells.
    """
    if bands is None:
        bands = len(wavelengths) if wavelengths is not None else len(next(v for v in columns.values() if v is not None))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["wavelength_nm" if wavelengths is not None else "band", *columns])
    for b in range(bands):
        first = repr(float(wavelengths[b])) if wavelengths is not None else b
        writer.writerow([first, *("" if v is None else repr(float(v[b])) for v in columns.values())])
    return buf.getvalue()


def _floats(values) -> list[float]:
    return [float(v) for v in np.asarray(values, dtype=np.float64).ravel()]


def export_report(
    metadata: dict,
    lines: Sequence = (),
    line_spectra: Sequence[SpectralSignature] = (),
    clustering: dict | None = None,
    silhouette_table: dict[int, float] | None = None,
    label_map_file: str | None = None,
) -> str:
    """Assemble the run report as a JSON string with a fixed key order.

    ``metadata`` supplies ``status``, ``header``, ``config``, ``crop`` and
    ``ink_pixels``; ``clustering`` the algorithm output summary.
    """
    line_records = []
    for region, sig in zip(lines, line_spectra):
        rec = region.to_record() if hasattr(region, "to_record") else dict(region)
        rec["mean_spectrum"] = _floats(sig.values)
        line_records.append(rec)

    cluster_block = None
    if clustering is not None:
        cluster_block = {
            "algorithm": clustering["algorithm"],
            "params": clustering.get("params", {}),
            "k": int(clustering["k"]),
            "k_selection": clustering.get("k_selection", "fixed"),
            "objective": float(clustering["objective"]),
            "iterations": int(clustering.get("iterations", 0)),
            "converged": bool(clustering.get("converged", True)),
            "objective_trace": _floats(clustering.get("objective_trace", [])),
            "cluster_sizes": [int(v) for v in clustering.get("cluster_sizes", [])],
            "cluster_spectra": [
                None if s is None else _floats(s.values) for s in clustering.get("cluster_spectra", [])
            ],
            "silhouette_table": {str(k): float(v) for k, v in sorted((silhouette_table or {}).items())},
        }

    doc = {
        "format": "inkcount-report",
        "version": 1,
        "status": metadata.get("status", "ok"),
        "header": metadata.get("header"),
        "config": metadata.get("config", {}),
        "crop": metadata.get("crop"),
        "ink_pixels": int(metadata.get("ink_pixels", 0)),
        "lines": line_records,
        "clustering": cluster_block,
        "label_map_file": label_map_file,
    }
    return json.dumps(doc, indent=2) + "\n"


def header_record(header) -> dict:
    """JSON echo of an EnviHeader (or None)."""
    if header is None:
        return None
    rec = {
        "samples": header.samples,
        "lines": header.lines,
        "bands": header.bands,
        "interleave": header.interleave,
        "data_type": header.data_type,
        "byte_order": header.byte_order,
        "header_offset": header.header_offset,
        "wavelength_units": header.wavelength_units,
        "wavelengths": None if header.wavelengths is None else _floats(header.wavelengths),
    }
    return rec


_number_list = {"type": "array", "items": {"type": "number"}}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format", "version", "status", "header", "config", "crop", "ink_pixels",
                 "lines", "clustering", "label_map_file"],
    "properties": {
        "format": {"const": "inkcount-report"},
        "version": {"const": 1},
        "status": {"enum": ["ok", "no_ink"]},
        "header": {
            "type": ["object", "null"],
            "required": ["samples", "lines", "bands", "interleave", "data_type"],
            "properties": {
                "samples": {"type": "integer", "minimum": 1},
                "lines": {"type": "integer", "minimum": 1},
                "bands": {"type": "integer", "minimum": 1},
                "interleave": {"enum": ["bsq", "bil", "bip"]},
                "data_type": {"type": "string"},
                "wavelengths": {"anyOf": [_number_list, {"type": "null"}]},
            },
        },
        "config": {"type": "object"},
        "crop": {
            "type": ["object", "null"],
            "required": ["top", "left", "height", "width"],
        },
        "ink_pixels": {"type": "integer", "minimum": 0},
        "lines": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "row_start", "row_end", "ink_pixels", "mean_spectrum"],
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "row_start": {"type": "integer", "minimum": 0},
                    "row_end": {"type": "integer", "minimum": 1},
                    "ink_pixels": {"type": "integer", "minimum": 0},
                    "mean_spectrum": _number_list,
                },
            },
        },
        "clustering": {
            "type": ["object", "null"],
            "required": ["algorithm", "params", "k", "objective", "cluster_sizes",
                         "cluster_spectra", "silhouette_table"],
            "properties": {
                "algorithm": {"enum": ["kmeans", "fcm", "agglomerative"]},
                "k": {"type": "integer", "minimum": 1},
                "objective": {"type": "number", "minimum": 0},
                "objective_trace": _number_list,
                "cluster_sizes": {"type": "array", "items": {"type": "integer"}},
                "cluster_spectra": {"type": "array", "items": {"anyOf": [_number_list, {"type": "null"}]}},
                "silhouette_table": {"type": "object", "additionalProperties": {"type": "number"}},
            },
        },
        "label_map_file": {"type": ["string", "null"]},
    },
}
