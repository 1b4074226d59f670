import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inkcount import envi
from inkcount.cube import HyperCube

REFERENCE_WL = np.linspace(478.7825462, 900.9723394, 149)


def reference_header_text():
    wl = ",\n  ".join(repr(float(w)) for w in REFERENCE_WL)
    return (
        "ENVI\n"
        "description = {handwritten page, 149 bands}\n"
        "samples = 512\n"
        "lines   = 650\n"
        "bands   = 149\n"
        "header offset = 0\n"
        "file type = ENVI Standard\n"
        "data type = 4\n"
        "interleave = bsq\n"
        "byte order = 0\n"
        "wavelength units = Nanometers\n"
        f"wavelength = {{\n  {wl}}}\n"
    )


MINIMAL = "samples = 1\nlines = 1\nbands = 1\ndata type = 4\ninterleave = bsq\n"


class TestParseHeader:
    def test_reference_fields(self):
        h = envi.parse_header(reference_header_text())
        assert (h.samples, h.lines, h.bands) == (512, 650, 149)
        assert h.interleave == "bsq"
        assert h.data_type == "float32"
        assert h.wavelengths[0] == 478.7825462
        assert h.wavelengths[148] == 900.9723394
        assert h.extra["file type"] == "ENVI Standard"
        assert h.extra["description"].startswith("handwritten page")

    def test_minimal(self):
        h = envi.parse_header(MINIMAL)
        assert (h.samples, h.lines, h.bands) == (1, 1, 1)
        assert h.wavelengths is None
        assert h.byte_order == "little"
        assert h.header_offset == 0

    def test_keys_case_and_space_insensitive(self):
        h = envi.parse_header("SAMPLES = 2\nLines=3\nBands = 1\nData  Type = 12\nInterleave = BIL\nByte Order = 1\n")
        assert (h.samples, h.lines, h.data_type, h.interleave, h.byte_order) == (2, 3, "uint16", "bil", "big")

    def test_unknown_interleave(self):
        with pytest.raises(envi.HeaderParseError, match="unknown interleave"):
            envi.parse_header(MINIMAL.replace("bsq", "xyz"))

    @pytest.mark.parametrize("key", envi.REQUIRED_KEYS)
    def test_missing_required_key(self, key):
        text = "\n".join(line for line in MINIMAL.splitlines() if not line.startswith(key))
        with pytest.raises(envi.MissingKeyError) as err:
            envi.parse_header(text)
        assert err.value.key == key

    def test_non_numeric_dimension_reports_line(self):
        with pytest.raises(envi.HeaderParseError) as err:
            envi.parse_header("ENVI\nsamples = 1\nlines = many\nbands = 1\ndata type = 4\ninterleave = bsq\n")
        assert err.value.line == 3

    def test_wavelength_count_mismatch(self):
        with pytest.raises(envi.ConsistencyError):
            envi.parse_header(MINIMAL.replace("bands = 1", "bands = 2") + "wavelength = {500, 600, 700}\n")

    def test_wavelengths_must_increase(self):
        with pytest.raises(envi.ConsistencyError):
            envi.parse_header(MINIMAL.replace("bands = 1", "bands = 2") + "wavelength = {600, 500}\n")

    def test_unsupported_data_type(self):
        with pytest.raises(envi.UnsupportedFormatError):
            envi.parse_header(MINIMAL.replace("data type = 4", "data type = 6"))

    def test_empty(self):
        with pytest.raises(envi.HeaderParseError):
            envi.parse_header("   \n")

    def test_unterminated_list(self):
        with pytest.raises(envi.HeaderParseError):
            envi.parse_header(MINIMAL + "wavelength = {500,\n")

    def test_format_round_trip(self):
        h = envi.parse_header(reference_header_text())
        assert envi.parse_header(envi.format_header(h)) == h


class TestReadCube:
    def test_single_element(self):
        h = envi.parse_header(MINIMAL)
        cube = envi.read_cube(h, struct.pack("<f", 0.5))
        assert cube.data[0, 0, 0] == 0.5

    def test_big_endian_and_offset(self):
        h = envi.parse_header(MINIMAL.replace("data type = 4", "data type = 2") + "byte order = 1\nheader offset = 3\n")
        cube = envi.read_cube(h, b"xyz" + struct.pack(">h", -1234))
        assert cube.data[0, 0, 0] == -1234.0
        assert cube.data.dtype == np.float64

    def test_too_short(self):
        h = envi.parse_header(MINIMAL.replace("bands = 1", "bands = 2"))
        with pytest.raises(envi.SizeMismatchError) as err:
            envi.read_cube(h, b"\0" * 5)
        assert (err.value.expected, err.value.actual) == (8, 5)

    def test_reference_payload_size(self):
        h = envi.parse_header(reference_header_text())
        assert h.payload_bytes == 512 * 650 * 149 * 4 == 198_348_800

    def test_hand_built_layouts_agree(self):
        # 2 lines x 2 samples x 3 bands, band b constant 10*(b+1); pixel
        # (r, c) adds r*2 + c so that misplaced elements would show
        rows, cols, bands = 2, 2, 3
        value = lambda r, c, b: 10.0 * (b + 1) + r * 2 + c  # noqa: E731
        layouts = {}
        n = rows * cols * bands
        for name in ("bsq", "bil", "bip"):
            flat = [0.0] * n
            for r in range(rows):
                for c in range(cols):
                    for b in range(bands):
                        if name == "bsq":
                            off = b * (rows * cols) + r * cols + c
                        elif name == "bil":
                            off = r * (bands * cols) + b * cols + c
                        else:
                            off = (r * cols + c) * bands + b
                        flat[off] = value(r, c, b)
            layouts[name] = struct.pack(f"<{n}f", *flat)
        cubes = {}
        for name, raw in layouts.items():
            h = envi.parse_header(f"samples = {cols}\nlines = {rows}\nbands = {bands}\ndata type = 4\ninterleave = {name}\n")
            cubes[name] = envi.read_cube(h, raw).data
        expected = np.array([[[value(r, c, b) for b in range(bands)] for c in range(cols)] for r in range(rows)])
        for data in cubes.values():
            np.testing.assert_array_equal(data, expected)


class TestWriteCube:
    def test_size_formula(self):
        cube = HyperCube(np.full((1, 1, 1), 0.5, dtype=np.float32))
        text, payload = envi.write_cube(cube, "bsq", "float32")
        assert payload == struct.pack("<f", 0.5)
        assert envi.parse_header(text).bands == 1

    @pytest.mark.parametrize("interleave", envi.INTERLEAVES)
    def test_random_round_trip(self, interleave):
        rng = np.random.default_rng(5)
        cube = HyperCube(rng.random((5, 7, 11), dtype=np.float32), wavelengths=tuple(np.linspace(400, 1000, 11)))
        text, payload = envi.write_cube(cube, interleave, "float32")
        back = envi.read_cube(envi.parse_header(text), payload)
        assert back.data.dtype == np.float32
        np.testing.assert_array_equal(back.data, cube.data)
        assert back.wavelengths == cube.wavelengths

    @pytest.mark.parametrize("dtype", ["uint8", "int16", "uint16", "float64"])
    def test_other_types_round_trip(self, dtype):
        rng = np.random.default_rng(1)
        values = rng.integers(0, 200, size=(3, 4, 2)).astype(np.float64)
        text, payload = envi.write_cube(HyperCube(values), "bil", dtype)
        np.testing.assert_array_equal(envi.read_cube(envi.parse_header(text), payload).data, values)

    def test_overflow_rejected(self):
        with pytest.raises(ValueError):
            envi.write_cube(HyperCube(np.full((1, 1, 1), 300.0)), "bsq", "uint8")

    def test_files(self, tmp_path):
        cube = HyperCube(np.arange(24, dtype=np.float32).reshape(2, 3, 4))
        hdr, raw = envi.save(tmp_path / "c", cube, "bip")
        assert raw.stat().st_size == 24 * 4
        for path in (hdr, raw):
            _, back = envi.load(path)
            np.testing.assert_array_equal(back.data, cube.data)


@given(
    rows=st.integers(1, 6), cols=st.integers(1, 6), bands=st.integers(1, 6),
    src=st.sampled_from(envi.INTERLEAVES), seed=st.integers(0, 2**32 - 1),
)
def test_payload_length_and_round_trip_property(rows, cols, bands, src, seed):
    data = np.random.default_rng(seed).standard_normal((rows, cols, bands)).astype(np.float32)
    text, payload = envi.write_cube(HyperCube(data), src, "float32")
    header = envi.parse_header(text)
    assert len(payload) == header.header_offset + rows * cols * bands * 4
    np.testing.assert_array_equal(envi.read_cube(header, payload).data, data)
