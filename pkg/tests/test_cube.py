import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inkcount.cube import (
    EmptySelectionError,
    HyperCube,
    crop,
    get_band,
    mean_spectrum,
    spectrum_at,
    to_grayscale,
)


def random_cube(seed, shape=(6, 5, 8)):
    return HyperCube(np.random.default_rng(seed).random(shape))


def test_cube_is_read_only():
    cube = random_cube(0)
    with pytest.raises(ValueError):
        cube.data[0, 0, 0] = 1.0


def test_cube_rejects_nan():
    data = np.ones((2, 2, 2))
    data[1, 1, 1] = np.nan
    with pytest.raises(ValueError):
        HyperCube(data)


class TestGetBand:
    def test_single_element(self):
        band = get_band(HyperCube(np.full((1, 1, 1), 0.5)), 0)
        np.testing.assert_array_equal(band.pixels, [[0.5]])

    def test_constant_fixture(self, band_constant_cube):
        band = get_band(band_constant_cube, 1)
        np.testing.assert_array_equal(band.pixels, np.full((2, 2), 20.0))
        assert band.wavelength == 600.0
        assert band.band_index == 1

    @pytest.mark.parametrize("index", [-1, 3])
    def test_out_of_range(self, band_constant_cube, index):
        with pytest.raises(IndexError):
            get_band(band_constant_cube, index)


class TestCrop:
    def test_identity(self):
        cube = random_cube(1)
        np.testing.assert_array_equal(crop(cube, 0, 0, cube.rows, cube.cols).data, cube.data)

    def test_single_pixel_matches_spectrum(self):
        cube = random_cube(2)
        np.testing.assert_array_equal(crop(cube, 3, 2, 1, 1).data[0, 0], spectrum_at(cube, 3, 2).values)

    @pytest.mark.parametrize("rect", [(0, 0, 7, 5), (5, 4, 2, 1), (-1, 0, 1, 1), (0, 0, 0, 1)])
    def test_bounds(self, rect):
        with pytest.raises(IndexError):
            crop(random_cube(3), *rect)

    @given(st.integers(0, 1000), st.data())
    def test_matches_direct_indexing(self, seed, data):
        cube = random_cube(seed)
        top = data.draw(st.integers(0, cube.rows - 1))
        left = data.draw(st.integers(0, cube.cols - 1))
        h = data.draw(st.integers(1, cube.rows - top))
        w = data.draw(st.integers(1, cube.cols - left))
        out = crop(cube, top, left, h, w)
        for r in range(h):
            for c in range(w):
                np.testing.assert_array_equal(out.data[r, c], cube.data[top + r, left + c])

    @given(st.data())
    def test_composes(self, data):
        cube = random_cube(4, (9, 8, 3))
        t1 = data.draw(st.integers(0, 8))
        l1 = data.draw(st.integers(0, 7))
        h1 = data.draw(st.integers(1, 9 - t1))
        w1 = data.draw(st.integers(1, 8 - l1))
        t2 = data.draw(st.integers(0, h1 - 1))
        l2 = data.draw(st.integers(0, w1 - 1))
        h2 = data.draw(st.integers(1, h1 - t2))
        w2 = data.draw(st.integers(1, w1 - l2))
        twice = crop(crop(cube, t1, l1, h1, w1), t2, l2, h2, w2)
        once = crop(cube, t1 + t2, l1 + l2, h2, w2)
        np.testing.assert_array_equal(twice.data, once.data)


class TestGrayscale:
    def test_constant_bands(self, band_constant_cube):
        np.testing.assert_array_equal(to_grayscale(band_constant_cube).pixels, np.full((2, 2), 20.0))

    def test_single_band(self):
        cube = random_cube(5, (4, 3, 1))
        np.testing.assert_array_equal(to_grayscale(cube).pixels, get_band(cube, 0).pixels)

    def test_summation_oracle(self):
        cube = random_cube(6, (4, 4, 8))
        gray = to_grayscale(cube).pixels
        for r in range(4):
            for c in range(4):
                total = 0.0
                for b in range(8):
                    total += float(cube.data[r, c, b])
                assert gray[r, c] == pytest.approx(total / 8, rel=1e-12)


class TestSpectra:
    def test_spectrum_at(self, band_constant_cube):
        np.testing.assert_array_equal(spectrum_at(band_constant_cube, 1, 0).values, [10, 20, 30])
        with pytest.raises(IndexError):
            spectrum_at(band_constant_cube, 2, 0)

    def test_singleton_mean(self):
        cube = random_cube(7)
        mask = np.zeros((6, 5), bool)
        mask[2, 3] = True
        np.testing.assert_array_equal(mean_spectrum(cube, mask).values, spectrum_at(cube, 2, 3).values)

    def test_constant_field(self, band_constant_cube):
        sig = mean_spectrum(band_constant_cube, np.ones((2, 2), bool))
        np.testing.assert_array_equal(sig.values, [10, 20, 30])
        assert sig.wavelengths == (500.0, 600.0, 700.0)

    def test_empty_mask(self, band_constant_cube):
        with pytest.raises(EmptySelectionError):
            mean_spectrum(band_constant_cube, np.zeros((2, 2), bool))

    @pytest.mark.parametrize("seed", range(5))
    def test_accumulate_divide_oracle(self, seed):
        rng = np.random.default_rng(seed)
        cube = random_cube(seed)
        mask = rng.random((6, 5)) < 0.4
        mask[0, 0] = True
        got = mean_spectrum(cube, mask).values
        for b in range(cube.bands):
            acc, count = 0.0, 0
            for r in range(6):
                for c in range(5):
                    if mask[r, c]:
                        acc += float(cube.data[r, c, b])
                        count += 1
            assert got[b] == pytest.approx(acc / count, rel=1e-12)

    def test_full_mask_equals_band_means(self):
        cube = random_cube(8)
        sig = mean_spectrum(cube, np.ones((6, 5), bool)).values
        per_band = [get_band(cube, b).pixels.mean() for b in range(cube.bands)]
        np.testing.assert_allclose(sig, per_band, rtol=1e-12)
