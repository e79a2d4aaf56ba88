import math

import numpy as np
import pytest

from vesselforge import compositor
from oracles import dense_gaussian_matte


class TestMakeMatte:
    def test_all_zero_guard(self):
        m = np.zeros((16, 16), np.uint8)
        assert np.array_equal(compositor.make_matte(m, 1.5), np.zeros((16, 16)))

    def test_all_one_constant(self):
        m = np.ones((16, 16), np.uint8)
        assert np.allclose(compositor.make_matte(m, 1.5), 1.0)

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            compositor.make_matte(np.ones((4, 4), np.uint8), 0.0)
        with pytest.raises(ValueError):
            compositor.make_matte(np.ones((4, 4), np.uint8), -1.0)

    def test_centered_square_matches_dense_oracle(self):
        m = np.zeros((64, 64), np.uint8)
        m[22:42, 22:42] = 1
        assert np.allclose(compositor.make_matte(m, 1.5), dense_gaussian_matte(m, 1.5), atol=1e-6)

    def test_random_masks_match_dense_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            m = (rng.random((32, 32)) < 0.15).astype(np.uint8)
            sigma = float(rng.uniform(1.0, 2.0))
            assert np.allclose(
                compositor.make_matte(m, sigma), dense_gaussian_matte(m, sigma), atol=1e-6
            )

    def test_range(self):
        rng = np.random.default_rng(22)
        m = (rng.random((32, 32)) < 0.3).astype(np.uint8)
        a = compositor.make_matte(m, 1.2)
        assert a.min() >= 0.0 and a.max() <= 1.0

    def test_far_field_exact_zero(self):
        sigma = 1.5
        radius = math.ceil(4 * sigma)
        m = np.zeros((48, 48), np.uint8)
        m[5, 5] = 1
        a = compositor.make_matte(m, sigma)
        # pixels farther than the kernel radius (Chebyshev) from the single
        # on-pixel receive no kernel mass at all
        yy, xx = np.mgrid[0:48, 0:48]
        far = np.maximum(np.abs(yy - 5), np.abs(xx - 5)) > radius + 1
        assert np.all(a[far] == 0.0)

    def test_interior_saturation(self):
        # deep inside a thick bar, the pre-normalization blur is ~1
        sigma = 1.0
        m = np.zeros((40, 40), np.uint8)
        m[5:35, 5:35] = 1
        a = compositor.make_matte(m, sigma)
        r = math.ceil(4 * sigma) + 1
        assert np.all(a[5 + r : 35 - r, 5 + r : 35 - r] >= 1 - 1e-3)


class TestBlend:
    def tiles(self, f, b, shape=(8, 8, 3)):
        return np.full(shape, f, np.uint8), np.full(shape, b, np.uint8)

    def test_matte_one_gives_foreground(self):
        fg, bg = self.tiles(200, 100)
        out = compositor.blend(np.ones((8, 8)), fg, bg)
        assert np.array_equal(out, fg)

    def test_matte_zero_gives_background(self):
        fg, bg = self.tiles(200, 100)
        out = compositor.blend(np.zeros((8, 8)), fg, bg)
        assert np.array_equal(out, bg)

    def test_half_matte_constant_tiles(self):
        fg, bg = self.tiles(200, 100)
        out = compositor.blend(np.full((8, 8), 0.5), fg, bg)
        assert np.all(out == 150)

    def test_affine_in_matte_for_constant_tiles(self):
        fg, bg = self.tiles(200, 100)
        for a in np.linspace(0, 1, 11):
            out = compositor.blend(np.full((8, 8), a), fg, bg)
            assert np.all(out == math.floor(a * 200 + (1 - a) * 100 + 0.5))

    def test_grayscale_tiles(self):
        fg = np.full((8, 8), 40, np.uint8)
        bg = np.full((8, 8), 10, np.uint8)
        out = compositor.blend(np.full((8, 8), 0.5), fg, bg)
        assert out.shape == (8, 8)
        assert np.all(out == 25)

    def test_dimension_mismatch(self):
        fg, bg = self.tiles(10, 20)
        with pytest.raises(ValueError):
            compositor.blend(np.ones((4, 4)), fg, bg)
        with pytest.raises(ValueError):
            compositor.blend(np.ones((8, 8)), fg, bg[:, :, :1])

    def test_output_range(self):
        rng = np.random.default_rng(23)
        a = rng.random((8, 8))
        fg = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        bg = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        out = compositor.blend(a, fg, bg)
        assert out.dtype == np.uint8
