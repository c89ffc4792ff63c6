import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bicolorsketch.raster import (
    CANVAS_SIZE,
    SHADING_SCALE,
    GrayImage,
    InvalidArgumentError,
    RasterImage,
    RepresentationStack,
    gray_to_png_bytes,
    load_gray_png,
    load_mask_png,
    load_rgb_png,
    load_shading_png,
    pointwise_product,
    resample,
    resample_gray,
    rgb_to_png_bytes,
    sample_bilinear,
    shading_to_png_bytes,
)


def test_canvas_constant():
    assert CANVAS_SIZE == 512


class TestContainers:
    def test_raster_rejects_bad_shape(self):
        with pytest.raises(InvalidArgumentError):
            RasterImage(np.zeros((4, 4)))
        with pytest.raises(InvalidArgumentError):
            RasterImage(np.zeros((4, 4, 4)))

    def test_raster_rejects_nonfinite(self):
        bad = np.zeros((2, 2, 3))
        bad[0, 0, 0] = np.nan
        with pytest.raises(InvalidArgumentError):
            RasterImage(bad)
        bad[0, 0, 0] = np.inf
        with pytest.raises(InvalidArgumentError):
            RasterImage(bad)

    def test_raster_rejects_empty(self):
        with pytest.raises(InvalidArgumentError):
            RasterImage(np.zeros((0, 4, 3)))

    def test_gray_binary_predicate(self):
        assert GrayImage(np.array([[0.0, 1.0]])).is_binary()
        assert not GrayImage(np.array([[0.0, 0.5]])).is_binary()

    def test_full_constructors(self):
        img = RasterImage.full(3, 2, (0.1, 0.2, 0.3))
        assert img.shape == (2, 3, 3)
        assert np.allclose(img.data[1, 2], (0.1, 0.2, 0.3))
        g = GrayImage.full(4, 5, 0.7)
        assert g.shape == (5, 4)
        assert g.data.max() == 0.7

    def test_stack_requires_null_outside_coverage(self):
        contour = GrayImage.zeros(4, 4)
        cov = GrayImage.zeros(4, 4)
        color = np.zeros((4, 4, 3))
        color[1, 1] = 0.5  # colored pixel not covered
        with pytest.raises(InvalidArgumentError):
            RepresentationStack(contour, RasterImage(color), cov)
        cov2 = cov.data.copy()
        cov2[1, 1] = 1.0
        RepresentationStack(contour, RasterImage(color), GrayImage(cov2))  # now fine

    def test_stack_requires_matching_dims(self):
        with pytest.raises(InvalidArgumentError):
            RepresentationStack(
                GrayImage.zeros(4, 4), RasterImage(np.zeros((4, 4, 3))), GrayImage.zeros(5, 4)
            )


class TestResample:
    def test_constant_stays_constant(self):
        out = resample(RasterImage.full(2, 2, (0.5, 0.5, 0.5)), 4, 4)
        assert np.all(out.data == 0.5)

    def test_identity_at_same_size(self):
        rng = np.random.default_rng(0)
        img = RasterImage(rng.random((5, 7, 3)))
        out = resample(img, 7, 5)
        assert np.array_equal(out.data, img.data)
        assert out.data is not img.data

    def test_1x2_to_1x3_midpoint(self):
        img = RasterImage(np.array([[[0, 0, 0], [1, 1, 1]]], dtype=float))
        out = resample(img, 3, 1)
        assert np.allclose(out.data[0, 1], 0.5)

    def test_zero_dims_rejected(self):
        img = RasterImage.full(2, 2)
        with pytest.raises(InvalidArgumentError):
            resample(img, 0, 4)
        with pytest.raises(InvalidArgumentError):
            resample_gray(GrayImage.zeros(2, 2), 2, 0)

    @settings(max_examples=25, deadline=None)
    @given(
        w=st.integers(1, 9), h=st.integers(1, 9),
        nw=st.integers(1, 17), nh=st.integers(1, 17),
        seed=st.integers(0, 1000),
    )
    def test_bounds_preserved(self, w, h, nw, nh, seed):
        rng = np.random.default_rng(seed)
        img = RasterImage(rng.random((h, w, 3)))
        out = resample(img, nw, nh)
        assert out.shape == (nh, nw, 3)
        assert out.data.min() >= img.data.min() - 1e-12
        assert out.data.max() <= img.data.max() + 1e-12


class TestPointwiseProduct:
    def test_identity_shading(self):
        rng = np.random.default_rng(1)
        img = RasterImage(rng.random((4, 6, 3)))
        out = pointwise_product(img, GrayImage.full(6, 4, 1.0))
        assert np.array_equal(out.data, img.data)

    def test_scalar_arithmetic(self):
        out = pointwise_product(RasterImage.full(2, 2, (0.5, 0.5, 0.5)), GrayImage.full(2, 2, 2.0))
        assert np.all(out.data == 1.0)

    def test_dim_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            pointwise_product(RasterImage.full(2, 2), GrayImage.zeros(3, 2))


def test_sample_bilinear_center_and_clamp():
    data = np.zeros((2, 2, 1))
    data[:, 1] = 1.0
    mid = sample_bilinear(data, np.array([0.5]), np.array([0.5]))
    assert np.allclose(mid, 0.5)
    out = sample_bilinear(data, np.array([-5.0]), np.array([9.0]))
    assert np.allclose(out, 0.0)  # clamps to (0, 1) corner


class TestPngIO:
    def test_rgb_round_trip_8bit(self):
        rng = np.random.default_rng(2)
        img = RasterImage(np.floor(rng.random((6, 5, 3)) * 256) / 255.0)
        # values quantize exactly when already on the 8-bit grid
        img = RasterImage(np.clip(img.data, 0, 1))
        back = load_rgb_png(rgb_to_png_bytes(img))
        assert np.abs(back.data - img.data).max() <= 0.5 / 255

    def test_gray_round_trip(self):
        g = GrayImage(np.linspace(0, 1, 16).reshape(4, 4))
        back = load_gray_png(gray_to_png_bytes(g))
        assert np.abs(back.data - g.data).max() <= 0.5 / 255

    def test_mask_binarizes(self):
        g = GrayImage(np.array([[0.0, 0.3, 0.6, 1.0]]))
        back = load_mask_png(gray_to_png_bytes(g))
        assert back.is_binary()
        assert np.array_equal(back.data, [[0.0, 0.0, 1.0, 1.0]])

    def test_shading_16bit_range_and_precision(self):
        # shading values above 1 must survive the file boundary
        s = GrayImage(np.array([[0.0, 0.5, 1.0, 4.0, 15.9]]))
        back = load_shading_png(shading_to_png_bytes(s))
        assert np.abs(back.data - s.data).max() <= 0.5 / SHADING_SCALE

    def test_shading_loader_rejects_8bit(self):
        g = GrayImage.full(2, 2, 0.5)
        with pytest.raises(InvalidArgumentError):
            load_shading_png(gray_to_png_bytes(g))

    def test_undecodable_bytes(self):
        with pytest.raises(InvalidArgumentError):
            load_rgb_png(b"definitely not a png")
