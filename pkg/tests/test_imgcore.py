import math
from fractions import Fraction

import numpy as np
import pytest

from srprune import imgcore
from srprune.errors import ContractError, ImageIOError

import oracles


def test_conv2d_matches_naive_same_padding(rng):
    img = rng.uniform(0, 1, (7, 9, 3))
    kernel = rng.normal(0, 1, (4, 3, 3, 3))
    bias = rng.normal(0, 1, 4)
    got = imgcore.conv2d(img, kernel, bias=bias, padding="same")
    want = oracles.conv2d_naive(img, kernel, bias=bias, padding="same")
    assert np.max(np.abs(got - want)) < 1e-12


def test_conv2d_matches_naive_valid_padding(rng):
    img = rng.uniform(0, 1, (8, 8))
    kernel = rng.normal(0, 1, (3, 3))
    got = imgcore.conv2d(img, kernel, padding="valid")
    want = oracles.conv2d_naive(img, kernel, padding="valid")
    assert got.shape == (6, 6)
    assert np.max(np.abs(got - want)) < 1e-12


def test_conv2d_rejects_bad_padding(rng):
    with pytest.raises(ContractError):
        imgcore.conv2d(rng.uniform(0, 1, (5, 5)), np.ones((3, 3)), padding="wrap")


def test_resample_spec_accepts_fractions_and_floats():
    assert imgcore.ResampleSpec(Fraction(1, 2)).scale == Fraction(1, 2)
    assert imgcore.ResampleSpec(0.5).scale == Fraction(1, 2)
    assert imgcore.ResampleSpec(2).scale == Fraction(2)
    with pytest.raises(ContractError):
        imgcore.ResampleSpec(0)
    with pytest.raises(ContractError):
        imgcore.ResampleSpec(-2)


@pytest.mark.parametrize("antialias", [True, False])
@pytest.mark.parametrize("num,den", [(1, 2), (1, 3), (2, 1), (3, 1), (3, 2)])
def test_bicubic_matches_naive(rng, num, den, antialias):
    img = rng.uniform(0, 1, (12, 6))
    spec = imgcore.ResampleSpec(Fraction(num, den), antialias=antialias)
    got = imgcore.bicubic_resize(img, spec)
    want = oracles.bicubic_naive(img, num, den, antialias)
    assert got.shape == want.shape
    assert np.max(np.abs(got - want)) < 1e-9


def test_bicubic_constant_image_is_preserved():
    img = np.full((8, 8), 0.37)
    for scale in (Fraction(1, 2), Fraction(2), Fraction(3)):
        out = imgcore.bicubic_resize(img, imgcore.ResampleSpec(scale))
        assert np.max(np.abs(out - 0.37)) < 1e-12


def test_bicubic_output_range_clamped(rng):
    img = rng.uniform(0, 1, (10, 10))
    out = imgcore.bicubic_resize(img, imgcore.ResampleSpec(Fraction(3)))
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_bicubic_color_matches_per_channel(rng):
    img = rng.uniform(0, 1, (8, 8, 3))
    spec = imgcore.ResampleSpec(Fraction(1, 2))
    got = imgcore.bicubic_resize(img, spec)
    for c in range(3):
        ref = imgcore.bicubic_resize(img[:, :, c], spec)
        assert np.max(np.abs(got[:, :, c] - ref)) < 1e-12


def test_rgb_to_y_known_values():
    # BT.601 studio swing: black -> 16/255, white -> 235/255.
    black = np.zeros((2, 2, 3))
    white = np.ones((2, 2, 3))
    assert np.allclose(imgcore.rgb_to_y(black), 16.0 / 255.0)
    assert np.allclose(imgcore.rgb_to_y(white), 235.0 / 255.0)


def test_rgb_to_y_rejects_grayscale():
    with pytest.raises(ContractError):
        imgcore.rgb_to_y(np.zeros((4, 4)))


def test_sobel_matches_naive(rng):
    img = rng.uniform(0, 1, (9, 7))
    assert abs(imgcore.sobel_magnitude(img) - oracles.sobel_naive(img)) < 1e-12


def test_sobel_zero_on_flat_image():
    assert imgcore.sobel_magnitude(np.full((6, 6), 0.5)) == 0.0


def test_mse_and_psnr_match_naive(rng):
    a = rng.uniform(0, 1, (11, 13))
    b = rng.uniform(0, 1, (11, 13))
    assert abs(imgcore.mse(a, b) - oracles.mse_naive(a, b)) < 1e-14
    for border in (0, 2):
        assert abs(
            imgcore.psnr(a, b, border_crop=border) - oracles.psnr_naive(a, b, border)
        ) < 1e-12


def test_psnr_identical_images_is_infinite(rng):
    a = rng.uniform(0, 1, (8, 8))
    assert math.isinf(imgcore.psnr(a, a))


def test_psnr_rejects_excessive_border(rng):
    a = rng.uniform(0, 1, (8, 8))
    with pytest.raises(ContractError):
        imgcore.psnr(a, a, border_crop=4)


def test_ssim_matches_naive(rng):
    a = rng.uniform(0, 1, (15, 14))
    b = np.clip(a + rng.normal(0, 0.05, a.shape), 0, 1)
    assert abs(imgcore.ssim(a, b) - oracles.ssim_naive(a, b, 0)) < 1e-10
    assert abs(imgcore.ssim(a, b, border_crop=1) - oracles.ssim_naive(a, b, 1)) < 1e-10


def test_ssim_identical_images_is_one(rng):
    a = rng.uniform(0, 1, (13, 13))
    assert abs(imgcore.ssim(a, a) - 1.0) < 1e-12


def test_ssim_rejects_windows_larger_than_image(rng):
    with pytest.raises(ContractError):
        imgcore.ssim(np.zeros((8, 8)), np.zeros((8, 8)))


def test_quantize_snaps_to_eight_bit_grid(rng):
    img = rng.uniform(0, 1, (6, 6))
    q = imgcore.quantize(img)
    assert np.max(np.abs(q * 255.0 - np.round(q * 255.0))) < 1e-12
    assert np.array_equal(imgcore.quantize(q), q)


def test_png_roundtrip_rgb_and_gray(tmp_path, rng):
    for shape in ((9, 7, 3), (9, 7)):
        img = imgcore.quantize(rng.uniform(0, 1, shape))
        path = tmp_path / f"t{len(shape)}.png"
        imgcore.save_png(path, img)
        back = imgcore.load_png(path)
        assert back.shape == img.shape
        assert np.array_equal(back, img)


def test_load_png_rejects_non_png(tmp_path):
    bad = tmp_path / "x.png"
    bad.write_bytes(b"not a png at all")
    with pytest.raises(ImageIOError) as ei:
        imgcore.load_png(bad)
    assert "x.png" in str(ei.value)


def test_load_png_missing_file(tmp_path):
    with pytest.raises(ImageIOError):
        imgcore.load_png(tmp_path / "missing.png")
