"""Deterministic numerical image kernels.

Images are plain NumPy float64 arrays in [0, 1]: shape (h, w) for a single
channel, (h, w, 3) for RGB.  All operations here are pure functions; nothing
holds shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from PIL import Image, UnidentifiedImageError

from .errors import ContractError, ImageIOError

__all__ = [
    "ResampleSpec",
    "rgb_to_y",
    "bicubic_resize",
    "conv2d",
    "sobel_magnitude",
    "mse",
    "psnr",
    "ssim",
    "load_png",
    "save_png",
    "quantize",
]

SOBEL_GX = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_GY = SOBEL_GX.T.copy()


def _check_image(img: np.ndarray, name: str = "img") -> np.ndarray:
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        pass
    elif a.ndim == 3 and a.shape[2] in (1, 3):
        pass
    else:
        raise ContractError(f"{name}: expected (h, w) or (h, w, 1|3), got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ContractError(f"{name}: empty image {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError(f"{name}: contains non-finite values")
    return a


def _as_fraction(scale) -> Fraction:
    if isinstance(scale, Fraction):
        return scale
    if isinstance(scale, int):
        return Fraction(scale)
    # A float like 1/3 is not exact; snap to the nearest small rational so
    # output dimensions like floor(480 * 1/3) come out as intended.
    return Fraction(scale).limit_denominator(10**6)


@dataclass(frozen=True)
class ResampleSpec:
    """Bicubic resampling parameters (Keys kernel, a = -0.5)."""

    scale: Fraction
    antialias: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scale", _as_fraction(self.scale))
        if self.scale <= 0:
            raise ContractError(f"scale must be positive, got {self.scale}")


def rgb_to_y(img: np.ndarray) -> np.ndarray:
    """ITU-R BT.601 luminance of an RGB image in [0, 1].

    Output lies in [16/255, 235/255] for inputs in [0, 1].
    """
    a = _check_image(img)
    if a.ndim != 3 or a.shape[2] != 3:
        raise ContractError(f"rgb_to_y expects 3 channels, got shape {a.shape}")
    return (65.481 * a[..., 0] + 128.553 * a[..., 1] + 24.966 * a[..., 2] + 16.0) / 255.0


def _cubic(x: np.ndarray) -> np.ndarray:
    # Keys cubic, a = -0.5 (the MATLAB imresize default).
    ax = np.abs(x)
    ax2 = ax * ax
    ax3 = ax2 * ax
    w = np.where(ax <= 1.0, 1.5 * ax3 - 2.5 * ax2 + 1.0, 0.0)
    w = np.where((ax > 1.0) & (ax <= 2.0), -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0, w)
    return w


def _resample_weights(in_len: int, out_len: int, scale: float, antialias: bool):
    """Per-output-pixel source indices and normalized kernel weights.

    Downscaling with antialias widens the kernel support by 1/scale and
    scales the kernel argument, the MATLAB-compatible convention.  Border
    handling is index clamping (edge replication).
    """
    if antialias and scale < 1.0:
        kernel = lambda x: scale * _cubic(scale * x)
        kwidth = 4.0 / scale
    else:
        kernel = _cubic
        kwidth = 4.0
    # Output sample x maps to source coordinate u (both 0-based, pixel centers).
    x = np.arange(out_len, dtype=np.float64)
    u = (x + 0.5) / scale - 0.5
    left = np.floor(u - kwidth / 2.0).astype(np.int64)
    taps = int(math.ceil(kwidth)) + 2
    idx = left[:, None] + np.arange(taps)[None, :]
    w = kernel(u[:, None] - idx)
    w /= w.sum(axis=1, keepdims=True)
    idx = np.clip(idx, 0, in_len - 1)
    return idx, w


def _resize_axis(a: np.ndarray, out_len: int, scale: float, antialias: bool) -> np.ndarray:
    idx, w = _resample_weights(a.shape[0], out_len, scale, antialias)
    # a[idx] has shape (out_len, taps, ...); contract taps against weights.
    return np.einsum("ot...,ot->o...", a[idx], w)


def bicubic_resize(img: np.ndarray, spec: ResampleSpec) -> np.ndarray:
    """Separable bicubic resampling (rows then columns), clamped to [0, 1]."""
    a = _check_image(img)
    scale = spec.scale
    if scale == 1:
        return np.clip(a, 0.0, 1.0)
    h, w = a.shape[:2]
    if scale < 1:
        out_h = int(h * scale)  # exact Fraction arithmetic, floor
        out_w = int(w * scale)
    else:
        out_h = int(h * scale)
        out_w = int(w * scale)
    if out_h < 1 or out_w < 1:
        raise ContractError(f"resize of {(h, w)} by {scale} yields empty output")
    s = float(scale)
    out = _resize_axis(a, out_h, s, spec.antialias)
    out = np.swapaxes(_resize_axis(np.swapaxes(out, 0, 1), out_w, s, spec.antialias), 0, 1)
    return np.clip(out, 0.0, 1.0)


def _to_3d(a: np.ndarray) -> np.ndarray:
    return a[:, :, None] if a.ndim == 2 else a


def conv2d(
    img: np.ndarray,
    kernel: np.ndarray,
    bias: np.ndarray | float | None = None,
    padding: str = "same",
) -> np.ndarray:
    """Cross-correlation with an odd-sized kernel.

    ``kernel`` is (out_ch, in_ch, kh, kw); a bare (kh, kw) array is treated
    as 1 -> 1 channels.  ``padding`` is "same" (edge replication) or "valid".
    A 2-D input with a single output channel yields a 2-D output.
    """
    a = _check_image(img, "conv2d input")
    squeeze = a.ndim == 2
    a3 = _to_3d(a)
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim == 2:
        k = k[None, None]
    if k.ndim != 4:
        raise ContractError(f"kernel must be (out, in, kh, kw), got shape {k.shape}")
    out_ch, in_ch, kh, kw = k.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ContractError(f"kernel dims must be odd, got {kh}x{kw}")
    if in_ch != a3.shape[2]:
        raise ContractError(f"kernel expects {in_ch} input channels, image has {a3.shape[2]}")
    if padding == "same":
        ph, pw = kh // 2, kw // 2
        a3 = np.pad(a3, ((ph, ph), (pw, pw), (0, 0)), mode="edge")
    elif padding != "valid":
        raise ContractError(f"unknown padding mode {padding!r}")
    if a3.shape[0] < kh or a3.shape[1] < kw:
        raise ContractError(f"image {a.shape[:2]} smaller than kernel {kh}x{kw} (valid padding)")
    win = sliding_window_view(a3, (kh, kw), axis=(0, 1))  # (H, W, in, kh, kw)
    out = np.tensordot(win, k, axes=([2, 3, 4], [1, 2, 3]))  # (H, W, out)
    if bias is not None:
        out = out + np.asarray(bias, dtype=np.float64)
    if squeeze and out_ch == 1:
        return out[:, :, 0]
    return out


def sobel_magnitude(img: np.ndarray) -> float:
    """Mean Sobel gradient magnitude of a single-channel image."""
    a = _check_image(img)
    if a.ndim != 2:
        raise ContractError(f"sobel_magnitude expects a single channel, got shape {a.shape}")
    gx = conv2d(a, SOBEL_GX, padding="same")
    gy = conv2d(a, SOBEL_GY, padding="same")
    return float(np.mean(np.sqrt(gx * gx + gy * gy)))


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared difference over all elements."""
    x = _check_image(a, "a")
    y = _check_image(b, "b")
    if x.shape != y.shape:
        raise ContractError(f"shape mismatch {x.shape} vs {y.shape}")
    d = x - y
    return float(np.mean(d * d))


def _crop_border(a: np.ndarray, border: int) -> np.ndarray:
    if border < 0:
        raise ContractError(f"border_crop must be >= 0, got {border}")
    if border == 0:
        return a
    if border >= min(a.shape[0], a.shape[1]) / 2:
        raise ContractError(f"border_crop {border} too large for image {a.shape[:2]}")
    return a[border:-border, border:-border]


def psnr(ref: np.ndarray, test: np.ndarray, border_crop: int = 0) -> float:
    """PSNR in dB on [0, 1] images; math.inf when the images match exactly."""
    r = _check_image(ref, "ref")
    t = _check_image(test, "test")
    if r.shape != t.shape:
        raise ContractError(f"shape mismatch {r.shape} vs {t.shape}")
    if r.ndim != 2:
        raise ContractError("psnr expects single-channel luminance images")
    err = mse(_crop_border(r, border_crop), _crop_border(t, border_crop))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = (size - 1) / 2.0
    g = np.exp(-((np.arange(size) - half) ** 2) / (2.0 * sigma * sigma))
    win = np.outer(g, g)
    return win / win.sum()

_SSIM_WINDOW = _gaussian_window()


def _filter_valid(a: np.ndarray, win: np.ndarray) -> np.ndarray:
    view = sliding_window_view(a, win.shape)
    return np.tensordot(view, win, axes=([2, 3], [0, 1]))


def ssim(ref: np.ndarray, test: np.ndarray, border_crop: int = 0) -> float:
    """Single-scale SSIM, 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03, L=1.

    Mean over valid window positions after cropping ``border_crop`` pixels.
    """
    r = _check_image(ref, "ref")
    t = _check_image(test, "test")
    if r.shape != t.shape:
        raise ContractError(f"shape mismatch {r.shape} vs {t.shape}")
    if r.ndim != 2:
        raise ContractError("ssim expects single-channel luminance images")
    r = _crop_border(r, border_crop)
    t = _crop_border(t, border_crop)
    win = _SSIM_WINDOW
    if r.shape[0] < win.shape[0] or r.shape[1] < win.shape[1]:
        raise ContractError(f"image {r.shape} smaller than SSIM window after crop")
    c1 = 0.01**2
    c2 = 0.03**2
    mu1 = _filter_valid(r, win)
    mu2 = _filter_valid(t, win)
    mu1_sq, mu2_sq, mu12 = mu1 * mu1, mu2 * mu2, mu1 * mu2
    sigma1_sq = _filter_valid(r * r, win) - mu1_sq
    sigma2_sq = _filter_valid(t * t, win) - mu2_sq
    sigma12 = _filter_valid(r * t, win) - mu12
    num = (2.0 * mu12 + c1) * (2.0 * sigma12 + c2)
    den = (mu1_sq + mu2_sq + c1) * (sigma1_sq + sigma2_sq + c2)
    return float(np.mean(num / den))


def quantize(img: np.ndarray) -> np.ndarray:
    """Round a [0, 1] float image to the 8-bit grid, staying in float."""
    a = _check_image(img)
    return np.round(np.clip(a, 0.0, 1.0) * 255.0) / 255.0


def load_png(path) -> np.ndarray:
    """Load an 8-bit grayscale or RGB PNG as a [0, 1] float array."""
    try:
        with Image.open(path) as im:
            if im.format != "PNG":
                raise ImageIOError(f"{path}: unsupported format {im.format!r}, expected PNG")
            if im.mode not in ("L", "RGB"):
                raise ImageIOError(f"{path}: unsupported PNG mode {im.mode!r} (need L or RGB)")
            arr = np.asarray(im, dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError) as exc:
        if isinstance(exc, ImageIOError):
            raise
        raise ImageIOError(f"{path}: not a readable image ({exc})") from exc
    return arr


def save_png(path, img: np.ndarray) -> None:
    """Save a [0, 1] float image as an 8-bit PNG (atomic write)."""
    import os

    a = _check_image(img)
    u8 = np.round(np.clip(a, 0.0, 1.0) * 255.0).astype(np.uint8)
    mode = "L" if u8.ndim == 2 else "RGB"
    if u8.ndim == 3 and u8.shape[2] == 1:
        u8, mode = u8[:, :, 0], "L"
    tmp = f"{path}.tmp-{os.getpid()}"
    Image.fromarray(u8, mode=mode).save(tmp, format="PNG")
    os.replace(tmp, path)
