"""Deterministic synthetic photo-like corpus for desk-scale experiments.

Each image is a tile mosaic mixing monochromatic content (flat patches,
soft gradients) with texture-rich content (checkerboards, stripes, smoothed
random fields, shape edges).  That spread of per-patch difficulty is what
the selection strategies need to differentiate themselves on.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import imgcore

__all__ = ["make_image", "generate_corpus"]


def _flat(rng, n):
    return np.full((n, n, 3), rng.uniform(0.1, 0.9, 3))


def _gradient(rng, n):
    a = rng.uniform(0.1, 0.9, 3)
    b = rng.uniform(0.1, 0.9, 3)
    t = np.linspace(0.0, 1.0, n)
    axis = rng.integers(0, 2)
    ramp = t[:, None] if axis == 0 else t[None, :]
    return a + (b - a) * ramp[:, :, None]


def _checker(rng, n):
    cell = int(rng.integers(2, 6))
    yy, xx = np.mgrid[0:n, 0:n]
    mask = ((yy // cell + xx // cell) % 2).astype(np.float64)
    a = rng.uniform(0.0, 0.4, 3)
    b = rng.uniform(0.6, 1.0, 3)
    return a + (b - a) * mask[:, :, None]


def _stripes(rng, n):
    period = rng.uniform(3.0, 9.0)
    angle = rng.uniform(0.0, np.pi)
    yy, xx = np.mgrid[0:n, 0:n]
    phase = (np.cos(angle) * xx + np.sin(angle) * yy) * (2 * np.pi / period)
    wave = 0.5 + 0.5 * np.sin(phase + rng.uniform(0, 2 * np.pi))
    a = rng.uniform(0.0, 0.5, 3)
    b = rng.uniform(0.5, 1.0, 3)
    return a + (b - a) * wave[:, :, None]


def _texture(rng, n):
    # Smoothed white noise: band-limited texture resembling foliage/gravel.
    noise = rng.uniform(0.0, 1.0, (n, n, 3))
    kernel = np.ones((3, 3)) / 9.0
    k4 = np.zeros((3, 3, 3, 3))
    for c in range(3):
        k4[c, c] = kernel
    smooth = imgcore.conv2d(noise, k4, padding="same")
    tint = rng.uniform(0.2, 0.8, 3)
    return np.clip(0.5 * smooth + 0.5 * tint, 0.0, 1.0)


def _shapes(rng, n):
    img = _flat(rng, n)
    yy, xx = np.mgrid[0:n, 0:n]
    for _ in range(int(rng.integers(2, 5))):
        cy, cx = rng.uniform(0, n, 2)
        rad = rng.uniform(n / 8, n / 3)
        color = rng.uniform(0.0, 1.0, 3)
        mask = (yy - cy) ** 2 + (xx - cx) ** 2 < rad**2
        img[mask] = color
    return img


def _noise(rng, n):
    # Binary salt-and-pepper noise: unlearnable content with maximal residual
    # energy, standing in for the corrupted captures of the loss long tail.
    return rng.integers(0, 2, (n, n, 3)).astype(np.float64)


_EASY = (_flat, _gradient)
_HARD = (_checker, _stripes, _texture, _shapes)


def make_image(
    rng: np.random.Generator,
    size: int,
    tile: int,
    hard_frac: float = 0.5,
    noise_frac: float = 0.0,
):
    """One mosaic image.

    Roughly ``hard_frac`` of tiles carry rich texture, the rest are
    monochromatic; independently, ``noise_frac`` of tiles are replaced by
    pure white noise (the detrimental long-tail content).
    """
    img = np.zeros((size, size, 3))
    for r in range(0, size, tile):
        for c in range(0, size, tile):
            if rng.uniform() < noise_frac:
                maker = _noise
            elif rng.uniform() < hard_frac:
                maker = rng.choice(_HARD)
            else:
                maker = rng.choice(_EASY)
            t = min(tile, size - r, size - c)
            img[r : r + t, c : c + t] = maker(rng, tile)[:t, :t]
    return np.clip(img, 0.0, 1.0)


def generate_corpus(
    out_dir,
    n_images: int = 20,
    size: int = 144,
    tile: int = 24,
    seed: int = 0,
    hard_frac: float = 0.5,
    noise_frac: float = 0.0,
) -> list[Path]:
    """Write a deterministic corpus of PNG images; returns the file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(n_images):
        img = make_image(rng, size, tile, hard_frac, noise_frac)
        path = out / f"img_{i:03d}.png"
        imgcore.save_png(path, img)
        paths.append(path)
    return paths
