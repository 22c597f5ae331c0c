"""Synthetic test images: smooth textures, gradients and noise.

These replace the copyrighted photographs used in the original
experiments; ``rgb_texture`` mimics a natural colour image whose red and
green channels are strongly but nonlinearly related.
"""
from __future__ import annotations

import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter

from .seeding import make_rng


def _normalise(a: np.ndarray) -> np.ndarray:
    a = a - a.min()
    top = a.max()
    return a / top if top > 0 else a


def texture(size: int = 128, seed: int = 0, scales=(1.0, 2.0, 4.0, 8.0)) -> np.ndarray:
    """Float texture in ``[0, 1]``: sum of Gaussian-smoothed noise fields at several scales."""
    rng = make_rng(seed)
    out = np.zeros((size, size))
    for s in scales:
        field = gaussian_filter(rng.standard_normal((size, size)), s, mode="reflect")
        out += field / field.std() * s ** 0.5
    return _normalise(out)


def quantize(a: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(a * 255.0), 0, 255).astype(np.uint8)


def rgb_texture(size: int = 128, seed: int = 0, scale: float = 6.0) -> np.ndarray:
    """``(size, size, 3)`` uint8 image whose channels are different monotone maps of one field.

    The field is smooth at pixel scale (Gaussian correlation length
    ``scale``), like a photograph, so bilinear resampling barely blurs it.
    """
    base = texture(size, seed, scales=(scale,))
    red = base
    green = _normalise(base ** 1.5)
    blue = _normalise(np.sqrt(1.0 - base))
    return np.stack([quantize(red), quantize(green), quantize(blue)], axis=-1)


def gradient(size: int = 128) -> np.ndarray:
    ramp = np.linspace(0.0, 1.0, size)
    return quantize(np.add.outer(ramp, ramp) / 2.0)


def noise(size: int = 128, seed: int = 0) -> np.ndarray:
    return quantize(make_rng(seed).uniform(size=(size, size)))


def write_fixtures(directory, size: int = 128, seed: int = 0) -> dict:
    """Write the standard fixture PNGs into ``directory`` and return their paths."""
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    rgb = rgb_texture(size, seed)
    paths = {
        "texture_rgb": d / "texture_rgb.png",
        "texture_gray": d / "texture_gray.png",
        "gradient": d / "gradient.png",
        "noise_a": d / "noise_a.png",
        "noise_b": d / "noise_b.png",
    }
    Image.fromarray(rgb, mode="RGB").save(paths["texture_rgb"])
    Image.fromarray(quantize(texture(size, seed)), mode="L").save(paths["texture_gray"])
    Image.fromarray(gradient(size), mode="L").save(paths["gradient"])
    Image.fromarray(noise(size, seed + 10), mode="L").save(paths["noise_a"])
    Image.fromarray(noise(size, seed + 11), mode="L").save(paths["noise_b"])
    return paths
