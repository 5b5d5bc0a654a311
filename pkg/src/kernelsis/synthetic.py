"""Deterministic test images: smooth gradients and natural-looking fields."""

from __future__ import annotations

import numpy as np

from ._validation import check_random_state

SMOOTH_KINDS = ("horizontal", "vertical", "diagonal", "radial", "waves")


def smooth_image(kind: str, height: int = 64, width: int = 64) -> np.ndarray:
    """A noise-free smooth image of the given ``kind`` spanning most of [0, 255]."""
    yy, xx = np.mgrid[:height, :width].astype(np.float64)
    v = yy / max(height - 1, 1)
    u = xx / max(width - 1, 1)
    if kind == "horizontal":
        img = 20 + 215 * u
    elif kind == "vertical":
        img = 30 + 200 * v
    elif kind == "diagonal":
        img = 10 + 120 * (u + v)
    elif kind == "radial":
        img = 240 - 160 * np.hypot(u - 0.4, v - 0.6)
    elif kind == "waves":
        img = 128 + 60 * np.sin(3.0 * u + 1.0) + 50 * np.cos(2.0 * v)
    else:
        raise ValueError(f"unknown kind {kind!r}; expected one of {SMOOTH_KINDS}")
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def natural_image(height: int, width: int, rng=None, noise: float = 0.0) -> np.ndarray:
    """Random low-frequency field: a few cosine waves on a mid-gray base."""
    rng = check_random_state(rng)
    yy, xx = np.mgrid[:height, :width].astype(np.float64)
    img = np.full((height, width), 128.0)
    for _ in range(3):
        fy, fx = rng.uniform(0.0, 0.15, size=2)
        img += rng.uniform(20, 60) * np.cos(fy * yy + fx * xx + rng.uniform(0, 2 * np.pi))
    if noise:
        img += rng.normal(0.0, noise, size=img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def random_image(height: int, width: int, rng=None, *, saturate: int = 0) -> np.ndarray:
    """Uniform noise, with ``saturate`` pixels forced into 251..255."""
    rng = check_random_state(rng)
    img = rng.integers(0, 256, size=(height, width), dtype=np.uint8)
    if saturate:
        idx = rng.choice(img.size, size=min(saturate, img.size), replace=False)
        img.reshape(-1)[idx] = rng.integers(251, 256, size=idx.size)
    return img
