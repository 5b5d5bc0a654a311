"""Input validation helpers used at the public API boundary."""

from __future__ import annotations

import numbers

import numpy as np

from .errors import InvalidInputError, ParameterError


def check_random_state(seed) -> np.random.Generator:
    """Turn ``seed`` into a :class:`numpy.random.Generator`.

    ``None`` gives fresh OS entropy, an int seeds a new generator, and an
    existing generator (or any object exposing ``integers``) is passed through.
    """
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    if isinstance(seed, np.random.Generator) or hasattr(seed, "integers"):
        return seed
    raise ParameterError(f"cannot build a random generator from {seed!r}")


def check_image(image, *, name: str = "image") -> np.ndarray:
    """Validate a grayscale image and return it as a 2-D ``uint8`` array."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D (height, width), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must have at least one pixel")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise InvalidInputError(f"{name} must hold integers, got {arr.dtype}")
        if arr.min() < 0 or arr.max() > 255:
            raise InvalidInputError(f"{name} intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def check_threshold(k: int, n: int, p: int) -> None:
    """Require 2 <= k <= n < p."""
    if not (isinstance(k, numbers.Integral) and isinstance(n, numbers.Integral)):
        raise ParameterError("k and n must be integers")
    if k < 2:
        raise ParameterError(f"threshold k must be at least 2, got {k}")
    if k > n:
        raise ParameterError(f"threshold k={k} exceeds participant count n={n}")
    if n >= p:
        raise ParameterError(f"n={n} participants need n < p={p} distinct evaluation points")
