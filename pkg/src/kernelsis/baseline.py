"""Reference polynomial image-sharing schemes.

* Shamir: one polynomial per pixel, the pixel as constant term, random higher
  coefficients, modulo 251.  Shares are as large as the image.
* Thien-Lin: ``k`` consecutive pixels become all ``k`` coefficients, modulo 251,
  so each share is ``1/k`` of the image.  Pixels above 250 are clamped.
* Wu: Thien-Lin modulo 257, which is lossless; the evaluation 256 is stored as
  0 and disambiguated on reconstruction by neighbourhood smoothness.

Participant ``i`` always evaluates at ``x = i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._blocks import decode_blocks, sequential_cells, to_stored
from ._validation import check_image, check_random_state, check_threshold
from .errors import InsufficientSharesError, InvalidInputError, ParameterError
from .field import GF251, GF257, evaluate_many
from .kernel import FILLER

MODES = {"shamir": GF251, "thienlin251": GF251, "wu257": GF257}


@dataclass(frozen=True, eq=False)
class FlatShare:
    """One participant's share stream for a baseline scheme."""

    x: int
    values: np.ndarray
    mode: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.uint8))

    def __eq__(self, other):
        if not isinstance(other, FlatShare):
            return NotImplemented
        return self.x == other.x and self.mode == other.mode and np.array_equal(self.values, other.values)

    def __len__(self):
        return len(self.values)


def _split(coeffs, n, mode):
    field = MODES[mode]
    xs = list(range(1, n + 1))
    evals = evaluate_many(coeffs, xs, field)
    if mode == "wu257":
        evals = to_stored(evals)
    return [FlatShare(x, evals[i], mode) for i, x in enumerate(xs)]


def _stack(shares, k, mode, length):
    shares = list(shares)
    if len(shares) < k:
        raise InsufficientSharesError(f"need {k} shares, got {len(shares)}")
    xs = [s.x for s in shares]
    if len(set(xs)) != len(xs):
        raise InvalidInputError(f"duplicate evaluation points {xs}")
    for s in shares:
        if s.mode != mode:
            raise InvalidInputError(f"expected {mode} shares, got {s.mode}")
        if len(s.values) != length:
            raise InvalidInputError(f"share x={s.x} holds {len(s.values)} values, expected {length}")
    used = shares[:k]
    return [s.x for s in used], np.stack([s.values for s in used]).astype(np.int64)


def shamir_split(image, k: int, n: int, rng=None) -> list[FlatShare]:
    """Share every pixel with its own polynomial of fresh random coefficients."""
    image = check_image(image)
    check_threshold(k, n, 251)
    rng = check_random_state(rng)
    secrets = np.minimum(image.reshape(-1), 250).astype(np.int64)
    coeffs = np.empty((secrets.size, k), dtype=np.int64)
    coeffs[:, 0] = secrets
    coeffs[:, 1:] = rng.integers(0, 251, size=(secrets.size, k - 1))
    return _split(coeffs, n, "shamir")


def shamir_combine(shares, k: int, width: int, height: int) -> np.ndarray:
    n_pixels = width * height
    xs, ys = _stack(shares, k, "shamir", n_pixels)
    cells = np.full((n_pixels, k), FILLER, dtype=np.int64)
    cells[:, 0] = np.arange(n_pixels)
    return decode_blocks(ys, xs, GF251, cells, (height, width))


def thienlin_split(image, k: int, n: int) -> list[FlatShare]:
    """Use ``k`` consecutive (clamped) pixels as the coefficients of one polynomial."""
    image = check_image(image)
    check_threshold(k, n, 251)
    return _split(_sequential_coeffs(np.minimum(image, 250), k), n, "thienlin251")


def thienlin_combine(shares, k: int, width: int, height: int) -> np.ndarray:
    cells = sequential_cells(width * height, k)
    xs, ys = _stack(shares, k, "thienlin251", len(cells))
    return decode_blocks(ys, xs, GF251, cells, (height, width))


def wu_split(image, k: int, n: int) -> list[FlatShare]:
    """Thien-Lin modulo 257 without clamping; 256 is stored as 0."""
    image = check_image(image)
    check_threshold(k, n, 257)
    return _split(_sequential_coeffs(image, k), n, "wu257")


def wu_combine(shares, k: int, width: int, height: int) -> np.ndarray:
    cells = sequential_cells(width * height, k)
    xs, ys = _stack(shares, k, "wu257", len(cells))
    return decode_blocks(ys, xs, GF257, cells, (height, width))


def _sequential_coeffs(image, k):
    flat = np.asarray(image, dtype=np.int64).reshape(-1)
    n_blocks = -(-flat.size // k)
    padded = np.zeros(n_blocks * k, dtype=np.int64)
    padded[: flat.size] = flat
    return padded.reshape(n_blocks, k)
