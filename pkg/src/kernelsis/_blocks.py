"""Block-wise share evaluation and reconstruction shared by every scheme.

Every scheme reduces to the same picture: ``M`` polynomials of ``k``
coefficients, each coefficient tagged with the flat pixel index it carries, or
:data:`~kernelsis.kernel.FILLER` for a random value, or :data:`PADDING` for a
zero appended to fill the last block.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ReconstructionError
from .field import PrimeField, vandermonde_inverse
from .kernel import FILLER

PADDING = -2

#: Wu's convention: the 9-bit value 256 is written as the byte 0.
WU_ESCAPE = 256


def sequential_cells(n_pixels: int, k: int) -> np.ndarray:
    """Cell table taking ``k`` consecutive pixels per block, zero-padding the tail."""
    n_blocks = -(-n_pixels // k)
    cells = np.arange(n_blocks * k, dtype=np.int64).reshape(n_blocks, k)
    cells[cells >= n_pixels] = PADDING
    return cells


def to_stored(values: np.ndarray) -> np.ndarray:
    """Reduce evaluations to bytes, writing 256 as 0."""
    values = np.asarray(values)
    return np.where(values == WU_ESCAPE, 0, values).astype(np.uint8)


def bit_patterns(z: int) -> np.ndarray:
    """All ``2**z`` 0/1 rows of length ``z`` in lexicographic order."""
    return np.array(list(itertools.product((0, 1), repeat=z)), dtype=np.int64).reshape(2**z, z)


def _neighbour_score(values: dict, image: np.ndarray, decoded: np.ndarray, width: int) -> int:
    height = len(image) // width
    score = 0
    for cell, v in values.items():
        r, c = divmod(cell, width)
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < height and 0 <= nc < width:
                nb = nr * width + nc
                if nb in values:
                    score += (v - values[nb]) ** 2
                elif decoded[nb]:
                    score += (v - int(image[nb])) ** 2
    return score


def _candidates(y: np.ndarray, vinv: np.ndarray, p: int):
    """Yield ``(bits, coeffs)`` for every 0/256 reading of the zeros in ``y``.

    Bit patterns come in lexicographic order over the zero positions.
    """
    zeros = np.flatnonzero(y == 0)
    patterns = bit_patterns(len(zeros))
    readings = np.tile(np.asarray(y, dtype=np.int64), (len(patterns), 1))
    readings[:, zeros] += WU_ESCAPE * patterns
    for bits, coeffs in zip(patterns, readings @ vinv.T % p):
        yield tuple(bits.tolist()), coeffs


def decode_blocks(stored, xs, field: PrimeField, cells: np.ndarray, shape, *, guarded=None, strict: bool = True):
    """Rebuild a ``shape`` image from ``k`` share rows ``stored`` (shape ``(k, M)``).

    Modulo 257 a stored 0 may stand for 0 or 256.  Blocks without zeros, and
    blocks flagged in ``guarded`` (whose dealer guaranteed no 256), are decoded
    directly first.  The remaining blocks are resolved afterwards in stream
    order: every 0/256 reading is tried, readings that put 256 into a
    coefficient or a nonzero value into padding are rejected, and the survivor
    whose pixels differ least (sum of squares) from their decoded 4-neighbours
    wins.  Ties go to fewer 256 readings, then the lexicographically smaller
    pattern.

    With ``strict=False`` an unresolvable block takes the all-zero reading
    instead of raising, and out-of-range pixel values are clipped to 255.
    """
    height, width = shape
    p = field.p
    stored = np.asarray(stored, dtype=np.int64)
    vinv = vandermonde_inverse(xs, field)
    coeffs = (vinv @ stored % p).T
    n_pixels = height * width
    image = np.zeros(n_pixels, dtype=np.int64)
    decoded = np.zeros(n_pixels, dtype=bool)

    if p == 257:
        ambiguous = (stored == 0).any(axis=0)
        if guarded is not None:
            ambiguous &= ~np.asarray(guarded, dtype=bool)
    else:
        ambiguous = np.zeros(stored.shape[1], dtype=bool)

    direct = ~ambiguous
    d_cells = cells[direct]
    d_coeffs = coeffs[direct]
    is_px = d_cells >= 0
    px_values = d_coeffs[is_px]
    if strict and (px_values > 255).any():
        raise ReconstructionError("interpolated pixel value 256 in an unambiguous block; shares are corrupt")
    image[d_cells[is_px]] = np.minimum(px_values, 255)
    decoded[d_cells[is_px]] = True

    for m in np.flatnonzero(ambiguous):
        row = cells[m]
        pad = row == PADDING
        best_key = None
        best = None
        for bits, c in _candidates(stored[:, m], vinv, p):
            if (c == WU_ESCAPE).any() or c[pad].any():
                continue
            values = {int(cell): int(v) for cell, v in zip(row, c) if cell >= 0}
            key = (_neighbour_score(values, image, decoded, width), sum(bits), bits)
            if best_key is None or key < best_key:
                best_key, best = key, values
        if best is None:
            if strict:
                raise ReconstructionError(f"no consistent 0/256 reading for block {m}; shares are corrupt")
            best = {int(cell): min(int(v), 255) for cell, v in zip(row, coeffs[m]) if cell >= 0}
        for cell, v in best.items():
            image[cell] = v
            decoded[cell] = True

    return image.astype(np.uint8).reshape(height, width)


__all__ = ["FILLER", "PADDING", "WU_ESCAPE", "bit_patterns", "decode_blocks", "sequential_cells", "to_stored"]
