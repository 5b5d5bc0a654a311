"""Randomized-kernel (k, n) secret image sharing.

The kernel picks ``k`` coefficients per position as it traverses the image,
mixing pixels with random fillers; each position becomes one polynomial whose
evaluations form the image shares.  The kernel is itself shared so no single
participant holds the key.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ._blocks import WU_ESCAPE, bit_patterns, decode_blocks, to_stored
from ._validation import check_image, check_random_state, check_threshold
from .errors import (
    ForgedShareError,
    InsufficientSharesError,
    InvalidInputError,
    MetadataMismatchError,
    ParameterError,
    ReconstructionError,
)
from .field import GF251, GF257, evaluate_many, vandermonde_inverse
from .kernel import Kernel, check_kernel, filler_range, traversal_order, validate_kernel

FIELDS = {"thienlin251": GF251, "wu257": GF257}

#: Attempts at re-drawing an anchor's fillers so no share evaluates to 256.
MAX_REDRAWS = 64


@dataclass(frozen=True)
class ShareBundle:
    """Everything one participant holds for one shared image."""

    x: int
    mode: str
    k: int
    n: int
    image_width: int
    image_height: int
    kernel_rows: int
    kernel_cols: int
    image_share: bytes
    kernel_share: bytes

    def __post_init__(self):
        if self.mode not in FIELDS:
            raise ParameterError(f"unknown mode {self.mode!r}; expected one of {sorted(FIELDS)}")
        object.__setattr__(self, "image_share", bytes(self.image_share))
        object.__setattr__(self, "kernel_share", bytes(self.kernel_share))

    @property
    def metadata(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self) if f.name not in ("x", "image_share", "kernel_share"))

    @property
    def share_size(self) -> int:
        return len(self.image_share)


def kernel_share_length(rows: int, cols: int, k: int) -> int:
    """Per-participant kernel share length: packed bitmap bytes over ``k``."""
    n_bytes = -(-rows * cols // 8)
    return -(-n_bytes // k)


def share_kernel(kernel: Kernel, k: int, n: int) -> list[bytes]:
    """Pack the bitmap 8 cells per byte and share the bytes modulo 257.

    ``k`` consecutive bytes form one polynomial; the last block is zero-padded.
    """
    check_threshold(k, n, 257)
    packed = np.packbits(kernel.to_array().reshape(-1)).astype(np.int64)
    n_blocks = -(-packed.size // k)
    coeffs = np.zeros(n_blocks * k, dtype=np.int64)
    coeffs[: packed.size] = packed
    evals = to_stored(evaluate_many(coeffs.reshape(n_blocks, k), range(1, n + 1), GF257))
    return [row.tobytes() for row in evals]


def reconstruct_kernel(kernel_shares, k: int, kernel_rows: int, kernel_cols: int) -> Kernel:
    """Rebuild the kernel from ``(x, share_bytes)`` pairs.

    A stored 0 may mean 0 or 256.  Readings that put 256 into a coefficient or
    set bits in the padding are impossible; among the remaining combinations
    the sparsest per-block readings that add up to exactly ``k`` ones with the
    top-left cell set are taken.  No valid combination means some share was
    not issued by the dealer.
    """
    kernel_shares = list(kernel_shares)
    if len(kernel_shares) < k:
        raise InsufficientSharesError(f"need {k} kernel shares, got {len(kernel_shares)}")
    xs = [int(x) for x, _ in kernel_shares]
    if len(set(xs)) != len(xs):
        raise InvalidInputError(f"duplicate evaluation points {xs}")
    n_cells = kernel_rows * kernel_cols
    n_bytes = -(-n_cells // 8)
    length = -(-n_bytes // k)
    for x, share in kernel_shares:
        if len(share) != length:
            raise ForgedShareError(f"kernel share x={x} holds {len(share)} bytes, expected {length}")

    used = kernel_shares[:k]
    xs = xs[:k]
    stored = np.stack([np.frombuffer(bytes(s), dtype=np.uint8) for _, s in used]).astype(np.int64)
    vinv = vandermonde_inverse(xs, GF257)
    # mask of bits that must be zero in each byte position of the padded stream
    pad_bits = np.zeros(length * k, dtype=np.int64)
    pad_bits[n_bytes:] = 0xFF
    tail = n_bytes * 8 - n_cells
    if tail:
        pad_bits[n_bytes - 1] = (1 << tail) - 1

    options = []
    for m in range(length):
        y = stored[:, m]
        zeros = np.flatnonzero(y == 0)
        patterns = bit_patterns(len(zeros))
        readings = np.tile(y, (len(patterns), 1))
        readings[:, zeros] += WU_ESCAPE * patterns
        cands = readings @ vinv.T % 257
        ok = ~(cands == WU_ESCAPE).any(axis=1) & ~(cands & pad_bits[m * k : (m + 1) * k]).any(axis=1)
        if m == 0:
            ok &= (cands[:, 0] & 0x80) != 0  # the top-left cell is always a one
        popcounts = np.unpackbits(cands.astype(np.uint8), axis=1).sum(axis=1)
        ok &= popcounts <= k
        block_options = [
            (int(popcounts[i]), int(patterns[i].sum()), tuple(patterns[i]), cands[i]) for i in np.flatnonzero(ok)
        ]
        if not block_options:
            raise ForgedShareError("kernel shares interpolate to an impossible bitmap; a share is forged or corrupt")
        block_options.sort(key=lambda o: o[:3])
        options.append(block_options)

    # feasible[m][b]: blocks m.. can contribute exactly b ones
    feasible = np.zeros((length + 1, k + 1), dtype=bool)
    feasible[length, 0] = True
    for m in range(length - 1, -1, -1):
        for popcount, *_ in options[m]:
            feasible[m, popcount:] |= feasible[m + 1, : k + 1 - popcount]
    if not feasible[0, k]:
        raise ForgedShareError("kernel shares do not reconstruct a valid kernel; a share is forged or corrupt")
    budget = k
    chosen = []
    for m in range(length):
        opt = next(o for o in options[m] if o[0] <= budget and feasible[m + 1, budget - o[0]])
        chosen.append(opt[3])
        budget -= opt[0]
    stream = np.concatenate(chosen)[:n_bytes].astype(np.uint8)
    bits = np.unpackbits(stream)[:n_cells].reshape(kernel_rows, kernel_cols)
    kernel = Kernel.from_array(bits)
    if validate_kernel(kernel, k):
        raise ForgedShareError("kernel shares do not reconstruct a valid kernel; a share is forged or corrupt")
    return kernel


def _fill(plan, image, p, rng):
    flat = image.reshape(-1).astype(np.int64)
    if p == 251:
        flat = np.minimum(flat, 250)
    mask = plan.filler_mask
    coeffs = np.empty(plan.cells.shape, dtype=np.int64)
    coeffs[~mask] = flat[plan.cells[~mask]]
    coeffs[mask] = rng.integers(0, filler_range(p), size=int(mask.sum()))
    return coeffs, mask


def split(image, kernel: Kernel, k: int, n: int, mode: str = "wu257", rng=None) -> list[ShareBundle]:
    """Split ``image`` into ``n`` bundles, any ``k`` of which rebuild it.

    In ``wu257`` mode an anchor with fillers whose evaluation would be 256 for
    some participant gets its fillers re-drawn (up to :data:`MAX_REDRAWS`
    times), so only filler-free anchors ever need the 0/256 search.
    """
    if mode not in FIELDS:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {sorted(FIELDS)}")
    field = FIELDS[mode]
    image = check_image(image)
    check_threshold(k, n, field.p)
    check_kernel(kernel, k)
    rng = check_random_state(rng)
    height, width = image.shape

    plan = traversal_order(kernel, width, height)
    coeffs, mask = _fill(plan, image, field.p, rng)
    xs = list(range(1, n + 1))
    evals = evaluate_many(coeffs, xs, field)

    if mode == "wu257":
        has_filler = mask.any(axis=1)
        for _ in range(MAX_REDRAWS):
            redo = np.flatnonzero((evals == WU_ESCAPE).any(axis=0) & has_filler)
            if redo.size == 0:
                break
            sub_mask = mask[redo]
            sub = coeffs[redo]
            sub[sub_mask] = rng.integers(0, 256, size=int(sub_mask.sum()))
            coeffs[redo] = sub
            evals[:, redo] = evaluate_many(sub, xs, field)
        stored = to_stored(evals)
    else:
        stored = evals.astype(np.uint8)

    kernel_shares = share_kernel(kernel, k, n)
    return [
        ShareBundle(
            x=x,
            mode=mode,
            k=k,
            n=n,
            image_width=width,
            image_height=height,
            kernel_rows=kernel.rows,
            kernel_cols=kernel.cols,
            image_share=stored[i].tobytes(),
            kernel_share=kernel_shares[i],
        )
        for i, x in enumerate(xs)
    ]


def _check_bundles(bundles) -> list[ShareBundle]:
    bundles = list(bundles)
    if not bundles:
        raise InsufficientSharesError("no share bundles supplied")
    first = bundles[0]
    for b in bundles[1:]:
        if b.metadata != first.metadata:
            raise MetadataMismatchError(f"bundle x={b.x} does not belong with bundle x={first.x}")
    xs = [b.x for b in bundles]
    if len(set(xs)) != len(xs):
        raise InvalidInputError(f"duplicate evaluation points {xs}")
    if len(bundles) < first.k:
        raise InsufficientSharesError(f"need {first.k} bundles, got {len(bundles)}")
    lengths = {len(b.image_share) for b in bundles}
    if len(lengths) != 1:
        raise MetadataMismatchError(f"image shares disagree in length: {sorted(lengths)}")
    return bundles


def reconstruct_image(bundles, kernel: Kernel, *, strict: bool = True, rng=None) -> np.ndarray:
    """Rebuild the image from bundles with an explicitly supplied kernel.

    ``strict=False`` lets a kernel of the wrong share size run anyway: missing
    share values are padded with random bytes, surplus ones dropped, and
    blocks with no consistent reading decoded naively.  This only exists to
    show what a wrong kernel produces.
    """
    bundles = _check_bundles(bundles)
    first = bundles[0]
    k = first.k
    field = FIELDS[first.mode]
    if kernel.k != k:
        raise ParameterError(f"kernel has {kernel.k} ones but the shares use k={k}")
    plan = traversal_order(kernel, first.image_width, first.image_height)
    used = bundles[:k]
    stored = np.stack([np.frombuffer(b.image_share, dtype=np.uint8) for b in used]).astype(np.int64)
    m = plan.n_anchors
    if stored.shape[1] != m:
        if strict:
            raise ReconstructionError(f"kernel yields {m} positions but shares hold {stored.shape[1]} values")
        rng = check_random_state(rng)
        if stored.shape[1] > m:
            stored = stored[:, :m]
        else:
            extra = rng.integers(0, filler_range(field.p), size=(k, m - stored.shape[1]))
            stored = np.concatenate([stored, extra], axis=1)
    guarded = plan.filler_mask.any(axis=1) if first.mode == "wu257" else None
    return decode_blocks(
        stored, [b.x for b in used], field, plan.cells, (first.image_height, first.image_width),
        guarded=guarded, strict=strict,
    )


def combine(bundles) -> np.ndarray:
    """Rebuild the secret image from ``k`` or more bundles of one split."""
    bundles = _check_bundles(bundles)
    first = bundles[0]
    kernel = reconstruct_kernel(
        [(b.x, b.kernel_share) for b in bundles], first.k, first.kernel_rows, first.kernel_cols
    )
    return reconstruct_image(bundles, kernel)


__all__ = [
    "ShareBundle",
    "combine",
    "kernel_share_length",
    "reconstruct_image",
    "reconstruct_kernel",
    "share_kernel",
    "split",
]
