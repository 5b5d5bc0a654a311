"""Byte-exact readers and writers: binary PGM images, plain PBM kernels, KSIS bundles.

KSIS v1 layout, all integers big-endian::

    magic "KSIS" | version u8 | mode u8 | k u16 | n u16 | x u16
    | image_width u32 | image_height u32 | kernel_rows u16 | kernel_cols u16
    | image_share_len u32 | kernel_share_len u32 | image_share | kernel_share
"""

from __future__ import annotations

import re
import struct

import numpy as np

from .errors import FormatError
from .kernel import Kernel, validate_kernel
from .scheme import FIELDS, ShareBundle, kernel_share_length

MAGIC = b"KSIS"
VERSION = 1
MODE_CODES = {"thienlin251": 0, "wu257": 1}
_MODE_NAMES = {v: k for k, v in MODE_CODES.items()}
_HEADER = struct.Struct(">4sBBHHHIIHHII")

_WS = b" \t\r\n\v\f"


def _header_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last one.
    """
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos] in _WS:
            pos += 1
        if pos < len(data) and data[pos] == ord("#"):
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise FormatError("truncated header")
        tokens.append(data[start:pos])
    if pos >= len(data) or data[pos] not in _WS:
        raise FormatError("header must end with a whitespace byte")
    return tokens, pos + 1


def _positive(token: bytes, what: str) -> int:
    if not token.isdigit():
        raise FormatError(f"{what} must be a decimal integer, got {token!r}")
    value = int(token)
    if value < 1:
        raise FormatError(f"{what} must be positive")
    return value


def read_pgm(data: bytes) -> np.ndarray:
    """Parse a binary (P5) PGM with maxval 255 into a ``(height, width)`` array."""
    data = bytes(data)
    (magic, w, h, maxval), offset = _header_tokens(data, 4)
    if magic != b"P5":
        raise FormatError(f"expected a binary PGM (P5), got magic {magic!r}")
    width = _positive(w, "width")
    height = _positive(h, "height")
    if _positive(maxval, "maxval") != 255:
        raise FormatError(f"only maxval 255 is supported, got {int(maxval)}")
    payload = data[offset:]
    if len(payload) != width * height:
        raise FormatError(f"expected {width * height} pixel bytes, found {len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(image) -> bytes:
    image = np.asarray(image, dtype=np.uint8)
    height, width = image.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + image.tobytes()


def read_pbm(data: bytes, k: int | None = None) -> Kernel:
    """Parse a plain (P1) PBM kernel and check that it is a valid kernel."""
    text = bytes(data).decode("ascii", errors="replace")
    text = re.sub(r"#[^\r\n]*", " ", text)
    parts = text.split(None, 3)
    if len(parts) < 3 or parts[0] != "P1":
        raise FormatError("expected a plain PBM (P1) header")
    cols = _positive(parts[1].encode(), "width")
    rows = _positive(parts[2].encode(), "height")
    bits = "".join(parts[3].split()) if len(parts) == 4 else ""
    if set(bits) - {"0", "1"}:
        raise FormatError("PBM cells must be 0 or 1")
    if len(bits) != rows * cols:
        raise FormatError(f"expected {rows * cols} cells, found {len(bits)}")
    arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8).reshape(rows, cols) - ord("0")
    kernel = Kernel.from_array(arr)
    problems = validate_kernel(kernel, k)
    if problems:
        raise FormatError("invalid kernel: " + "; ".join(problems))
    return kernel


def write_pbm(kernel: Kernel) -> bytes:
    lines = [f"P1\n{kernel.cols} {kernel.rows}"]
    lines += [" ".join(str(v) for v in row) for row in kernel.to_array()]
    return ("\n".join(lines) + "\n").encode("ascii")


def encode_bundle(bundle: ShareBundle) -> bytes:
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        MODE_CODES[bundle.mode],
        bundle.k,
        bundle.n,
        bundle.x,
        bundle.image_width,
        bundle.image_height,
        bundle.kernel_rows,
        bundle.kernel_cols,
        len(bundle.image_share),
        len(bundle.kernel_share),
    )
    return header + bundle.image_share + bundle.kernel_share


def decode_bundle(data: bytes) -> ShareBundle:
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise FormatError(f"bundle shorter than its {_HEADER.size}-byte header")
    (magic, version, mode, k, n, x, width, height, rows, cols, image_len, kernel_len) = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported bundle version {version}")
    if mode not in _MODE_NAMES:
        raise FormatError(f"unknown mode code {mode}")
    mode_name = _MODE_NAMES[mode]
    if not 2 <= k <= n < FIELDS[mode_name].p or not 1 <= x <= n:
        raise FormatError(f"inconsistent parameters k={k} n={n} x={x}")
    if min(width, height, rows, cols) < 1 or rows * cols < k:
        raise FormatError("dimensions must be positive and the kernel must hold k cells")
    # every position maps at most k pixels and every pixel is mapped once
    if not -(-width * height // k) <= image_len <= width * height:
        raise FormatError(f"image share of {image_len} values impossible for a {width}x{height} image")
    expected_kernel_len = kernel_share_length(rows, cols, k)
    if kernel_len != expected_kernel_len:
        raise FormatError(f"kernel share length {kernel_len}, expected {expected_kernel_len}")
    body = data[_HEADER.size :]
    if len(body) != image_len + kernel_len:
        raise FormatError(f"payload holds {len(body)} bytes, header declares {image_len + kernel_len}")
    return ShareBundle(
        x=x,
        mode=mode_name,
        k=k,
        n=n,
        image_width=width,
        image_height=height,
        kernel_rows=rows,
        kernel_cols=cols,
        image_share=body[:image_len],
        kernel_share=body[image_len:],
    )
