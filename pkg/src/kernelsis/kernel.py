"""Binary selection kernels, the traversal they induce, and their coefficient of incidence.

A kernel is a sparse ``rows x cols`` binary matrix with exactly ``k`` ones, one
of which sits at the top-left cell.  Sliding it over an image picks ``k``
polynomial coefficients per position; cells that fall outside the image or on
an already-used pixel become random fillers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._validation import check_image, check_random_state
from .errors import InvalidInputError, ParameterError

#: Marker stored in :attr:`TraversalPlan.cells` for a random-filler coefficient.
FILLER = -1

KERNEL_MODES = ("uniform", "cyclic")


@dataclass(frozen=True)
class Kernel:
    """Sparse binary kernel; ``ones`` is kept sorted in row-major order."""

    rows: int
    cols: int
    ones: tuple

    def __post_init__(self):
        object.__setattr__(self, "ones", tuple(sorted((int(r), int(c)) for r, c in self.ones)))

    @property
    def k(self) -> int:
        return len(self.ones)

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @classmethod
    def from_array(cls, bits) -> "Kernel":
        bits = np.asarray(bits)
        if bits.ndim != 2:
            raise InvalidInputError("kernel bitmap must be 2-D")
        if not np.isin(bits, (0, 1)).all():
            raise InvalidInputError("kernel bitmap must contain only 0 and 1")
        rr, cc = np.nonzero(bits)
        return cls(bits.shape[0], bits.shape[1], tuple(zip(rr.tolist(), cc.tolist())))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, c in self.ones:
            if 0 <= r < self.rows and 0 <= c < self.cols:
                out[r, c] = 1
        return out

    def __str__(self):
        return "\n".join("".join("#" if v else "." for v in row) for row in self.to_array())


def validate_kernel(kernel: Kernel, k: int | None = None) -> list[str]:
    """Return every rule the kernel breaks; an empty list means it is valid."""
    if k is None:
        k = kernel.k
    problems = []
    if kernel.rows < 1 or kernel.cols < 1:
        problems.append(f"kernel dimensions must be positive, got {kernel.rows}x{kernel.cols}")
    if k < 2:
        problems.append(f"threshold must be at least 2, got {k}")
    if len(set(kernel.ones)) != len(kernel.ones):
        problems.append("duplicate one positions")
    outside = [rc for rc in kernel.ones if not (0 <= rc[0] < kernel.rows and 0 <= rc[1] < kernel.cols)]
    if outside:
        problems.append(f"ones outside the {kernel.rows}x{kernel.cols} footprint: {outside}")
    if (0, 0) not in kernel.ones:
        problems.append("first cell must be one")
    if len(set(kernel.ones)) != k:
        problems.append(f"expected k={k} ones, found {len(set(kernel.ones))}")
    return problems


def generate_kernel(rows: int, cols: int, k: int, mode: str = "uniform", rng=None) -> Kernel:
    """Draw a valid kernel.

    ``uniform`` places the ``k - 1`` non-origin ones on distinct cells chosen
    uniformly at random.  ``cyclic`` is deterministic: ones sit at the flat
    cell indices ``0, s, 2s, ..., (k-1)s`` with stride ``s = rows*cols // k``.
    """
    if rows < 1 or cols < 1:
        raise ParameterError(f"kernel dimensions must be positive, got {rows}x{cols}")
    if k < 2:
        raise ParameterError(f"threshold must be at least 2, got {k}")
    size = rows * cols
    if size < k:
        raise ParameterError(f"a {rows}x{cols} kernel cannot hold {k} ones")
    if mode == "uniform":
        rng = check_random_state(rng)
        rest = rng.choice(np.arange(1, size), size=k - 1, replace=False)
        flat = [0, *sorted(int(i) for i in rest)]
    elif mode == "cyclic":
        stride = size // k
        flat = [i * stride for i in range(k)]
    else:
        raise ParameterError(f"unknown kernel mode {mode!r}; expected one of {KERNEL_MODES}")
    return Kernel(rows, cols, tuple(divmod(i, cols) for i in flat))


def check_kernel(kernel: Kernel, k: int | None = None) -> Kernel:
    problems = validate_kernel(kernel, k)
    if problems:
        raise ParameterError("invalid kernel: " + "; ".join(problems))
    return kernel


@lru_cache(maxsize=64)
def _search_order(height: int, width: int) -> tuple:
    """Flat pixel indices sorted by Manhattan distance to (0, 0), then row."""
    rr, cc = np.divmod(np.arange(height * width), width)
    return tuple(np.lexsort((rr, rr + cc)).tolist())


@dataclass(frozen=True)
class TraversalPlan:
    """Positions taken by a kernel over an image and what each one selects.

    ``cells[m, j]`` is the flat pixel index picked by the ``j``-th kernel one
    (row-major order) at anchor ``m``, or :data:`FILLER`.
    """

    width: int
    height: int
    anchors: np.ndarray = field(repr=False)
    cells: np.ndarray = field(repr=False)

    @property
    def n_anchors(self) -> int:
        return len(self.anchors)

    @property
    def k(self) -> int:
        return self.cells.shape[1]

    @property
    def filler_mask(self) -> np.ndarray:
        return self.cells == FILLER

    @property
    def filler_count(self) -> int:
        return int(self.filler_mask.sum())

    def selections(self, m: int) -> list:
        """Anchor ``m`` as ``[(row, col) or None, ...]``; ``None`` marks a filler."""
        return [None if c == FILLER else divmod(int(c), self.width) for c in self.cells[m]]


def traversal_order(kernel: Kernel, width: int, height: int) -> TraversalPlan:
    """Slide ``kernel`` over a ``height x width`` image until every pixel is used.

    The next anchor is always the unmarked pixel nearest to (0, 0) in Manhattan
    distance, ties going to the smaller row.  Pixels with a smaller distance are
    all marked by then, so a single forward pointer over the search order finds
    each anchor.
    """
    if width < 1 or height < 1:
        raise ParameterError(f"image dimensions must be positive, got {width}x{height}")
    order = _search_order(height, width)
    offsets = kernel.ones
    n_pixels = width * height
    marked = bytearray(n_pixels)
    anchors = []
    cells = []
    ptr = 0
    while True:
        while ptr < n_pixels and marked[order[ptr]]:
            ptr += 1
        if ptr == n_pixels:
            break
        ar, ac = divmod(order[ptr], width)
        anchors.append((ar, ac))
        for dr, dc in offsets:
            r = ar + dr
            c = ac + dc
            if r < height and c < width:
                idx = r * width + c
                if not marked[idx]:
                    marked[idx] = 1
                    cells.append(idx)
                    continue
            cells.append(FILLER)
    return TraversalPlan(
        width=width,
        height=height,
        anchors=np.array(anchors, dtype=np.int64).reshape(-1, 2),
        cells=np.array(cells, dtype=np.int64).reshape(-1, len(offsets)),
    )


@dataclass(frozen=True)
class CoiResult:
    random_count: int
    footprint: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.random_count, self.footprint)

    def __float__(self):
        return self.random_count / self.footprint

    def __str__(self):
        return f"{self.random_count}/{self.footprint} = {float(self)}"


def coefficient_of_incidence(kernel: Kernel) -> CoiResult:
    """Count random coefficients with set algebra over the kernel's own footprint.

    ``X`` are the ones, ``Y`` the zeros, ``S`` the cells selected so far.  For
    each zero ``y`` not yet in ``S`` (visited nearest-first, membership checked
    as ``S`` grows) the shifted ones ``X + y`` contribute already-selected cells
    and cells outside ``X u Y`` to the random count.
    """
    check_kernel(kernel)
    ones = set(kernel.ones)
    footprint = {(r, c) for r in range(kernel.rows) for c in range(kernel.cols)}
    zeros = footprint - ones
    selected = set(ones)
    r_count = 0
    for y in sorted(zeros, key=lambda rc: (rc[0] + rc[1], rc[0])):
        if y in selected:
            continue
        shifted = {(x[0] + y[0], x[1] + y[1]) for x in ones}
        r_count += len(shifted & selected) + len(shifted - selected - footprint)
        selected |= shifted
    return CoiResult(r_count, len(footprint))


def filler_range(p: int) -> int:
    """Exclusive upper bound of random filler draws for modulus ``p``."""
    return 251 if p == 251 else 256


def select_coefficients(plan: TraversalPlan, m: int, image, rng=None, p: int = 257):
    """The ``k`` coefficients chosen at anchor ``m`` and a pixel/filler flag for each.

    Pixels are clamped to 250 when ``p`` is 251; fillers are uniform over the
    pixel values the field can carry.
    """
    image = check_image(image)
    if image.shape != (plan.height, plan.width):
        raise InvalidInputError(
            f"plan built for {plan.height}x{plan.width} image, got {image.shape[0]}x{image.shape[1]}"
        )
    rng = check_random_state(rng)
    cells = plan.cells[m]
    is_pixel = cells != FILLER
    flat = image.reshape(-1)
    values = np.empty(len(cells), dtype=np.int64)
    values[is_pixel] = flat[cells[is_pixel]]
    if p == 251:
        np.minimum(values, 250, out=values, where=is_pixel)
    values[~is_pixel] = rng.integers(0, filler_range(p), size=int((~is_pixel).sum()))
    return values, is_pixel
