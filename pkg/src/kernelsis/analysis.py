"""Security and share-size measurements.

* the single-share correlation attack against Thien-Lin-style shares,
* the randomness ratio of a kernel over an image and its agreement with the
  coefficient of incidence across many kernels,
* guessing probabilities for kernel shares and image shares, with a
  Monte-Carlo check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._validation import check_image, check_random_state
from .baseline import FlatShare, thienlin_split
from .errors import AttackUndefinedError, CorrelationUndefinedError, ParameterError
from .field import PrimeField, poly_eval
from .kernel import Kernel, TraversalPlan, check_kernel, coefficient_of_incidence, generate_kernel, traversal_order
from .scheme import ShareBundle, split

CSV_HEADER = ("kernel_id", "k", "C", "image_pixels", "ratio")

_MODE_PRIME = {"shamir": 251, "thienlin251": 251, "wu257": 257}


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ValueError("samples differ in length")
    if a.size < 2 or a.std() == 0 or b.std() == 0:
        raise CorrelationUndefinedError("correlation is undefined for a zero-variance sample")
    return float(np.corrcoef(a, b)[0, 1])


@dataclass(frozen=True)
class AttackReport:
    estimated_image: np.ndarray
    pearson_correlation: float | None = None


def correlation_attack(
    share, k: int, p: int | None = None, *, width: int, height: int,
    plan: TraversalPlan | None = None, ground_truth=None,
) -> AttackReport:
    """Estimate the image from one share assuming all coefficients are equal.

    If a block's coefficients were all ``d``, its share value would be
    ``d * (1 + x + ... + x^(k-1))``; dividing by that sum in the field gives
    one estimate per block, painted onto all of the block's pixels.  Blocks
    are laid out sequentially unless ``plan`` gives the kernel traversal.
    """
    if isinstance(share, ShareBundle):
        share = FlatShare(share.x, np.frombuffer(share.image_share, dtype=np.uint8), share.mode)
    if p is None:
        p = _MODE_PRIME[share.mode]
    field = PrimeField(p)
    geometric = poly_eval([1] * k, share.x, field)
    if geometric == 0:
        raise AttackUndefinedError(f"1 + x + ... + x^{k - 1} vanishes mod {p} at x={share.x}")
    scale = field.inv(geometric)
    estimates = np.asarray(share.values, dtype=np.int64) * scale % p
    estimates = np.minimum(estimates, 255)

    n_pixels = width * height
    image = np.zeros(n_pixels, dtype=np.uint8)
    if plan is None:
        painted = np.repeat(estimates, k)[:n_pixels]
        image[: painted.size] = painted
    else:
        cells = plan.cells[: len(estimates)]
        is_px = cells >= 0
        image[cells[is_px]] = np.broadcast_to(estimates[: len(cells), None], cells.shape)[is_px]
    image = image.reshape(height, width)

    corr = None
    if ground_truth is not None:
        corr = pearson(image, check_image(ground_truth, name="ground_truth"))
    return AttackReport(image, corr)


def compare_attack(image, kernel: Kernel, n: int | None = None, rng=None) -> tuple[float, float]:
    """Attack correlation on share x=1 under Thien-Lin and under the kernel scheme.

    The kernel-scheme attacker is handed the traversal plan, so any drop in
    correlation comes from the fillers rather than from not knowing the layout.
    """
    image = check_image(image)
    height, width = image.shape
    k = kernel.k
    n = n or k
    tl = thienlin_split(image, k, n)[0]
    r_tl = correlation_attack(tl, k, width=width, height=height, ground_truth=image).pearson_correlation
    bundle = split(image, kernel, k, n, mode="thienlin251", rng=rng)[0]
    plan = traversal_order(kernel, width, height)
    r_kernel = correlation_attack(
        bundle, k, width=width, height=height, plan=plan, ground_truth=image
    ).pearson_correlation
    return r_tl, r_kernel


@dataclass(frozen=True)
class ExperimentRow:
    kernel_id: int
    k: int
    C: Fraction
    image_pixels: int
    ratio: float

    def as_csv(self) -> tuple:
        return (self.kernel_id, self.k, f"{float(self.C):.6f}", self.image_pixels, f"{self.ratio:.6f}")


def randomness_ratio(kernel: Kernel, width: int, height: int, kernel_id: int = 0, C: Fraction | None = None) -> ExperimentRow:
    """Random fillers per image pixel when ``kernel`` traverses a ``height x width`` image."""
    check_kernel(kernel)
    plan = traversal_order(kernel, width, height)
    if C is None:
        C = coefficient_of_incidence(kernel).value
    return ExperimentRow(kernel_id, kernel.k, C, width * height, plan.filler_count / (width * height))


def c_ratio_experiment(
    samples: int = 100,
    kernel_dims: tuple[int, int] = (45, 45),
    k_range: tuple[int, int] = (2, 8),
    image_sizes=(32, 64, 128, 256),
    rng=None,
    kernels=None,
) -> tuple[list[ExperimentRow], float]:
    """Draw kernels, measure their C and their randomness ratio on square images.

    Returns one row per (kernel, image side) and the Pearson correlation
    between C and ratio over all rows.  ``k`` is drawn uniformly from the
    inclusive ``k_range`` per kernel; pass ``kernels`` to use fixed ones.
    """
    if kernels is None:
        if samples < 2:
            raise ParameterError("need at least two kernels")
        rng = check_random_state(rng)
        rows_, cols_ = kernel_dims
        kernels = [
            generate_kernel(rows_, cols_, int(rng.integers(k_range[0], k_range[1] + 1)), rng=rng)
            for _ in range(samples)
        ]
    elif len(kernels) < 2:
        raise ParameterError("need at least two kernels")
    rows = []
    for kid, kernel in enumerate(kernels):
        c = coefficient_of_incidence(kernel).value
        for side in image_sizes:
            rows.append(randomness_ratio(kernel, side, side, kernel_id=kid, C=c))
    return rows, pearson([float(r.C) for r in rows], [r.ratio for r in rows])


def write_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())


class GuessProbabilities(NamedTuple):
    log2_kernel: float
    log2_image: float


def guess_probabilities(k: int, S: int, M: int, p: int) -> GuessProbabilities:
    """Base-2 logs of the chance of guessing a kernel share and an image share.

    A kernel share carries ``S / k`` bits, so a blind guess succeeds with
    ``2^-(S/k)``; the image share is ``M / k`` independent field elements.
    """
    if min(k, S, M) < 1:
        raise ParameterError("k, S and M must be positive")
    if p < 2:
        raise ParameterError("p must be at least 2")
    return GuessProbabilities(-S / k, -(M / k) * math.log2(p))


def monte_carlo_guess(bits: int = 8, trials: int = 10**6, rng=None) -> tuple[int, int]:
    """Guess a random ``bits``-bit kernel share uniformly ``trials`` times; return (hits, trials)."""
    rng = check_random_state(rng)
    secret = rng.integers(0, 2, size=bits)
    weights = 1 << np.arange(bits)
    target = int(secret @ weights)
    guesses = rng.integers(0, 2, size=(trials, bits), dtype=np.int64) @ weights
    return int((guesses == target).sum()), trials
