"""Arithmetic and polynomial algebra over the prime fields GF(251) and GF(257).

Scalar functions work on plain ints and are what the tests reason about; the
``*_many`` helpers apply the same linear maps to whole coefficient streams with
numpy, which is how the sharing schemes use them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientSharesError, InvalidInputError, ParameterError

SUPPORTED_PRIMES = (251, 257)


@dataclass(frozen=True)
class PrimeField:
    """Residues modulo a small prime ``p``."""

    p: int

    def __post_init__(self):
        if self.p not in SUPPORTED_PRIMES:
            raise ParameterError(f"unsupported modulus {self.p}; expected one of {SUPPORTED_PRIMES}")

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        """Multiplicative inverse by the extended Euclidean algorithm."""
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse modulo {self.p}")
        old_r, r = a, self.p
        old_s, s = 1, 0
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
        return old_s % self.p

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))


GF251 = PrimeField(251)
GF257 = PrimeField(257)


@dataclass(frozen=True)
class Polynomial:
    """``d_0 + d_1 x + ... + d_{k-1} x^{k-1}`` with coefficients reduced mod p."""

    coeffs: tuple
    field: PrimeField

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) % self.field.p for c in self.coeffs))

    @property
    def k(self) -> int:
        return len(self.coeffs)

    def __call__(self, x: int) -> int:
        return poly_eval(self.coeffs, x, self.field)


def poly_eval(coeffs: Sequence[int], x: int, field: PrimeField) -> int:
    """Horner evaluation of the polynomial with ascending ``coeffs`` at ``x``."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % field.p
    return acc


def _check_xs(xs: Sequence[int], field: PrimeField) -> None:
    if len(set(xs)) != len(xs):
        raise InvalidInputError(f"evaluation points must be distinct, got {list(xs)}")
    for x in xs:
        if not 0 < x < field.p:
            raise InvalidInputError(f"evaluation point {x} outside [1, {field.p - 1}]")


def vandermonde_inverse(xs: Sequence[int], field: PrimeField) -> np.ndarray:
    """Inverse of the Vandermonde matrix ``V[i, j] = xs[i] ** j`` mod p.

    Column ``i`` holds the ascending coefficients of the Lagrange basis
    polynomial that is 1 at ``xs[i]`` and 0 at the other points, so
    ``coeffs = V^-1 @ ys`` recovers every coefficient, not only ``d_0``.
    """
    xs = [int(x) for x in xs]
    _check_xs(xs, field)
    p = field.p
    k = len(xs)
    out = np.zeros((k, k), dtype=np.int64)
    for i, xi in enumerate(xs):
        basis = [1]
        denom = 1
        for j, xj in enumerate(xs):
            if j == i:
                continue
            # multiply basis by (x - xj)
            nxt = [0] * (len(basis) + 1)
            for d, c in enumerate(basis):
                nxt[d] = (nxt[d] - xj * c) % p
                nxt[d + 1] = (nxt[d + 1] + c) % p
            basis = nxt
            denom = denom * (xi - xj) % p
        scale = field.inv(denom)
        out[:, i] = [c * scale % p for c in basis]
    return out


def power_matrix(xs: Sequence[int], k: int, field: PrimeField) -> np.ndarray:
    """``P[i, j] = xs[i] ** j`` mod p, shape ``(len(xs), k)``."""
    p = field.p
    out = np.ones((len(xs), k), dtype=np.int64)
    for j in range(1, k):
        out[:, j] = out[:, j - 1] * np.asarray(xs, dtype=np.int64) % p
    return out


def lagrange_interpolate(points: Iterable[tuple[int, int]], field: PrimeField, k: int | None = None) -> Polynomial:
    """Recover all coefficients of the degree < k polynomial through ``points``.

    With ``k`` given, the first ``k`` points are used and fewer raise
    :class:`InsufficientSharesError`; otherwise every point is used.
    """
    points = [(int(x), int(y)) for x, y in points]
    if k is None:
        k = len(points)
    if k < 1:
        raise ParameterError("need at least one coefficient")
    if len(points) < k:
        raise InsufficientSharesError(f"need {k} points, got {len(points)}")
    points = points[:k]
    xs = [x for x, _ in points]
    ys = np.array([y % field.p for _, y in points], dtype=np.int64)
    coeffs = vandermonde_inverse(xs, field) @ ys % field.p
    return Polynomial(tuple(int(c) for c in coeffs), field)


def evaluate_many(coeffs: np.ndarray, xs: Sequence[int], field: PrimeField) -> np.ndarray:
    """Evaluate ``M`` polynomials (rows of ``coeffs``, shape ``(M, k)``) at each x.

    Returns shape ``(len(xs), M)``.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    powers = power_matrix(xs, coeffs.shape[1], field)
    return powers @ coeffs.T % field.p


def interpolate_many(ys: np.ndarray, xs: Sequence[int], field: PrimeField) -> np.ndarray:
    """Recover coefficients of ``M`` polynomials from ``ys`` of shape ``(k, M)``.

    Returns shape ``(M, k)``.
    """
    ys = np.asarray(ys, dtype=np.int64)
    if ys.shape[0] != len(xs):
        raise InvalidInputError("need one row of share values per evaluation point")
    vinv = vandermonde_inverse(xs, field)
    return (vinv @ (ys % field.p) % field.p).T
