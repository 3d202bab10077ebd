"""Exact Pfaffians and Hafnians over any commutative coefficient ring."""

import random
from collections.abc import Callable, Sequence
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Any, TypeVar

from app.core.exceptions import MatrixError
from app.core.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
Matrix = Sequence[Sequence[T]]


def _check_even_square(matrix: Matrix[Any], what: str) -> int:
    order = len(matrix)
    if any(len(row) != order for row in matrix):
        raise MatrixError(f"{what} needs a square matrix")
    if order % 2:
        raise MatrixError(f"{what} needs an even order, got {order}")
    return order


def _matching_sum(
    matrix: Matrix[T], one: T, signed: bool
) -> T:
    """Sum over perfect matchings, pairing the lowest free index first.

    Sub-results are memoized on the bitmask of still unmatched indices.
    """
    order = len(matrix)

    @lru_cache(maxsize=None)
    def expand(mask: int) -> Any:
        if mask == 0:
            return one
        first = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << first)
        total: Any = None
        position = 0
        for j in range(first + 1, order):
            if not rest >> j & 1:
                continue
            entry = matrix[first][j]
            if entry:
                term = entry * expand(rest & ~(1 << j))
                if signed and position % 2:
                    term = -term
                total = term if total is None else total + term
            position += 1
        return one - one if total is None else total

    result = expand((1 << order) - 1)
    logger.debug(
        f"{'Pfaffian' if signed else 'Hafnian'} of order {order}: "
        f"{expand.cache_info().currsize} sub-masks"
    )
    return result


def pfaffian(matrix: Matrix[T], one: Any = Fraction(1)) -> T:
    """Pfaffian of a skew-symmetric matrix of even order."""
    order = _check_even_square(matrix, "Pfaffian")
    for i in range(order):
        if matrix[i][i]:
            raise MatrixError("Pfaffian needs a zero diagonal", f"entry ({i},{i})")
        for j in range(i + 1, order):
            if matrix[i][j] != -matrix[j][i]:  # type: ignore[operator]
                raise MatrixError(
                    "Pfaffian needs a skew-symmetric matrix", f"entries ({i},{j})"
                )
    return _matching_sum(matrix, one, signed=True)


def hafnian(matrix: Matrix[T], one: Any = Fraction(1)) -> T:
    """Hafnian of a matrix of even order; only the upper triangle is read."""
    _check_even_square(matrix, "Hafnian")
    return _matching_sum(matrix, one, signed=False)


def matching_count(order: int) -> int:
    """Number of perfect matchings ``(order-1)!!``, i.e. Hafnian terms."""
    if order % 2:
        raise MatrixError(f"Order must be even, got {order}")
    return prod(range(order - 1, 0, -2))


def build_matrix(points: Sequence[T], entry: Callable[[T, T], Any]) -> list[list[Any]]:
    """Matrix ``entry(p_i, p_j)`` off the diagonal, zero on it."""
    n = len(points)
    return [
        [Fraction(0) if i == j else entry(points[i], points[j]) for j in range(n)]
        for i in range(n)
    ]


def _check_points(points: Sequence[Fraction]) -> None:
    if len(points) % 2:
        raise MatrixError(f"Need an even number of points, got {len(points)}")
    if len(set(points)) != len(points):
        raise MatrixError("Points must be distinct", f"points {points}")
    for i, a in enumerate(points):
        for b in points[i:]:
            if a + b == 0:
                raise MatrixError("Points must satisfy z_i + z_j != 0")


def pf_hf_sides(points: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Both sides of ``Pf[(z_i-z_j)/(z_i+z_j)^2] = prod((z_i-z_j)/(z_i+z_j)) Hf[1/(z_i+z_j)]``."""
    zs = [Fraction(z) for z in points]
    _check_points(zs)
    left = pfaffian(build_matrix(zs, lambda a, b: (a - b) / (a + b) ** 2))
    prefactor = prod(
        ((zs[i] - zs[j]) / (zs[i] + zs[j]) for i in range(len(zs)) for j in range(i + 1, len(zs))),
        start=Fraction(1),
    )
    right = prefactor * hafnian(build_matrix(zs, lambda a, b: 1 / (a + b)))
    return left, right


def verify_pf_hf_identity(points: Sequence[Fraction]) -> bool:
    left, right = pf_hf_sides(points)
    return left == right


def random_points(count: int, rng: random.Random, bound: int = 20) -> list[Fraction]:
    """Distinct positive rationals ``p/q`` with ``1 <= p, q <= bound``."""
    found: list[Fraction] = []
    while len(found) < count:
        z = Fraction(rng.randint(1, bound), rng.randint(1, bound))
        if z not in found:
            found.append(z)
    return found
