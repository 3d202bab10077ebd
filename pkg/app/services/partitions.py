"""Odd-part partitions: normalizations, part insertion and removal, enumeration.

A partition is stored as its weakly decreasing tuple of parts; multiplicities
and hook indices are derived views. The same tuple labels a Fock basis
monomial, since the part ``k`` is also the doubled index of ``z_{k/2}``.
"""

from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial, prod
from typing import Literal

from app.core.exceptions import PartitionError
from app.core.logging import get_logger

logger = get_logger(__name__)

PartitionFilter = Literal[
    "all", "even_length", "even_multiplicities", "distinct_ev", "distinct_odd"
]


@dataclass(frozen=True, eq=False)
class OddPartition:
    """Partition into odd positive parts, stored weakly decreasing."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        for part in parts:
            if not isinstance(part, int) or part <= 0 or part % 2 == 0:
                raise PartitionError(
                    f"Partition parts must be odd positive integers, got {part!r}"
                )
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise PartitionError(f"Partition parts must be weakly decreasing: {parts}")

    @classmethod
    def parse(cls, text: str) -> "OddPartition":
        """Read ``"5,3,1,1"``; the empty string is the empty partition."""
        raw = text.strip()
        if not raw:
            return cls(())
        try:
            parts = tuple(int(piece) for piece in raw.split(","))
        except ValueError:
            raise PartitionError(f"Malformed partition: {text!r}", "use e.g. 5,3,1,1")
        return cls(parts)

    @classmethod
    def from_multiplicities(cls, multiplicities: dict[int, int]) -> "OddPartition":
        parts: list[int] = []
        for part in sorted(multiplicities, reverse=True):
            parts.extend([part] * multiplicities[part])
        return cls(tuple(parts))

    def __str__(self) -> str:
        return ",".join(str(part) for part in self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OddPartition):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __lt__(self, other: "OddPartition") -> bool:
        return (self.weight, self.parts) < (other.weight, other.parts)

    @property
    def weight(self) -> int:
        """Size ``|λ|``; the Fock weight of the matching state is half of it."""
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @cached_property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    @property
    def hook_indices(self) -> tuple[int, ...]:
        """The ``n_i`` with ``λ_i = 2 n_i + 1``."""
        return tuple((part - 1) // 2 for part in self.parts)

    @property
    def is_distinct(self) -> bool:
        return len(set(self.parts)) == len(self.parts)

    def contains(self, other: "OddPartition") -> bool:
        """Multiset inclusion ``other ⊆ self``."""
        mine = self.multiplicities
        return all(mine.get(part, 0) >= m for part, m in other.multiplicities.items())

    def frequency_notation(self) -> str:
        """Exponential notation, e.g. ``3 1^2`` for ``(3,1,1)``."""
        if not self.parts:
            return "0"
        pieces = []
        for part in sorted(self.multiplicities, reverse=True):
            m = self.multiplicities[part]
            pieces.append(f"{part}^{m}" if m > 1 else str(part))
        return " ".join(pieces)


class DistinctOddPartition(OddPartition):
    """Odd partition whose parts are strictly decreasing."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.is_distinct:
            raise PartitionError(f"Parts must be distinct: {self.parts}")

    @property
    def is_even_length(self) -> bool:
        return self.length % 2 == 0


def parse_partition(text: str) -> OddPartition:
    return OddPartition.parse(text)


def d_squared(partition: OddPartition) -> Fraction:
    """Normalization ``D_λ = (-1)^((|λ|-ℓ)/2) * prod(m_i!)``."""
    sign = -1 if ((partition.weight - partition.length) // 2) % 2 else 1
    return Fraction(sign * prod(factorial(m) for m in partition.multiplicities.values()))


def d_squared_variants(partition: OddPartition) -> tuple[Fraction, Fraction, Fraction]:
    """The three equivalent closed forms of ``D_λ``."""
    mults = partition.multiplicities
    base = prod(factorial(m) for m in mults.values())
    by_weight = d_squared(partition)
    by_hooks = Fraction((-1) ** sum(partition.hook_indices) * base)
    by_residue = Fraction(
        base * (-1) ** sum(m for part, m in mults.items() if part % 4 == 3)
    )
    return by_weight, by_hooks, by_residue


def add_part(alpha: DistinctOddPartition, nu: int) -> DistinctOddPartition:
    """Insert the odd part ``nu`` at its decreasing position."""
    if nu in alpha.parts:
        raise PartitionError(f"Part {nu} is already present in ({alpha})")
    return DistinctOddPartition(tuple(sorted(alpha.parts + (nu,), reverse=True)))


def remove_part(alpha: DistinctOddPartition, position: int) -> DistinctOddPartition:
    """Delete the part at 1-based ``position``."""
    if not 1 <= position <= alpha.length:
        raise PartitionError(
            f"Position {position} out of range for ({alpha})",
            f"length is {alpha.length}",
        )
    parts = alpha.parts[: position - 1] + alpha.parts[position:]
    return DistinctOddPartition(parts)


def insertion_sign(nu: int, alpha: DistinctOddPartition) -> int:
    """``(-1)`` to the number of parts of ``alpha`` exceeding ``nu``."""
    if nu in alpha.parts:
        raise PartitionError(f"Part {nu} is already present in ({alpha})")
    return -1 if sum(1 for part in alpha.parts if part > nu) % 2 else 1


def _odd_partitions_of(n: int, largest: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()]
    out: list[tuple[int, ...]] = []
    top = min(n, largest)
    if top % 2 == 0:
        top -= 1
    for part in range(top, 0, -2):
        for rest in _odd_partitions_of(n - part, part):
            out.append((part,) + rest)
    return out


def odd_partitions_of(n: int) -> list[OddPartition]:
    """All odd partitions of ``n``, lexicographically increasing."""
    return [OddPartition(parts) for parts in sorted(_odd_partitions_of(n, n))]


def _accepts(partition: OddPartition, kind: PartitionFilter) -> bool:
    if kind == "all":
        return True
    if kind == "even_length":
        return partition.length % 2 == 0
    if kind == "even_multiplicities":
        return all(m % 2 == 0 for m in partition.multiplicities.values())
    if kind == "distinct_ev":
        return partition.is_distinct and partition.length % 2 == 0
    if kind == "distinct_odd":
        return partition.is_distinct and partition.length % 2 == 1
    raise PartitionError(f"Unknown partition filter: {kind!r}")


def enumerate_op(
    max_weight: int, kind: PartitionFilter = "all"
) -> list[OddPartition]:
    """Qualifying odd partitions of size at most ``max_weight``, by size then parts."""
    if max_weight < 0:
        raise PartitionError(f"max_weight must be non-negative, got {max_weight}")
    out = []
    for n in range(max_weight + 1):
        for partition in odd_partitions_of(n):
            if _accepts(partition, kind):
                if kind.startswith("distinct"):
                    partition = DistinctOddPartition(partition.parts)
                out.append(partition)
    return out


def enumerate_fock_basis(weight2: int) -> list[OddPartition]:
    """Monomials of the polynomial Fock realization with doubled weight ``weight2``."""
    return odd_partitions_of(weight2)


def _series_mul(a: list[int], b: list[int], order: int) -> list[int]:
    out = [0] * (order + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(order + 1 - i):
                out[i + j] += x * b[j]
    return out


def _product_series(factors: list[list[int]], order: int) -> list[int]:
    result = [1] + [0] * order
    for factor in factors:
        result = _series_mul(result, factor, order)
    return result


def q_dimension_check(cap: Fraction | int) -> bool:
    """Check both Fock space characters against state enumeration.

    Series are in ``x = q^(1/2)``, so every exponent is a doubled weight.
    """
    order = int(2 * Fraction(cap))
    counts = [len(enumerate_fock_basis(n)) for n in range(order + 1)]

    # 1/(1 - x^k) over odd k
    inverse_factors = [
        [1 if i % k == 0 else 0 for i in range(order + 1)]
        for k in range(1, order + 1, 2)
    ]
    character = _product_series(inverse_factors, order)

    # 1 - q^n = 1 - x^(2n) over odd n
    heisenberg_inverse = [
        [1 if i == 0 else (-1 if i == 2 * n else 0) for i in range(order + 1)]
        for n in range(1, order // 2 + 1, 2)
    ]
    quotient = _product_series([character, *heisenberg_inverse], order)
    fermionic = _product_series(
        [
            [1 if i in (0, k) else 0 for i in range(order + 1)]
            for k in range(1, order + 1, 2)
        ],
        order,
    )
    logger.debug(f"q-dimension counts up to doubled weight {order}: {counts}")
    return counts == character and quotient == fermionic


def fock_dimensions(cap: Fraction | int) -> list[int]:
    """``dim F_k`` for doubled weights ``0..2*cap``."""
    return [len(enumerate_fock_basis(n)) for n in range(int(2 * Fraction(cap)) + 1)]
