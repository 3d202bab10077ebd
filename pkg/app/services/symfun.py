"""Symmetric functions of the odd-time alphabet and (super) Miwa substitutions."""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from app.core.exceptions import ValidationError
from app.core.logging import get_logger
from app.services.ring import (
    Gen,
    Scalar,
    SuperPoly,
    substitute,
    to_doubled,
)

logger = get_logger(__name__)

EvenTimes = Mapping[int, SuperPoly]


def _as_poly(value: SuperPoly | Scalar) -> SuperPoly:
    return SuperPoly.coerce(value)


@dataclass(frozen=True)
class TimeVector:
    """Values of the even times ``t_j`` and the odd times ``t_{k/2}``.

    Missing entries are zero. Odd entries must be Grassmann-odd.
    """

    even: Mapping[int, SuperPoly] = field(default_factory=dict)
    odd: Mapping[int, SuperPoly] = field(default_factory=dict)

    @classmethod
    def formal(cls, cap: Scalar, alphabet: str = "t", odd: bool = True) -> "TimeVector":
        """Generators of ``alphabet`` up to weight ``cap``."""
        cap2 = to_doubled(cap)
        even = {j: SuperPoly.gen(alphabet, j) for j in range(1, cap2 // 2 + 1, 2)}
        odd_times = (
            {k: SuperPoly.gen(alphabet, k, odd=True) for k in range(1, cap2 + 1, 2)}
            if odd
            else {}
        )
        return cls(even, odd_times)

    @classmethod
    def numeric(
        cls,
        even: Mapping[int, Scalar] | None = None,
        odd: Mapping[int, SuperPoly] | None = None,
    ) -> "TimeVector":
        return cls(
            {j: _as_poly(v) for j, v in (even or {}).items()},
            dict(odd or {}),
        )

    def __add__(self, other: "TimeVector") -> "TimeVector":
        even = dict(self.even)
        for j, v in other.even.items():
            even[j] = even.get(j, SuperPoly.zero()) + v
        odd = dict(self.odd)
        for k, v in other.odd.items():
            odd[k] = odd.get(k, SuperPoly.zero()) + v
        return TimeVector(even, odd)

    def negate(self) -> "TimeVector":
        return TimeVector(
            {j: -v for j, v in self.even.items()}, {k: -v for k, v in self.odd.items()}
        )

    def even_only(self) -> "TimeVector":
        return TimeVector(dict(self.even), {})

    def evaluate(self, p: SuperPoly, alphabet: str = "t", cap: Scalar | None = None) -> SuperPoly:
        """Substitute this vector for the times of ``alphabet`` in ``p``."""

        def image(gen: Gen, odd: bool) -> SuperPoly | None:
            if gen[0] != alphabet:
                return None
            table = self.odd if odd else self.even
            return table.get(gen[1], SuperPoly.zero())

        return substitute(p, image, cap)


def formal_even_times(cap: Scalar, alphabet: str = "t") -> dict[int, SuperPoly]:
    return dict(TimeVector.formal(cap, alphabet, odd=False).even)


def _times_key(t: EvenTimes | TimeVector) -> tuple[tuple[int, SuperPoly], ...]:
    table = t.even if isinstance(t, TimeVector) else t
    return tuple(sorted((j, _as_poly(v)) for j, v in table.items() if v))


@lru_cache(maxsize=256)
def _generating_sequence(
    key: tuple[tuple[int, SuperPoly], ...], n_max: int, elementary: bool
) -> tuple[SuperPoly, ...]:
    # n a_n = sum_k k t_k a_{n-k}, with (-1)^(k+1) signs for e_n
    times = dict(key)
    seq = [SuperPoly.one()]
    for n in range(1, n_max + 1):
        acc = SuperPoly.zero()
        for k in range(1, n + 1):
            tk = times.get(k)
            if tk is None:
                continue
            c = Fraction(k if not elementary or k % 2 else -k, n)
            acc = acc + (tk * seq[n - k]).scale(c)
        seq.append(acc)
    return tuple(seq)


def complete_h(n: int, t: EvenTimes | TimeVector) -> SuperPoly:
    """``h_n`` from ``exp(sum_k t_k z^k) = sum_n h_n z^n``."""
    if n < 0:
        return SuperPoly.zero()
    return _generating_sequence(_times_key(t), n, False)[n]


def elementary_e(n: int, t: EvenTimes | TimeVector) -> SuperPoly:
    """``e_n`` from ``exp(-sum_k t_k (-z)^k) = sum_n e_n z^n``; equals ``h_n`` on odd times."""
    if n < 0:
        return SuperPoly.zero()
    return _generating_sequence(_times_key(t), n, True)[n]


def hook_schur(n1: int, n2: int, t: EvenTimes | TimeVector) -> SuperPoly:
    """Hook Schur function ``s_(n1|n2) = sum_i (-1)^i h_{n1+1+i} e_{n2-i}``."""
    total = SuperPoly.zero()
    for i in range(n2 + 1):
        term = complete_h(n1 + 1 + i, t) * elementary_e(n2 - i, t)
        total = total + (term if i % 2 == 0 else -term)
    return total


def miwa_even(
    xs: Sequence[SuperPoly | Scalar], n_max: int
) -> dict[int, SuperPoly]:
    """``t_n = (2/n) sum_i x_i^n`` for odd ``n <= n_max``."""
    points = [_as_poly(x) for x in xs]
    times: dict[int, SuperPoly] = {}
    for n in range(1, n_max + 1, 2):
        total = SuperPoly.zero()
        for x in points:
            total = total + x**n
        if total:
            times[n] = total.scale(Fraction(2, n))
    return times


@dataclass(frozen=True)
class SuperMiwaPoint:
    """Pairs ``(x_i, zeta_i)`` with ``x_i = 1/z_i`` and odd tags ``zeta_i``."""

    inverse_points: tuple[SuperPoly, ...]
    tags: tuple[SuperPoly, ...]

    def __post_init__(self) -> None:
        if len(self.inverse_points) != len(self.tags):
            raise ValidationError("Each Miwa point needs exactly one odd tag")
        for tag in self.tags:
            if tag and tag.parity() != 1:
                raise ValidationError("Miwa tags must be Grassmann-odd")

    @classmethod
    def from_points(
        cls, zs: Sequence[Scalar], tags: Sequence[SuperPoly]
    ) -> "SuperMiwaPoint":
        """Rational points ``z_i``; zero is rejected."""
        for z in zs:
            if Fraction(z) == 0:
                raise ValidationError("Super Miwa points must be nonzero")
        return cls(tuple(SuperPoly.const(1 / Fraction(z)) for z in zs), tuple(tags))

    @classmethod
    def formal(
        cls, count: int, point_alphabet: str = "x", tag_alphabet: str = "zeta"
    ) -> "SuperMiwaPoint":
        """Formal inverse points ``x_i`` and tags ``zeta_i``, ``i = 1..count``."""
        return cls(
            tuple(SuperPoly.gen(point_alphabet, i) for i in range(1, count + 1)),
            tuple(SuperPoly.gen(tag_alphabet, i, odd=True) for i in range(1, count + 1)),
        )


def super_miwa(point: SuperMiwaPoint, cap: Scalar) -> TimeVector:
    """``t_j = (2/j) sum x_i^j`` and ``t_{n+1/2} = 2 sum zeta_i x_i^n`` up to weight ``cap``."""
    cap2 = to_doubled(cap)
    even = miwa_even(point.inverse_points, cap2 // 2)
    odd: dict[int, SuperPoly] = {}
    for k in range(1, cap2 + 1, 2):
        n = (k - 1) // 2
        total = SuperPoly.zero()
        for x, tag in zip(point.inverse_points, point.tags):
            total = total + tag * x**n
        if total:
            odd[k] = total.scale(2)
    return TimeVector(even, odd)
