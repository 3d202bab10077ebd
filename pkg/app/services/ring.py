"""Exact supercommutative polynomial ring, truncated series and Laurent polynomials.

Every computation in the package happens in :class:`SuperPoly`, a polynomial
ring over the rationals with commuting (even) and anticommuting (odd)
generators. A generator is an ``(alphabet, index)`` pair. In the time
alphabets ``t`` and ``s`` an even generator with index ``j`` is the time
``t_j`` (``j`` odd) and an odd generator with index ``k`` is the Grassmann
time ``t_{k/2}``; all grading is done on doubled weights so that it stays
integral.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator, Mapping
from fractions import Fraction
from math import factorial
from types import MappingProxyType
from typing import Any, Generic, TypeVar

from app.core.exceptions import GradingError, SeriesError, ValidationError
from app.core.logging import get_logger

logger = get_logger(__name__)

Gen = tuple[str, int]
EvenPart = tuple[tuple[Gen, int], ...]
OddPart = tuple[Gen, ...]
Monomial = tuple[EvenPart, OddPart]
Scalar = Fraction | int

UNIT: Monomial = ((), ())
TIME_ALPHABETS = frozenset({"t", "s"})
MIWA_ALPHABETS = frozenset({"x", "xb"})
TAG_ALPHABETS = frozenset({"zeta", "zetab"})


def generator_weight2(gen: Gen, odd: bool) -> int:
    """Doubled weight of a generator."""
    alphabet, index = gen
    if alphabet in TIME_ALPHABETS:
        return index if odd else 2 * index
    if alphabet in MIWA_ALPHABETS:
        return 2
    if alphabet in TAG_ALPHABETS:
        return 1
    return 0


def monomial_weight2(m: Monomial, alphabets: Iterable[str] | None = None) -> int:
    """Doubled weight of a monomial, counted over ``alphabets`` (all if None)."""
    selected = None if alphabets is None else frozenset(alphabets)
    even, odd = m
    total = 0
    for gen, e in even:
        if selected is None or gen[0] in selected:
            total += e * generator_weight2(gen, False)
    for gen in odd:
        if selected is None or gen[0] in selected:
            total += generator_weight2(gen, True)
    return total


def _merge_even(a: EvenPart, b: EvenPart) -> EvenPart:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for gen, e in b:
        merged[gen] = merged.get(gen, 0) + e
    return tuple(sorted(merged.items()))


def monomial_mul(a: Monomial, b: Monomial) -> tuple[int, Monomial] | None:
    """Product of two monomials as ``(sign, monomial)``; None when it vanishes."""
    odd_a, odd_b = a[1], b[1]
    if odd_a and odd_b:
        if not set(odd_a).isdisjoint(odd_b):
            return None
        inversions = sum(1 for x in odd_a for y in odd_b if y < x)
        sign = -1 if inversions % 2 else 1
        odd = tuple(sorted(odd_a + odd_b))
    else:
        sign = 1
        odd = odd_a or odd_b
    return sign, (_merge_even(a[0], b[0]), odd)


class SuperPoly:
    """Immutable supercommutative polynomial with exact rational coefficients."""

    __slots__ = ("_terms",)

    _terms: dict[Monomial, Fraction]

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None) -> None:
        self._terms = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self._terms[m] = Fraction(c)

    @classmethod
    def _wrap(cls, terms: dict[Monomial, Fraction]) -> SuperPoly:
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls) -> SuperPoly:
        return cls._wrap({})

    @classmethod
    def one(cls) -> SuperPoly:
        return cls._wrap({UNIT: Fraction(1)})

    @classmethod
    def const(cls, c: Scalar) -> SuperPoly:
        return cls._wrap({UNIT: Fraction(c)} if c else {})

    @classmethod
    def gen(cls, alphabet: str, index: int, odd: bool = False) -> SuperPoly:
        """A single generator."""
        if odd:
            return cls._wrap({((), ((alphabet, index),)): Fraction(1)})
        return cls._wrap({((((alphabet, index), 1),), ()): Fraction(1)})

    @classmethod
    def coerce(cls, value: SuperPoly | Scalar) -> SuperPoly:
        if isinstance(value, SuperPoly):
            return value
        return cls.const(value)

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SuperPoly):
            return self._terms == other._terms
        if isinstance(other, int | Fraction):
            return self._terms == SuperPoly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __neg__(self) -> SuperPoly:
        return SuperPoly._wrap({m: -c for m, c in self._terms.items()})

    def __add__(self, other: SuperPoly | Scalar) -> SuperPoly:
        if not isinstance(other, SuperPoly | int | Fraction):
            return NotImplemented
        other = SuperPoly.coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return SuperPoly._wrap(out)

    __radd__ = __add__

    def __sub__(self, other: SuperPoly | Scalar) -> SuperPoly:
        if not isinstance(other, SuperPoly | int | Fraction):
            return NotImplemented
        return self + (-SuperPoly.coerce(other))

    def __rsub__(self, other: SuperPoly | Scalar) -> SuperPoly:
        return SuperPoly.coerce(other) + (-self)

    def scale(self, c: Scalar) -> SuperPoly:
        if not c:
            return SuperPoly.zero()
        c = Fraction(c)
        return SuperPoly._wrap({m: v * c for m, v in self._terms.items()})

    def __mul__(self, other: SuperPoly | Scalar) -> SuperPoly:
        if isinstance(other, int | Fraction):
            return self.scale(other)
        if not isinstance(other, SuperPoly):
            return NotImplemented
        if not self._terms or not other._terms:
            return SuperPoly.zero()
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                prod = monomial_mul(ma, mb)
                if prod is None:
                    continue
                sign, m = prod
                v = out.get(m, 0) + (ca * cb if sign > 0 else -ca * cb)
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return SuperPoly._wrap(out)

    def __rmul__(self, other: Scalar) -> SuperPoly:
        if isinstance(other, int | Fraction):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> SuperPoly:
        result = SuperPoly.one()
        for _ in range(n):
            result = result * self
        return result

    def constant_term(self) -> Fraction:
        return self._terms.get(UNIT, Fraction(0))

    def is_constant(self) -> bool:
        return all(m == UNIT for m in self._terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def parity(self) -> int | None:
        """Grassmann parity (0 or 1) of a homogeneous element, None otherwise."""
        parities = {len(m[1]) % 2 for m in self._terms}
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    def weights2(self, alphabets: Iterable[str] | None = None) -> set[int]:
        selected = None if alphabets is None else tuple(alphabets)
        return {monomial_weight2(m, selected) for m in self._terms}

    def generators(self) -> set[tuple[Gen, bool]]:
        found: set[tuple[Gen, bool]] = set()
        for even, odd in self._terms:
            found.update((g, False) for g, _ in even)
            found.update((g, True) for g in odd)
        return found

    def __repr__(self) -> str:
        return f"SuperPoly({format_poly(self)!r})"


def poly_add(a: SuperPoly, b: SuperPoly) -> SuperPoly:
    """Coefficientwise sum."""
    return a + b


def poly_mul(a: SuperPoly, b: SuperPoly) -> SuperPoly:
    """Supercommutative product."""
    return a * b


def to_doubled(cap: Scalar) -> int:
    """Doubled integer form of a non-negative half-integer cap."""
    value = Fraction(cap)
    if value < 0 or (2 * value).denominator != 1:
        raise ValidationError(f"Cap must be a non-negative half-integer, got {cap}")
    return int(2 * value)


def truncate_weight(
    p: SuperPoly, cap: Scalar, alphabets: Iterable[str] | None = None
) -> SuperPoly:
    """Drop every monomial whose weight over ``alphabets`` exceeds ``cap``."""
    return truncate_weight2(p, to_doubled(cap), alphabets)


def truncate_weight2(
    p: SuperPoly, cap2: int, alphabets: Iterable[str] | None = None
) -> SuperPoly:
    selected = None if alphabets is None else tuple(alphabets)
    return SuperPoly._wrap(
        {m: c for m, c in p.items() if monomial_weight2(m, selected) <= cap2}
    )


def _check_series_argument(p: SuperPoly, alphabets: tuple[str, ...] | None) -> None:
    if p.constant_term():
        raise SeriesError(
            "Series argument has a nonzero constant term",
            f"constant term {p.constant_term()}",
        )
    for m in p.terms:
        if monomial_weight2(m, alphabets) <= 0:
            raise SeriesError(
                "Series argument has a summand of non-positive weight",
                f"monomial {format_monomial(m)}",
            )


def series_truncated(
    p: SuperPoly,
    coefficients: Callable[[int], Fraction],
    cap: Scalar,
    alphabets: Iterable[str] | None = None,
) -> SuperPoly:
    """Sum of ``coefficients(m) * p**m`` truncated at weight ``cap``.

    The series terminates because every monomial of ``p`` has positive weight
    over the selected alphabets.
    """
    selected = None if alphabets is None else tuple(alphabets)
    _check_series_argument(p, selected)
    cap2 = to_doubled(cap)
    result = SuperPoly.zero()
    power = SuperPoly.one()
    m = 0
    while power:
        c = coefficients(m)
        if c:
            result = result + power.scale(c)
        m += 1
        power = truncate_weight2(power * p, cap2, selected)
    return result


def exp_truncated(
    p: SuperPoly, cap: Scalar, alphabets: Iterable[str] | None = None
) -> SuperPoly:
    """``exp(p)`` truncated at weight ``cap``; ``p`` must have zero constant term."""
    return series_truncated(p, lambda m: Fraction(1, factorial(m)), cap, alphabets)


def binomial(exponent: Fraction, m: int) -> Fraction:
    """Generalized binomial coefficient ``C(exponent, m)``."""
    value = Fraction(1)
    for i in range(m):
        value *= (exponent - i) / (i + 1)
    return value


def power_truncated(
    p: SuperPoly, exponent: Scalar, cap: Scalar, alphabets: Iterable[str] | None = None
) -> SuperPoly:
    """``(1 + p)**exponent`` by the binomial series, truncated at weight ``cap``."""
    e = Fraction(exponent)
    return series_truncated(p, lambda m: binomial(e, m), cap, alphabets)


def inverse_truncated(
    p: SuperPoly, cap: Scalar, alphabets: Iterable[str] | None = None
) -> SuperPoly:
    """Multiplicative inverse of ``p`` truncated at weight ``cap``.

    The weight-zero part of ``p`` must be a nonzero rational.
    """
    selected = None if alphabets is None else tuple(alphabets)
    head = {m: c for m, c in p.items() if monomial_weight2(m, selected) == 0}
    if set(head) - {UNIT} or UNIT not in head:
        raise SeriesError(
            "Cannot invert a series whose leading part is not a nonzero constant"
        )
    c0 = head[UNIT]
    rest = (p - c0).scale(1 / c0)
    return series_truncated(
        rest, lambda m: Fraction((-1) ** m) / c0, cap, selected
    )


def substitute(
    p: SuperPoly,
    image: Callable[[Gen, bool], SuperPoly | None],
    cap: Scalar | None = None,
    alphabets: Iterable[str] | None = None,
) -> SuperPoly:
    """Apply the ring homomorphism sending each generator to ``image(gen, odd)``.

    Generators for which ``image`` returns None are kept. Odd generators must
    be sent to odd elements; they are multiplied in canonical order.
    """
    selected = None if alphabets is None else tuple(alphabets)
    cap2 = None if cap is None else to_doubled(cap)

    def clip(q: SuperPoly) -> SuperPoly:
        return q if cap2 is None else truncate_weight2(q, cap2, selected)

    cache: dict[tuple[Gen, bool], SuperPoly] = {}

    def lookup(gen: Gen, odd: bool) -> SuperPoly:
        key = (gen, odd)
        if key not in cache:
            img = image(gen, odd)
            cache[key] = SuperPoly.gen(gen[0], gen[1], odd) if img is None else img
        return cache[key]

    result = SuperPoly.zero()
    for (even, odd), c in p.items():
        term = SuperPoly.const(c)
        for gen, e in even:
            base = lookup(gen, False)
            for _ in range(e):
                term = clip(term * base)
                if not term:
                    break
        for gen in odd:
            if not term:
                break
            term = clip(term * lookup(gen, True))
        result = result + term
    return result


def _map_monomials(p: SuperPoly, sign: Callable[[Monomial], int]) -> SuperPoly:
    return SuperPoly._wrap({m: c if sign(m) > 0 else -c for m, c in p.items()})


def grade_involution(p: SuperPoly) -> SuperPoly:
    """Multiply every Grassmann-odd monomial by -1."""
    return _map_monomials(p, lambda m: -1 if len(m[1]) % 2 else 1)


def reverse_odd_order(p: SuperPoly) -> SuperPoly:
    """Reverse the order of the odd factors of every monomial.

    This is the only place where the sign ``(-1)**(o*(o-1)/2)`` relating
    ascending and descending odd orderings is applied.
    """
    return _map_monomials(
        p, lambda m: -1 if (len(m[1]) * (len(m[1]) - 1) // 2) % 2 else 1
    )


def negate_alphabet(p: SuperPoly, alphabet: str) -> SuperPoly:
    """Substitute ``v -> -v`` for every generator of ``alphabet``."""

    def sign(m: Monomial) -> int:
        degree = sum(e for g, e in m[0] if g[0] == alphabet)
        degree += sum(1 for g in m[1] if g[0] == alphabet)
        return -1 if degree % 2 else 1

    return _map_monomials(p, sign)


def rename_alphabet(p: SuperPoly, source: str, target: str) -> SuperPoly:
    """Rename the generators of one alphabet, re-sorting odd factors."""
    return substitute(
        p,
        lambda gen, odd: SuperPoly.gen(target, gen[1], odd)
        if gen[0] == source
        else None,
    )


def rescale_odd_times(p: SuperPoly, factor: Scalar = 2, alphabet: str = "t") -> SuperPoly:
    """Substitute ``t_{k/2} -> factor * t_{k/2}`` for the odd times of ``alphabet``."""
    f = Fraction(factor)

    def scale(m: Monomial) -> Fraction:
        return f ** sum(1 for g in m[1] if g[0] == alphabet)

    return SuperPoly._wrap({m: c * scale(m) for m, c in p.items()})


def drop_generators(p: SuperPoly, predicate: Callable[[Gen, bool], bool]) -> SuperPoly:
    """Evaluate at zero every generator selected by ``predicate``."""

    def keep(m: Monomial) -> bool:
        even, odd = m
        return not any(predicate(g, False) for g, _ in even) and not any(
            predicate(g, True) for g in odd
        )

    return SuperPoly._wrap({m: c for m, c in p.items() if keep(m)})


def even_part(p: SuperPoly, alphabet: str = "t") -> SuperPoly:
    """Restriction to vanishing odd times of ``alphabet``."""
    return drop_generators(p, lambda g, odd: odd and g[0] == alphabet)


def split_by_generator(p: SuperPoly, gen: Gen) -> dict[int, SuperPoly]:
    """Group ``p`` by the exponent of an even generator, removing it."""
    groups: dict[int, dict[Monomial, Fraction]] = {}
    for (even, odd), c in p.items():
        exponent = 0
        rest = []
        for g, e in even:
            if g == gen:
                exponent = e
            else:
                rest.append((g, e))
        groups.setdefault(exponent, {})[(tuple(rest), odd)] = c
    return {e: SuperPoly._wrap(t) for e, t in groups.items()}


def parse_rational(text: str) -> Fraction:
    """Parse an exact ``p/q`` string; decimals and exponents are rejected."""
    raw = str(text).strip()
    if not raw or any(ch in raw for ch in ".eE"):
        raise ValidationError(f"Not an exact rational: {text!r}", "use the form p/q")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"Not an exact rational: {text!r}", "use the form p/q")


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _gen_label(gen: Gen, odd: bool) -> str:
    alphabet, index = gen
    if alphabet in TIME_ALPHABETS:
        return f"{alphabet}_{index}/2" if odd else f"{alphabet}_{index}"
    return f"{alphabet}_{index}"


def format_monomial(m: Monomial) -> str:
    factors = [
        _gen_label(g, False) + (f"^{e}" if e > 1 else "") for g, e in m[0]
    ] + [_gen_label(g, True) for g in m[1]]
    return "*".join(factors) if factors else "1"


def term_order_key(m: Monomial) -> tuple[Any, ...]:
    """Deterministic term order: by weight, then lexicographic on the monomial."""
    return (monomial_weight2(m), m[0], m[1])


def sorted_terms(p: SuperPoly) -> list[tuple[Monomial, Fraction]]:
    return sorted(p.items(), key=lambda item: term_order_key(item[0]))


def format_poly(p: SuperPoly) -> str:
    """Human-readable form, e.g. ``1/2*t_1/2 + t_1``."""
    if not p:
        return "0"
    parts = []
    for m, c in sorted_terms(p):
        if m == UNIT:
            parts.append(_format_rational(c))
        elif c == 1:
            parts.append(format_monomial(m))
        elif c == -1:
            parts.append("-" + format_monomial(m))
        else:
            parts.append(f"{_format_rational(c)}*{format_monomial(m)}")
    return " + ".join(parts).replace("+ -", "- ")


def _json_key(gen: Gen) -> str:
    alphabet, index = gen
    return str(index) if alphabet == "t" else f"{alphabet}{index}"


def to_terms(p: SuperPoly) -> list[dict[str, Any]]:
    """Serialize to the term-list form used by the CLI."""
    out = []
    for (even, odd), c in sorted_terms(p):
        out.append(
            {
                "coeff": f"{c.numerator}/{c.denominator}",
                "even": {_json_key(g): e for g, e in even},
                "odd": [g[1] if g[0] == "t" else _json_key(g) for g in odd],
            }
        )
    return out


def first_difference(a: SuperPoly, b: SuperPoly) -> str | None:
    """First monomial (term order) where ``a`` and ``b`` differ, formatted."""
    diff = a - b
    if not diff:
        return None
    m, _ = sorted_terms(diff)[0]
    return (
        f"monomial {format_monomial(m)}: "
        f"{_format_rational(a.coefficient(m))} != {_format_rational(b.coefficient(m))}"
    )


C = TypeVar("C")


class LaurentPoly(Generic[C]):
    """Finitely supported Laurent polynomial in one formal variable.

    Exponents are integers or half-integers. An optional precision ``prec``
    records that coefficients are only known for exponents below it.
    """

    __slots__ = ("_coeffs", "prec", "_zero")

    def __init__(
        self,
        coeffs: Mapping[Scalar, C] | None = None,
        prec: Scalar | None = None,
        zero: C | None = None,
    ) -> None:
        self.prec = None if prec is None else Fraction(prec)
        self._zero: Any = SuperPoly.zero() if zero is None else zero
        self._coeffs: dict[Fraction, C] = {}
        for e, c in (coeffs or {}).items():
            ef = Fraction(e)
            if c and (self.prec is None or ef < self.prec):
                self._coeffs[ef] = c

    def _like(self, coeffs: Mapping[Fraction, C], prec: Fraction | None) -> LaurentPoly[C]:
        return LaurentPoly(coeffs, prec, self._zero)

    def coefficient(self, e: Scalar) -> C:
        ef = Fraction(e)
        if self.prec is not None and ef >= self.prec:
            raise SeriesError(f"Coefficient of exponent {ef} is beyond precision {self.prec}")
        return self._coeffs.get(ef, self._zero)

    def items(self) -> list[tuple[Fraction, C]]:
        return sorted(self._coeffs.items())

    def exponents(self) -> list[Fraction]:
        return sorted(self._coeffs)

    def valuation(self) -> Fraction | None:
        return min(self._coeffs) if self._coeffs else None

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._coeffs == other._coeffs and self.prec == other.prec

    def __hash__(self) -> int:
        return hash((frozenset(self._coeffs), self.prec))

    def __neg__(self) -> LaurentPoly[C]:
        return self._like({e: -c for e, c in self._coeffs.items()}, self.prec)  # type: ignore[operator]

    def __add__(self, other: LaurentPoly[C]) -> LaurentPoly[C]:
        out: dict[Fraction, Any] = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out[e] + c if e in out else c
        return self._like(out, _min_prec(self.prec, other.prec))

    def __sub__(self, other: LaurentPoly[C]) -> LaurentPoly[C]:
        return self + (-other)

    def __mul__(self, other: LaurentPoly[C]) -> LaurentPoly[C]:
        prec = _mul_prec(self, other)
        out: dict[Fraction, Any] = {}
        for ea, ca in self._coeffs.items():
            for eb, cb in other._coeffs.items():
                e = ea + eb
                if prec is not None and e >= prec:
                    continue
                v = ca * cb  # type: ignore[operator]
                out[e] = out[e] + v if e in out else v
        return self._like(out, prec)

    def scale(self, c: Any) -> LaurentPoly[C]:
        """Multiply every coefficient on the left by ``c``."""
        return self._like({e: c * v for e, v in self._coeffs.items()}, self.prec)

    def map(self, fn: Callable[[C], C]) -> LaurentPoly[C]:
        return self._like({e: fn(v) for e, v in self._coeffs.items()}, self.prec)

    def shift(self, k: Scalar) -> LaurentPoly[C]:
        """Multiply by ``z**k``."""
        kf = Fraction(k)
        return self._like(
            {e + kf: v for e, v in self._coeffs.items()},
            None if self.prec is None else self.prec + kf,
        )

    def window(self, lo: Scalar, hi: Scalar) -> LaurentPoly[C]:
        """Keep exponents in ``[lo, hi]``."""
        return self._like(
            {e: v for e, v in self._coeffs.items() if lo <= e <= hi}, self.prec
        )

    def with_prec(self, prec: Scalar | None) -> LaurentPoly[C]:
        return self._like(self._coeffs, _min_prec(self.prec, None if prec is None else Fraction(prec)))

    def __pow__(self, n: int) -> LaurentPoly[C]:
        result = self.one_like()
        for _ in range(n):
            result = result * self
        return result

    def one_like(self) -> LaurentPoly[C]:
        one: Any = SuperPoly.one() if isinstance(self._zero, SuperPoly) else 1
        return self._like({Fraction(0): one}, None)

    def residue(self) -> C:
        """Coefficient of the exponent -1."""
        if self._coeffs and all(e.denominator != 1 for e in self._coeffs):
            raise GradingError(
                "Residue requested of a series supported on half-integer exponents",
                f"exponents {self.exponents()[:5]}",
            )
        return self._coeffs.get(Fraction(-1), self._zero)

    def __repr__(self) -> str:
        body = ", ".join(f"{e}: {v!r}" for e, v in self.items())
        return f"LaurentPoly({{{body}}}, prec={self.prec})"


def _min_prec(a: Fraction | None, b: Fraction | None) -> Fraction | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _mul_prec(a: LaurentPoly[Any], b: LaurentPoly[Any]) -> Fraction | None:
    va, vb = a.valuation(), b.valuation()
    bounds = []
    if a.prec is not None:
        bounds.append(a.prec + (vb if vb is not None else (b.prec if b.prec is not None else 0)))
        if vb is None and b.prec is None:
            bounds.pop()
    if b.prec is not None:
        bounds.append(b.prec + (va if va is not None else (a.prec if a.prec is not None else 0)))
        if va is None and a.prec is None:
            bounds.pop()
    return min(bounds) if bounds else None


def residue(series: LaurentPoly[C]) -> C:
    """Coefficient of ``z**-1``."""
    return series.residue()
