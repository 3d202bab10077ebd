"""Tests for the supercommutative ring and series helpers."""

import random
from fractions import Fraction

import pytest
import sympy

from app.core.exceptions import GradingError, SeriesError, ValidationError
from app.services.ring import (
    LaurentPoly,
    SuperPoly,
    drop_generators,
    exp_truncated,
    first_difference,
    format_poly,
    grade_involution,
    inverse_truncated,
    negate_alphabet,
    parse_rational,
    poly_add,
    poly_mul,
    power_truncated,
    rename_alphabet,
    rescale_odd_times,
    reverse_odd_order,
    series_truncated,
    split_by_generator,
    substitute,
    to_doubled,
    to_terms,
    truncate_weight,
)


@pytest.mark.unit
class TestSuperPoly:
    """SuperPoly arithmetic"""

    def test_odd_generators_anticommute(self, theta):
        """Swapping two odd times flips the sign."""
        assert theta(3) * theta(1) == -(theta(1) * theta(3))

    def test_odd_square_vanishes(self, theta):
        """An odd generator squares to zero."""
        assert not theta(1) * theta(1)
        assert (theta(1) + theta(3)) ** 2 == 0

    def test_even_generators_commute(self, t, theta):
        """Even times commute with everything."""
        assert t(1) * theta(3) == theta(3) * t(1)
        assert t(1) * t(3) == t(3) * t(1)

    def test_zero_coefficients_are_dropped(self, t):
        """Cancelling terms leave the zero polynomial."""
        p = t(1) - t(1)
        assert not p
        assert len(p) == 0
        assert t(1).scale(0) == SuperPoly.zero()

    def test_equality_with_rationals(self):
        """Constants compare equal to ints and fractions."""
        assert SuperPoly.const(Fraction(3, 2)) == Fraction(3, 2)
        assert SuperPoly.one() == 1
        assert SuperPoly.zero() == 0

    def test_parity(self, t, theta):
        """Homogeneous parity or None for mixed elements."""
        assert theta(1).parity() == 1
        assert t(1).parity() == 0
        assert (theta(1) * theta(3)).parity() == 0
        assert (t(1) + theta(1)).parity() is None

    def test_weights(self, t, theta):
        """Doubled weights of every alphabet."""
        assert t(3).weights2() == {6}
        assert theta(3).weights2() == {3}
        assert SuperPoly.gen("x", 1).weights2() == {2}
        assert SuperPoly.gen("zeta", 1, odd=True).weights2() == {1}
        assert SuperPoly.gen("a", 1).weights2() == {0}

    def test_substitute_is_multiplicative(self, t):
        """Substitution sends t_1 to 1 + t_1 inside a square."""
        image = substitute(t(1) ** 2, lambda gen, odd: SuperPoly.one() + t(1) if gen == ("t", 1) else None)
        assert image == 1 + t(1).scale(2) + t(1) ** 2

    def test_split_by_generator(self, t):
        """Grouping by the exponent of t_1."""
        groups = split_by_generator(t(1) ** 2 * t(3) + t(3), ("t", 1))
        assert groups[2] == t(3)
        assert groups[0] == t(3)


def _random_poly(rng: random.Random, parity: int | None = None, constant: bool = True) -> SuperPoly:
    """Random polynomial in t_1, t_3 and the odd times t_1/2, t_3/2, t_5/2."""
    total = SuperPoly.zero()
    for _ in range(rng.randint(1, 4)):
        odd = [k for k in (1, 3, 5) if rng.random() < 0.5]
        if parity is not None and len(odd) % 2 != parity:
            odd = odd[1:] if odd else [rng.choice((1, 3, 5))]
        term = SuperPoly.const(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
        term = term * SuperPoly.gen("t", 1) ** rng.randint(0, 2) * SuperPoly.gen("t", 3) ** rng.randint(0, 1)
        for k in odd:
            term = term * SuperPoly.gen("t", k, odd=True)
        total = total + term
    if not constant:
        total = total - total.constant_term()
    return total


SEEDS = range(8)


@pytest.mark.unit
class TestRingLaws:
    """Ring laws on random polynomials"""

    @pytest.mark.parametrize("seed", SEEDS)
    def test_associativity(self, seed):
        """(ab)c = a(bc)."""
        rng = random.Random(seed)
        a, b, c = (_random_poly(rng) for _ in range(3))
        assert poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c))

    @pytest.mark.parametrize("seed", SEEDS)
    def test_super_commutativity(self, seed):
        """ab = (-1)^(p(a)p(b)) ba for homogeneous parities."""
        rng = random.Random(seed)
        for pa in (0, 1):
            for pb in (0, 1):
                a, b = _random_poly(rng, pa), _random_poly(rng, pb)
                sign = -1 if pa and pb else 1
                assert poly_mul(a, b) == poly_mul(b, a).scale(sign), (pa, pb)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_truncation_commutes_with_product(self, seed):
        """Truncating the factors first gives the same truncated product."""
        rng = random.Random(seed)
        a, b = _random_poly(rng), _random_poly(rng)
        for cap in (0, Fraction(1, 2), 2, Fraction(7, 2)):
            expected = truncate_weight(poly_mul(a, b), cap)
            assert truncate_weight(poly_mul(truncate_weight(a, cap), truncate_weight(b, cap)), cap) == expected

    @pytest.mark.parametrize("seed", SEEDS)
    def test_exp_of_sum_of_even_elements(self, seed):
        """exp(a + b) = exp(a) exp(b) for Grassmann-even a, b."""
        rng = random.Random(seed)
        a = _random_poly(rng, 0, constant=False)
        b = _random_poly(rng, 0, constant=False)
        cap = 4
        product = truncate_weight(exp_truncated(a, cap) * exp_truncated(b, cap), cap)
        assert exp_truncated(poly_add(a, b), cap) == product

    def test_exp_of_odd_pair_products(self, t, theta):
        """Products of two odd times exponentiate like commuting elements."""
        a = theta(1) * theta(3) + t(1)
        b = (theta(1) * theta(5)).scale(Fraction(2, 3)) - theta(3) * theta(5)
        cap = 5
        product = truncate_weight(exp_truncated(a, cap) * exp_truncated(b, cap), cap)
        assert exp_truncated(a + b, cap) == product
        assert exp_truncated(theta(1) * theta(3), cap) == 1 + theta(1) * theta(3)


@pytest.mark.unit
class TestMaps:
    """Sign maps and renamings"""

    def test_grade_involution(self, t, theta):
        """Odd monomials change sign."""
        assert grade_involution(t(1) + theta(1)) == t(1) - theta(1)

    def test_reverse_odd_order(self, theta):
        """Two odd factors pick up a sign, one does not."""
        assert reverse_odd_order(theta(1) * theta(3)) == -(theta(1) * theta(3))
        assert reverse_odd_order(theta(1)) == theta(1)

    def test_rescale_odd_times(self, theta):
        """Each odd time is multiplied by the factor."""
        p = theta(1) * theta(3) + theta(1)
        assert rescale_odd_times(p, 2) == (theta(1) * theta(3)).scale(4) + theta(1).scale(2)

    def test_negate_alphabet(self, t):
        """Odd degree in the alphabet flips the sign."""
        x = SuperPoly.gen("x", 1)
        assert negate_alphabet(x * t(1) + x * x, "x") == -(x * t(1)) + x * x

    def test_rename_alphabet(self, t, theta):
        """Renaming keeps indices and parity."""
        s1 = SuperPoly.gen("s", 1)
        s_half = SuperPoly.gen("s", 1, odd=True)
        assert rename_alphabet(t(1) * theta(1), "t", "s") == s1 * s_half

    def test_drop_generators(self, t, a_param):
        """Evaluating the times at zero keeps the parameter part."""
        p = a_param + a_param * t(1) + SuperPoly.one()
        assert drop_generators(p, lambda gen, odd: gen[0] == "t") == a_param + 1


@pytest.mark.unit
class TestSeries:
    """Truncated series"""

    def test_exp_matches_sympy(self, t, sympify):
        """exp(t_1) to weight 4 agrees with the Taylor polynomial."""
        x = sympy.Symbol("t1")
        expected = sympy.series(sympy.exp(x), x, 0, 5).removeO()
        assert sympify(exp_truncated(t(1), 4)) == sympy.expand(expected)

    def test_exp_of_odd_terminates(self, theta):
        """exp(θ) = 1 + θ for an odd element."""
        assert exp_truncated(theta(1), 10) == 1 + theta(1)

    def test_heat_kernel_power_matches_sympy(self, t, sympify):
        """(1 - 2 t_1)^(-1/2) agrees with the binomial series."""
        x = sympy.Symbol("t1")
        expected = sympy.series((1 - 2 * x) ** sympy.Rational(-1, 2), x, 0, 6).removeO()
        assert sympify(power_truncated(t(1).scale(-2), Fraction(-1, 2), 5)) == sympy.expand(expected)

    def test_inverse(self, t):
        """(1 + t_1)^(-1) times (1 + t_1) is 1 up to the cap."""
        p = 1 + t(1)
        inverse = inverse_truncated(p, 3)
        assert truncate_weight(inverse * p, 3) == 1

    def test_inverse_of_non_unit_raises(self, t):
        """A series without a rational head cannot be inverted."""
        with pytest.raises(SeriesError):
            inverse_truncated(t(1), 3)

    def test_constant_term_rejected(self, t):
        """The series argument must vanish at zero."""
        with pytest.raises(SeriesError):
            series_truncated(1 + t(1), lambda m: Fraction(1), 2)

    def test_weight_zero_argument_rejected(self, a_param):
        """A weight-zero argument would not terminate."""
        with pytest.raises(SeriesError):
            exp_truncated(a_param, 2)

    def test_truncate_weight(self, t, theta):
        """Monomials above the cap are dropped."""
        p = 1 + t(1) + t(3) + theta(1) + theta(3)
        assert truncate_weight(p, 1) == 1 + t(1) + theta(1)
        assert truncate_weight(p, Fraction(3, 2)) == 1 + t(1) + theta(1) + theta(3)


@pytest.mark.unit
class TestParsingAndFormatting:
    """Caps, rationals and printed forms"""

    def test_to_doubled(self):
        """Half-integer caps double to integers."""
        assert to_doubled(Fraction(7, 2)) == 7
        assert to_doubled(3) == 6

    @pytest.mark.parametrize("cap", [-1, Fraction(1, 3)])
    def test_to_doubled_rejects(self, cap):
        """Negative or non-half-integer caps are rejected."""
        with pytest.raises(ValidationError):
            to_doubled(cap)

    def test_parse_rational(self):
        """Exact p/q strings parse."""
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational(" -2 ") == -2

    @pytest.mark.parametrize("text", ["0.5", "1e3", "", "1/0", "abc"])
    def test_parse_rational_rejects(self, text):
        """Decimals, exponents and junk are rejected."""
        with pytest.raises(ValidationError):
            parse_rational(text)

    def test_format_poly(self, t, theta):
        """Terms print by weight with signs folded in."""
        assert format_poly(theta(1).scale(Fraction(1, 2)) + t(1)) == "1/2*t_1/2 + t_1"
        assert format_poly(1 - t(1)) == "1 - t_1"
        assert format_poly(SuperPoly.zero()) == "0"

    def test_to_terms(self, t, theta):
        """Term list carries exact coefficients and odd indices."""
        p = (t(1) ** 2 * theta(3)).scale(Fraction(3, 2))
        assert to_terms(p) == [{"coeff": "3/2", "even": {"1": 2}, "odd": [3]}]
        assert to_terms(SuperPoly.gen("x", 1)) == [{"coeff": "1/1", "even": {"x1": 1}, "odd": []}]

    def test_first_difference(self, t):
        """The lowest differing monomial is reported."""
        assert first_difference(t(1), t(1)) is None
        assert first_difference(t(1), t(1).scale(2)) == "monomial t_1: 1 != 2"


@pytest.mark.unit
class TestLaurentPoly:
    """Laurent polynomials"""

    def test_product(self):
        """(1 + z)(1 - z) = 1 - z^2."""
        one = SuperPoly.one()
        a = LaurentPoly({0: one, 1: one})
        b = LaurentPoly({0: one, 1: -one})
        assert a * b == LaurentPoly({0: one, 2: -one})

    def test_residue(self):
        """Coefficient of z^-1."""
        series = LaurentPoly({-1: SuperPoly.const(2), 0: SuperPoly.one()})
        assert series.residue() == 2

    def test_residue_of_half_integer_series_raises(self):
        """A series on half-integer exponents has no residue."""
        with pytest.raises(GradingError):
            LaurentPoly({Fraction(1, 2): SuperPoly.one()}).residue()

    def test_precision(self):
        """Coefficients at or beyond the precision are unknown."""
        series = LaurentPoly({0: SuperPoly.one(), 5: SuperPoly.one()}, prec=2)
        assert series.coefficient(1) == 0
        assert series.exponents() == [0]
        with pytest.raises(SeriesError):
            series.coefficient(2)

    def test_shift_and_window(self):
        """Shifting moves exponents; windows clip them."""
        one = SuperPoly.one()
        series = LaurentPoly({-1: one, 0: one, 1: one})
        assert series.shift(1).exponents() == [0, 1, 2]
        assert series.window(0, 1).exponents() == [0, 1]

    def test_precision_of_product(self):
        """A product is known up to the smaller reach of its factors."""
        one = SuperPoly.one()
        a = LaurentPoly({0: one}, prec=3)
        b = LaurentPoly({-1: one, 0: one})
        assert (a * b).prec == 2
