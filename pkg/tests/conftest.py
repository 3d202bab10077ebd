"""Test configuration and fixtures."""

from collections.abc import Callable
from fractions import Fraction

import pytest
import sympy
from click.testing import CliRunner

from app.models.schemas import GroupElementSpec
from app.services.ring import SuperPoly


def _to_sympy(p: SuperPoly) -> sympy.Expr:
    expr = sympy.Integer(0)
    for (even, odd), c in p.items():
        assert not odd, "only even polynomials have a sympy image"
        term = sympy.Rational(c.numerator, c.denominator)
        for (alphabet, index), e in even:
            term *= sympy.Symbol(f"{alphabet}{index}") ** e
        expr += term
    return sympy.expand(expr)


@pytest.fixture
def sympify() -> Callable[[SuperPoly], sympy.Expr]:
    """Convert an even polynomial into a sympy expression in symbols like ``t1``."""
    return _to_sympy


@pytest.fixture
def t() -> Callable[[int], SuperPoly]:
    """Even time ``t_j``."""
    return lambda j: SuperPoly.gen("t", j)


@pytest.fixture
def theta() -> Callable[[int], SuperPoly]:
    """Odd time ``t_{k/2}`` by doubled index ``k``."""
    return lambda k: SuperPoly.gen("t", k, odd=True)


@pytest.fixture
def a_param() -> SuperPoly:
    """Formal parameter ``a``."""
    return SuperPoly.gen("a", 1)


@pytest.fixture
def identity_spec() -> GroupElementSpec:
    """Identity group element."""
    return GroupElementSpec.identity()


@pytest.fixture
def heat_spec() -> GroupElementSpec:
    """``exp(a φ_{1/2}²)``."""
    return GroupElementSpec.parse("quad:1/2,1/2=a")


@pytest.fixture
def soliton_spec() -> GroupElementSpec:
    """One-soliton element at ``p = 1/2``, ``q = 1/3``, ``a = 1``."""
    return GroupElementSpec.parse("soliton:1/2,1/3,1")


@pytest.fixture
def diag_spec() -> GroupElementSpec:
    """Diagonal element with rational weights."""
    return GroupElementSpec.parse("diag:U1/2=1/3,U3/2=1/5")


@pytest.fixture
def runner() -> CliRunner:
    """Click test runner."""
    return CliRunner()


@pytest.fixture
def half() -> Fraction:
    """The rational 1/2."""
    return Fraction(1, 2)
