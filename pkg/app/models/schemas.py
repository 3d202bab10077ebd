"""Pydantic models for reports and group-element specifications."""

import re
from fractions import Fraction
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.exceptions import ValidationError as InputError

_RATIONAL = r"-?\d+(?:/\d+)?"
_COEFFICIENT = re.compile(rf"^(?:(?P<scalar>{_RATIONAL})|(?P<multiple>{_RATIONAL}|-)?a)$")


def split_coefficient(text: str) -> tuple[Fraction, bool]:
    """Read ``"3/2"``, ``"a"``, ``"-a"`` or ``"3/2a"`` as ``(factor, has_a)``."""
    raw = text.strip().replace(" ", "")
    match = _COEFFICIENT.match(raw)
    if not match:
        raise ValueError(f"Not an exact coefficient: {text!r}")
    try:
        if match.group("scalar") is not None:
            return Fraction(match.group("scalar")), False
        multiple = match.group("multiple")
        if multiple is None:
            return Fraction(1), True
        if multiple == "-":
            return Fraction(-1), True
        return Fraction(multiple), True
    except ZeroDivisionError:
        raise ValueError(f"Zero denominator in {text!r}")


def half_integer_to_doubled(text: str) -> int:
    """``"3/2"`` -> 3; only positive half-odd-integers are accepted."""
    raw = text.strip()
    if not re.fullmatch(_RATIONAL, raw):
        raise ValueError(f"Not a mode index: {text!r}")
    value = 2 * Fraction(raw)
    if value.denominator != 1 or value <= 0 or value.numerator % 2 == 0:
        raise ValueError(f"Mode index must be a positive half-odd-integer, got {text!r}")
    return value.numerator


class TermModel(BaseModel):
    """One serialized polynomial term."""

    coeff: str = Field(..., description="Exact rational coefficient p/q")
    even: dict[str, int] = Field(..., description="Even generator exponents")
    odd: list[int | str] = Field(..., description="Odd generators, increasing")


class ReportItem(BaseModel):
    """Outcome of one verified identity."""

    id: str = Field(..., description="Item identifier")
    status: Literal["pass", "fail"] = Field(..., description="Verdict")
    detail: str = Field(default="", description="First difference on failure")


class SuiteReport(BaseModel):
    """Report of a verification suite."""

    suite: str = Field(..., description="Suite name")
    items: list[ReportItem] = Field(default_factory=list, description="Item verdicts")
    cap: str | None = Field(None, description="Weight cap used")

    @property
    def passed(self) -> bool:
        return all(item.status == "pass" for item in self.items)


class VerifyAllReport(BaseModel):
    """Reports of every suite run by `verify all`."""

    suites: list[SuiteReport] = Field(..., description="Suite reports in run order")

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.suites)


class CLambdaReport(BaseModel):
    """Normalized polynomial of one partition."""

    partition: str = Field(..., description="Partition, e.g. 3,1")
    mode: Literal["closed", "engine"] = Field(..., description="Evaluation route")
    normalization: Literal["gamma", "vertex"] = Field(
        ..., description="Odd-time normalization"
    )
    D: str = Field(..., description="Squared normalization d^2")
    hatC: list[TermModel] = Field(..., description="Polynomial terms")


class TauCoefficientModel(BaseModel):
    """Expansion coefficient of a tau function."""

    D: str = Field(..., description="Squared normalization d^2")
    g: list[TermModel] = Field(..., description="Unnormalized pairing <lambda|g|0>")


class TauSeriesReport(BaseModel):
    """Expansion of a tau function over the orthogonal basis."""

    group_element: str = Field(..., description="Group element specification")
    cap: str = Field(..., description="Weight cap")
    coefficients: dict[str, TauCoefficientModel] = Field(
        ..., description="Coefficients keyed by partition"
    )


class PathCountReport(BaseModel):
    """Ball-process path count."""

    source: str = Field(..., description="Start configuration")
    target: str = Field(..., description="End configuration")
    count: int = Field(..., ge=0, description="Number of event sequences")


class PfHfReport(BaseModel):
    """Both sides of the Pfaffian-Hafnian identity."""

    points: list[str] = Field(..., description="Evaluation points")
    pfaffian: str = Field(..., description="Pfaffian side")
    hafnian: str = Field(..., description="Product times Hafnian side")
    equal: bool = Field(..., description="Whether the sides agree")


class HirotaReport(BaseModel):
    """Nonzero components of the bilinear residual."""

    group_element: str = Field(..., description="Group element specification")
    cap: str = Field(..., description="Weight cap")
    residuals: list[str] = Field(..., description="Formatted nonzero components")


class WaveReport(BaseModel):
    """Normalized wave function coefficients."""

    alpha: str = Field(..., description="Odd-length distinct partition")
    group_element: str = Field(..., description="Group element specification")
    cap: str = Field(..., description="Weight cap")
    coefficients: dict[str, list[TermModel]] = Field(
        ..., description="Coefficients keyed by z exponent"
    )


class SkewReport(BaseModel):
    """Skew polynomial of a pair of partitions."""

    partition: str = Field(..., description="Outer partition")
    sub: str = Field(..., description="Inner partition")
    D_partition: str = Field(..., description="d^2 of the outer partition")
    D_sub: str = Field(..., description="d^2 of the inner partition")
    hatC: list[TermModel] = Field(..., description="Polynomial terms")


class ErrorResponse(BaseModel):
    """Error report."""

    error: str = Field(..., description="Error type")
    message: str = Field(..., description="Error message")
    detail: str | None = Field(None, description="Additional error details")


GroupKind = Literal["identity", "quadratic_creation", "soliton", "diagonal_pair"]

_PREFIXES: dict[str, GroupKind] = {
    "identity": "identity",
    "quad": "quadratic_creation",
    "soliton": "soliton",
    "diag": "diagonal_pair",
}


class GroupElementSpec(BaseModel):
    """Group element acting on the vacuum.

    ``entries`` holds the quadratic form (``"n,m"`` with doubled odd mode
    indices) or the diagonal weights (``"k"``); coefficients are exact
    rationals or rational multiples of the formal parameter ``a``.
    """

    model_config = ConfigDict(frozen=True)

    kind: GroupKind = Field(..., description="Element family")
    entries: dict[str, str] = Field(default_factory=dict, description="Coefficients")
    p: str | None = Field(None, description="Soliton point p")
    q: str | None = Field(None, description="Soliton point q")
    a: str | None = Field(None, description="Soliton amplitude")

    @model_validator(mode="after")
    def validate_kind(self) -> "GroupElementSpec":
        """Check the fields required by each kind."""
        for value in self.entries.values():
            split_coefficient(value)
        if self.kind == "soliton":
            if self.p is None or self.q is None or self.a is None:
                raise ValueError("Soliton needs p, q and a")
            p, q = Fraction(self.p), Fraction(self.q)
            if p == 0 or q == 0:
                raise ValueError("Soliton points must be nonzero")
            if p + q == 0:
                raise ValueError("Soliton points must satisfy p + q != 0")
            split_coefficient(self.a)
        elif self.kind == "quadratic_creation":
            seen: dict[tuple[int, int], str] = {}
            for key, value in self.entries.items():
                n, m = (int(piece) for piece in key.split(","))
                for index in (n, m):
                    if index <= 0 or index % 2 == 0:
                        raise ValueError(f"Quadratic indices must be odd and positive: {key}")
                pair = (max(n, m), min(n, m))
                if pair in seen and seen[pair] != value:
                    raise ValueError(f"Quadratic form is not symmetric at {key}")
                seen[pair] = value
        elif self.kind == "diagonal_pair":
            for key in self.entries:
                if int(key) <= 0 or int(key) % 2 == 0:
                    raise ValueError(f"Diagonal indices must be odd and positive: {key}")
        elif self.entries:
            raise ValueError("The identity element takes no entries")
        return self

    @classmethod
    def identity(cls) -> "GroupElementSpec":
        return cls(kind="identity")

    @classmethod
    def parse(cls, text: str) -> "GroupElementSpec":
        """Read ``identity``, ``quad:1/2,1/2=a;3/2,1/2=1/3``, ``soliton:1/2,1/3,1``
        or ``diag:U1/2=1/3,U3/2=1/5``."""
        raw = text.strip()
        head, _, body = raw.partition(":")
        kind = _PREFIXES.get(head.strip().lower())
        if kind is None:
            raise InputError(f"Unknown group element: {text!r}")
        try:
            if kind == "identity":
                if body.strip():
                    raise ValueError("identity takes no arguments")
                return cls(kind=kind)
            if kind == "soliton":
                pieces = [piece.strip() for piece in body.split(",")]
                if len(pieces) != 3:
                    raise ValueError("soliton needs p,q,a")
                return cls(kind=kind, p=pieces[0], q=pieces[1], a=pieces[2])
            entries: dict[str, str] = {}
            separator = ";" if kind == "quadratic_creation" else ","
            for item in filter(None, (piece.strip() for piece in body.split(separator))):
                key, eq, value = item.partition("=")
                if not eq:
                    raise ValueError(f"Missing '=' in {item!r}")
                if kind == "quadratic_creation":
                    n, m = (half_integer_to_doubled(k) for k in key.split(","))
                    entries[f"{max(n, m)},{min(n, m)}"] = value.strip()
                else:
                    entries[str(half_integer_to_doubled(key.strip().lstrip("Uu")))] = value.strip()
            return cls(kind=kind, entries=entries)
        except (ValueError, ValidationError) as e:
            raise InputError(f"Malformed group element: {text!r}", str(e))

    def label(self) -> str:
        """Canonical text form."""
        if self.kind == "identity":
            return "identity"
        if self.kind == "soliton":
            return f"soliton:{self.p},{self.q},{self.a}"
        if self.kind == "quadratic_creation":
            items = ";".join(
                f"{_half(n)},{_half(m)}={v}"
                for (n, m), v in sorted(
                    (tuple(int(x) for x in k.split(",")), v) for k, v in self.entries.items()
                )
            )
            return f"quad:{items}"
        items = ",".join(
            f"U{_half(int(k))}={v}" for k, v in sorted(self.entries.items(), key=lambda kv: int(kv[0]))
        )
        return f"diag:{items}"


def _half(doubled: int) -> str:
    return f"{doubled}/2"
