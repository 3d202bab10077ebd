"""Unit tests for models and schemas."""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from app.core.exceptions import ValidationError as InputError
from app.models.schemas import (
    GroupElementSpec,
    PathCountReport,
    ReportItem,
    SuiteReport,
    VerifyAllReport,
    half_integer_to_doubled,
    split_coefficient,
)


@pytest.mark.unit
def test_split_coefficient():
    """Test reading exact coefficients with the parameter a."""
    assert split_coefficient("3/2") == (Fraction(3, 2), False)
    assert split_coefficient("a") == (Fraction(1), True)
    assert split_coefficient("-a") == (Fraction(-1), True)
    assert split_coefficient("3/2a") == (Fraction(3, 2), True)

    for text in ("0.5", "b", "1/0", "a2"):
        with pytest.raises(ValueError):
            split_coefficient(text)


@pytest.mark.unit
def test_half_integer_to_doubled():
    """Test mode indices."""
    assert half_integer_to_doubled("3/2") == 3
    for text in ("1", "-1/2", "1/3", "x"):
        with pytest.raises(ValueError):
            half_integer_to_doubled(text)


@pytest.mark.unit
def test_group_element_parse():
    """Test parsing every group element family."""
    assert GroupElementSpec.parse("identity").kind == "identity"

    quad = GroupElementSpec.parse("quad:1/2,1/2=a;3/2,1/2=1/3")
    assert quad.kind == "quadratic_creation"
    assert quad.entries == {"1,1": "a", "3,1": "1/3"}
    assert quad.label() == "quad:1/2,1/2=a;3/2,1/2=1/3"

    soliton = GroupElementSpec.parse("soliton:1/2,1/3,1")
    assert (soliton.p, soliton.q, soliton.a) == ("1/2", "1/3", "1")
    assert soliton.label() == "soliton:1/2,1/3,1"

    diag = GroupElementSpec.parse("diag:U1/2=1/3,U3/2=1/5")
    assert diag.entries == {"1": "1/3", "3": "1/5"}
    assert diag.label() == "diag:U1/2=1/3,U3/2=1/5"


@pytest.mark.unit
@pytest.mark.parametrize(
    "text",
    [
        "unknown",
        "identity:1",
        "soliton:1/2,1/3",
        "soliton:1/2,-1/2,1",
        "soliton:0,1/3,1",
        "quad:1/2,1/2",
        "quad:1,1/2=a",
        "quad:1/2,1/2=0.5",
        "diag:U1=1",
    ],
)
def test_group_element_parse_rejects(text):
    """Test malformed group elements."""
    with pytest.raises(InputError):
        GroupElementSpec.parse(text)


@pytest.mark.unit
def test_group_element_is_frozen():
    """Test that specifications are immutable."""
    spec = GroupElementSpec.identity()
    with pytest.raises(ValidationError):
        spec.kind = "soliton"


@pytest.mark.unit
def test_identity_rejects_entries():
    """Test the identity takes no entries."""
    with pytest.raises(ValidationError):
        GroupElementSpec(kind="identity", entries={"1": "1"})


@pytest.mark.unit
def test_suite_reports():
    """Test suite verdict aggregation."""
    good = SuiteReport(suite="qdim", items=[ReportItem(id="x", status="pass")])
    bad = SuiteReport(suite="cl", items=[ReportItem(id="y", status="fail", detail="monomial t_1: 1 != 2")])
    assert good.passed
    assert not bad.passed
    assert VerifyAllReport(suites=[good]).passed
    assert not VerifyAllReport(suites=[good, bad]).passed

    with pytest.raises(ValidationError):
        ReportItem(id="z", status="skipped")


@pytest.mark.unit
def test_path_count_report():
    """Test counts are non-negative."""
    assert PathCountReport(source="", target="3,1", count=2).count == 2
    with pytest.raises(ValidationError):
        PathCountReport(source="", target="3,1", count=-1)
