from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eolcycle.rules import BuiltinError, evaluate_builtin
from eolcycle.terms import DECIMAL, INTEGER, TIMESTAMP, iri, literal, parse_lexical


def test_subtract_binds_result():
    out = evaluate_builtin("subtract", [None, literal(25), literal(24)])
    assert out == literal(1)
    assert out.datatype == INTEGER


def test_bound_result_acts_as_check():
    assert evaluate_builtin("subtract", [literal(1), literal(25), literal(24)]) is True
    assert evaluate_builtin("subtract", [literal(2), literal(25), literal(24)]) is False


def test_mixed_arithmetic_goes_decimal():
    out = evaluate_builtin("multiply", [None, literal(3), literal(Decimal("0.1"))])
    assert out.datatype == DECIMAL and out.value == Decimal("0.3")


def test_comparisons_cross_numeric_types():
    assert evaluate_builtin("lessThanOrEqual", [literal(1), literal(Decimal("1.0"))]) is True
    assert evaluate_builtin("greaterThan", [literal(0), literal(Decimal("-0.5"))]) is True
    assert evaluate_builtin("notEqual", [literal(2), literal(3)]) is True


def test_timestamps_compare_chronologically():
    early = parse_lexical("2000-01-01T00:00:00Z", TIMESTAMP)
    late = parse_lexical("2000-01-01T01:00:00+00:30", TIMESTAMP)
    assert evaluate_builtin("lessThan", [early, late]) is True


def test_equal_on_iris():
    assert evaluate_builtin("equal", [iri("http://a"), iri("http://a")]) is True
    assert evaluate_builtin("equal", [iri("http://a"), iri("http://b")]) is False


@pytest.mark.parametrize(
    "name, args, code",
    [
        ("lessThan", [None, literal(1)], "unbound-required-argument"),
        ("subtract", [None, None, literal(1)], "unbound-required-argument"),
        ("lessThan", [literal("a"), literal(1)], "non-numeric-argument"),
        ("add", [None, iri("http://x"), literal(1)], "non-numeric-argument"),
    ],
)
def test_errors(name, args, code):
    with pytest.raises(BuiltinError) as err:
        evaluate_builtin(name, args)
    assert err.value.code == code


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_integer_arithmetic_is_exact(a, b):
    assert evaluate_builtin("subtract", [None, literal(a), literal(b)]) == literal(a - b)
    assert evaluate_builtin("add", [None, literal(a), literal(b)]) == literal(a + b)
    assert evaluate_builtin("multiply", [None, literal(a), literal(b)]) == literal(a * b)
    assert evaluate_builtin("lessThanOrEqual", [literal(a), literal(b)]) is (a <= b)
