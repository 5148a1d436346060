import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exact_mahler import LaurentPoly2, parse_poly
from exact_mahler.errors import ParseError
from exact_mahler.poly import format_poly


def test_basic_terms():
    P = parse_poly("X + Y - 1")
    assert P.terms == {(0, 0): -1, (1, 0): 1, (0, 1): 1}


def test_products_powers_and_parentheses():
    P = parse_poly("(X + 1)^2 - 2*X")
    assert P.terms == {(0, 0): 1, (2, 0): 1}


def test_negative_exponents():
    P = parse_poly("X + X^-1 + Y + Y^-1")
    assert set(P.terms) == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_imaginary_unit_and_decimals():
    P = parse_poly("1 + i*X + 0.5*Y")
    assert P.coeff(1, 0) == 1j
    assert P.coeff(0, 1) == 0.5


def test_unicode_minus():
    assert parse_poly("X − 1") == parse_poly("X - 1")


def test_cancellation_gives_sparse_result():
    assert parse_poly("X - X + Y") == parse_poly("Y")


@pytest.mark.parametrize(
    "text,pos",
    [("X+", 2), ("X**2", 2), ("X/Y", 1), ("Z+1", 0), ("", 0), ("(X+1", 4), ("X^Y", 2)],
)
def test_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as e:
        parse_poly(text)
    assert e.value.position == pos


def test_huge_exponent_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_poly("X^99999999")


terms = st.dictionaries(
    st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
    st.tuples(st.integers(-9, 9), st.integers(-3, 3)).filter(lambda c: c != (0, 0)),
    min_size=1,
    max_size=6,
)


@settings(max_examples=80, deadline=None)
@given(terms)
def test_format_parse_round_trip(d):
    P = LaurentPoly2({k: complex(a, b) for k, (a, b) in d.items()})
    assert parse_poly(format_poly(P)) == P
