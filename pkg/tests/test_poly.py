import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _shared import golden
from exact_mahler import LaurentPoly2, newton_polygon, parse_poly, side_polynomials
from exact_mahler.errors import CornerMismatch, EmptySupport, NotUnimodular
from exact_mahler.poly import (
    corner_modulus,
    det2,
    evaluate,
    log_derivatives,
    monomial_transform,
    random_unimodular,
    torus_map_back,
)


def test_arithmetic():
    X, Y = LaurentPoly2.monomial(1, 0), LaurentPoly2.monomial(0, 1)
    P = (X + Y - 1) * (X - Y)
    assert P == parse_poly("X^2 - Y^2 - X + Y")
    assert (X + 1) ** 3 == parse_poly("X^3 + 3*X^2 + 3*X + 1")


def test_evaluation_at_golden_points():
    w = np.exp(1j * np.pi / 3)
    assert abs(evaluate(golden("P1"), w, w.conjugate())) < 1e-15
    assert abs(evaluate(golden("P4"), 1, 1) - (2 + 2j)) < 1e-15


def test_log_derivatives():
    P = golden("P1")
    x, y = 0.3 + 0.2j, 0.7 - 0.2j
    gx, gy = log_derivatives(P, x, y)
    assert abs(gx - x) < 1e-15 and abs(gy - y) < 1e-15
    gx, gy = log_derivatives(golden("P2"), x, y)
    assert abs(gx + x + 2 * x**2 + 3 * x**3 + 4 * x**4) < 1e-14


def test_newton_polygon_examples():
    n1 = newton_polygon(golden("P1"))
    assert sorted(n1.vertices) == [(0, 0), (0, 1), (1, 0)]
    assert n1.interior_count == 0 and n1.boundary_count == 3
    n2 = newton_polygon(golden("P2"))
    assert sorted(n2.vertices) == [(0, 0), (0, 1), (4, 0)]
    n3 = newton_polygon(golden("P3"))
    assert n3.interior_count == 0 and n3.boundary_count == 6
    diamond = newton_polygon(parse_poly("X + X^-1 + Y + Y^-1 - 1"))
    assert diamond.interior_count == 1


def test_degenerate_polygons():
    assert newton_polygon(parse_poly("X*Y - 1")).degenerate == "segment"
    assert newton_polygon(parse_poly("3*X")).degenerate == "point"
    with pytest.raises(EmptySupport):
        newton_polygon(LaurentPoly2())


def test_side_polynomials_of_p1():
    moduli = [s.root_moduli() for s in side_polynomials(golden("P1"))]
    assert all(len(m) == 1 and abs(m[0] - 1) < 1e-14 for m in moduli)


def test_side_polynomial_of_p3_has_cube_roots():
    for s in side_polynomials(golden("P3")):
        assert np.allclose(s.root_moduli(), 1, atol=1e-12)


def test_corner_modulus():
    assert corner_modulus(golden("P1")) == pytest.approx(1)
    assert corner_modulus(golden("P4")) == pytest.approx(1)
    with pytest.raises(CornerMismatch):
        corner_modulus(parse_poly("X + Y - 3"))


def test_transform_requires_unimodular():
    with pytest.raises(NotUnimodular):
        monomial_transform(golden("P1"), [[2, 0], [0, 1]])
    assert det2([[1, 1], [0, 1]]) == 1


def test_json_round_trip():
    P = golden("P4")
    assert LaurentPoly2.from_json(P.to_json()) == P


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_map_back_relates_transformed_values(seed):
    rng = np.random.default_rng(seed)
    P = golden("P2")
    M = random_unimodular(rng, bound=3)
    Q = monomial_transform(P, M)
    x1, y1 = np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
    x, y = torus_map_back(M, x1, y1)
    # the two values agree up to the monomial factor, which is 1 here
    assert abs(abs(evaluate(P, x, y)) - abs(evaluate(Q, x1, y1))) < 1e-11
