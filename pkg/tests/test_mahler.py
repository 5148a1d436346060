import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _shared import M1, M2, M3_ORACLE, M4, golden
from exact_mahler import (
    LaurentPoly2,
    UniPoly,
    mahler_1d,
    mahler_formula,
    mahler_numeric,
    newton_polygon,
    normalize_for_slicing,
    parse_poly,
)
from exact_mahler.errors import CornerMismatch, ZeroPolynomial
from exact_mahler.mahler import inequality_check
from exact_mahler.poly import monomial_transform, random_unimodular


def test_mahler_1d_examples():
    assert mahler_1d(UniPoly((1, 1, 1))) == pytest.approx(0, abs=1e-15)
    assert mahler_1d(UniPoly((2, -5, 2))) == pytest.approx(np.log(4))
    assert mahler_1d(UniPoly((1, 3))) == pytest.approx(np.log(3))
    assert mahler_1d(UniPoly((-7,), 5)) == pytest.approx(np.log(7))
    with pytest.raises(ZeroPolynomial):
        mahler_1d(UniPoly(()))


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(-5, 5), min_size=1, max_size=6).filter(lambda c: any(c)),
    st.lists(st.integers(-5, 5), min_size=1, max_size=6).filter(lambda c: any(c)),
)
def test_mahler_1d_is_additive(a, b):
    p, q = UniPoly(tuple(a)), UniPoly(tuple(b))
    assert abs(mahler_1d(p * q) - mahler_1d(p) - mahler_1d(q)) < 1e-9


def test_normalization_makes_the_top_vertex_unique():
    P = parse_poly("Y^2 + X^2*Y^2 + X + 1")
    Q, M = normalize_for_slicing(P)
    jmax = Q.y_range()[1]
    assert sum(1 for (i, j), _ in Q if j == jmax) == 1
    assert monomial_transform(P, M) == Q
    assert abs(mahler_numeric(P) - mahler_numeric(Q)) < 1e-10


def test_normalization_keeps_p1():
    Q, M = normalize_for_slicing(golden("P1"))
    assert Q == golden("P1") and M == [[1, 0], [0, 1]]


@pytest.mark.parametrize("name,m", [("P1", M1), ("P2", M2), ("P3", M3_ORACLE), ("P4", M4)])
def test_numeric_measure_of_golden_polynomials(name, m):
    assert abs(mahler_numeric(golden(name)) - m) < 1e-10


def test_numeric_measure_simple_cases():
    assert abs(mahler_numeric(parse_poly("X*Y - 1"))) < 1e-12
    assert abs(mahler_numeric(parse_poly("X + Y - 3")) - np.log(3)) < 1e-10
    assert abs(mahler_numeric(parse_poly("2*X + 3")) - np.log(3)) < 1e-12
    with pytest.raises(ZeroPolynomial):
        mahler_numeric(LaurentPoly2())


def test_error_estimate_is_returned():
    m, err = mahler_numeric(golden("P2"), return_error=True)
    assert err < 1e-8 and abs(m - M2) < 1e-10


@pytest.mark.parametrize("name", ["P1", "P2", "P3", "P4"])
def test_formula_agrees_with_integration(name):
    r = mahler_formula(golden(name))
    assert r.residual < 1e-9
    assert sum(c[1] for c in r.contributions) == 0


def test_formula_refused_for_unequal_corners():
    P = parse_poly("X + Y - 3")
    r = mahler_formula(P)
    assert r.m_formula is None and r.notes
    with pytest.raises(CornerMismatch):
        mahler_formula(P, method="formula")


def test_inequality_margins():
    assert abs(inequality_check(mahler_formula(golden("P1")))) < 1e-9
    assert abs(inequality_check(mahler_formula(golden("P4")))) < 1e-9
    assert inequality_check(mahler_formula(golden("P2"))) > 0.1
    assert inequality_check(mahler_formula(golden("P3"))) > 1.0


def test_report_json_fields():
    d = mahler_formula(golden("P1")).to_json_dict()
    for key in ("m_numeric", "m_formula", "log_c", "toric_points", "residual", "amplitude", "inequality_margin"):
        assert key in d
    assert len(d["toric_points"]) == 2


@pytest.mark.parametrize("seed", range(4))
def test_measure_is_invariant_under_monomial_transforms(seed):
    rng = np.random.default_rng(seed)
    P = golden("P3")
    Q = monomial_transform(P, random_unimodular(rng, bound=2), shift=(1, -2))
    assert newton_polygon(Q).interior_count == newton_polygon(P).interior_count
    r = mahler_formula(Q, seed=seed)
    assert abs(r.m_numeric - M3_ORACLE) < 1e-9
    assert abs(r.m_formula - M3_ORACLE) < 1e-9
