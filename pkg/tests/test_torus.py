import numpy as np
import pytest

from _shared import CL3, golden
from exact_mahler import analyze, parse_poly
from exact_mahler.errors import DomainError, SingularPoint
from exact_mahler.torus import (
    amoeba_point,
    amoeba_raster,
    branch_graph_over_circle,
    critical_points,
    find_toric_points,
    index,
    log_gauss,
    slope_class,
)

TAU = 2 * np.pi


def _points(an):
    return sorted((round(p.alpha, 9), round(p.beta, 9)) for p in an.toric)


def test_amoeba_point():
    assert amoeba_point(np.e, 1.0) == pytest.approx((1.0, 0.0))
    with pytest.raises(DomainError):
        amoeba_point(0, 1)


def test_log_gauss_of_p1():
    w = np.exp(1j * np.pi / 3)
    g = log_gauss(golden("P1"), w, w.conjugate())
    assert abs(g - w**2) < 1e-14
    assert slope_class(g) == "PlusImaginary"


def test_log_gauss_of_p2_at_sixth_root():
    w = np.exp(1j * np.pi / 3)
    g = log_gauss(golden("P2"), w, w**2)
    assert abs(g - (-2 - 3 * np.sqrt(3) * 1j)) < 1e-12
    assert slope_class(g) == "MinusImaginary"


def test_log_gauss_at_a_node_is_singular():
    # (X + Y - 2)(X - Y) has a node at (1, 1)
    with pytest.raises(SingularPoint):
        log_gauss(parse_poly("(X + Y - 2)*(X - Y)"), 1.0, 1.0)


def test_slope_classes():
    assert slope_class(1 + 1j) == "PlusImaginary"
    assert slope_class(1 - 1j) == "MinusImaginary"
    assert slope_class(-2 + 0j) == "Real"
    assert slope_class(complex(np.inf)) == "Infinite"


def test_p1_has_two_toric_points():
    an = analyze(golden("P1"))
    t = np.pi / 3
    assert _points(an) == [(round(t, 9), round(TAU - t, 9)), (round(TAU - t, 9), round(t, 9))]
    assert sorted(p.index for p in an.toric) == [-1, 1]


def test_p2_has_seven_toric_points():
    an = analyze(golden("P2"))
    alphas = sorted(p.alpha for p in an.toric)
    expect = [np.pi / 3, np.pi / 2, 2 * np.pi / 3, np.pi, 4 * np.pi / 3, 3 * np.pi / 2, 5 * np.pi / 3]
    assert np.allclose(alphas, expect, atol=1e-12)
    at_pi = [p for p in an.toric if abs(p.alpha - np.pi) < 1e-9][0]
    assert at_pi.slope_class == "Real" and at_pi.index == 0
    for p in an.toric:
        if abs(p.alpha - np.pi) > 1e-9:
            assert abs(p.index) == 1
            assert p.index == (1 if p.slope_class == "MinusImaginary" else -1)


def test_p3_has_eight_toric_points():
    an = analyze(golden("P3"))
    pts = _points(an)
    assert len(pts) == 8
    w = TAU / 3
    assert (round(w, 9), round(2 * w, 9)) in pts and (round(2 * w, 9), round(w, 9)) in pts
    assert sum(p.index for p in an.toric) == 0


def test_toric_points_are_on_the_curve():
    for name in ("P1", "P2", "P3", "P4"):
        P = golden(name)
        for p in analyze(P).toric:
            assert abs(P(p.x, p.y)) < 1e-11


def test_real_polynomials_have_conjugate_pairs():
    for name in ("P1", "P2", "P3"):
        an = analyze(golden(name))
        for p in an.toric:
            q = [r for r in an.toric if abs(r.alpha - (-p.alpha) % TAU) < 1e-9 and abs(r.beta - (-p.beta) % TAU) < 1e-9]
            assert q and q[0].index == -p.index


def test_p1_arc_carries_twice_clausen():
    an = analyze(golden("P1"))
    assert len(an.arcs.arcs) == 1
    assert abs(an.arcs.arcs[0].delta_v - 2 * CL3) < 1e-10


def test_xy_minus_one_has_no_arcs():
    an = analyze(parse_poly("X*Y - 1"))
    assert an.toric == [] and an.arcs.arcs == []


def test_index_matches_arc_endpoints():
    an = analyze(golden("P2"))
    for p in an.toric:
        assert index(p, an.arcs) == p.index


def test_branch_points_of_p3():
    crit = critical_points(golden("P3"))
    on = sorted(c.theta for c in crit if c.on_circle and c.kind == "branch")
    t = np.arccos(-1 / 3)
    assert np.allclose(on, [t, TAU - t], atol=1e-10)


def test_branch_graph_degree_and_log_integral():
    bg = branch_graph_over_circle(golden("P3"))
    assert bg.degree == 2
    # sum of log|y_i| is log|1 + x + x^2|, whose mean over the circle is 0
    assert abs(bg.full_integrals().sum()) < 1e-10


def test_flat_component_is_reported():
    pts, flat = find_toric_points(branch_graph_over_circle(parse_poly("X*Y - 1 + (X - 1)*(Y - 1)*0")))
    assert pts == [] and flat


def test_amoeba_raster_is_nonempty_inside_the_window():
    ue, ve, counts = amoeba_raster(golden("P1"), (-3, 3, -3, 3), bins=(40, 40), n_radius=60, n_angle=120)
    assert counts.shape == (40, 40)
    assert counts.sum() > 0
    # the origin of the amoeba plane lies in the amoeba of X + Y - 1
    assert counts[19:21, 19:21].sum() > 0
