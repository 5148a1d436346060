import numpy as np
import pytest

from _shared import CL3, G, golden
from exact_mahler import analyze, exactness_certificate, parse_poly, period_scan
from exact_mahler.dilog import clausen
from exact_mahler.errors import UnwrapAmbiguity
from exact_mahler.volume import integrate_eta, temperedness

TAU = 2 * np.pi
DIAMOND = "X + X^-1 + Y + Y^-1"
# largest periods of the diamond family, frozen from an independent mpmath run
DIAMOND_PERIODS = {1: 3.158311376708, 2: 6.426744367697, 3: 9.986651153156}


def test_eta_vanishes_on_a_closed_torus_loop():
    s = np.linspace(0, TAU, 2001)
    assert abs(integrate_eta(np.exp(1j * s), np.exp(2j * s))) < 1e-12


def test_eta_of_a_constant_path_is_zero():
    x = np.full(10, 0.5 + 0.1j)
    assert integrate_eta(x, 2 * x) == 0


def test_eta_refuses_coarse_paths():
    with pytest.raises(UnwrapAmbiguity):
        integrate_eta(np.exp(1j * np.array([0.0, 2.0])), np.array([2.0, 3.0]))


def test_p1_profile_is_minus_clausen():
    prof = analyze(golden("P1")).profile
    th = np.linspace(0.01, TAU - 0.01, 400)
    assert np.max(np.abs(prof(th)[:, 0] + clausen(th))) < 1e-10


def test_p2_profile_closed_form():
    prof = analyze(golden("P2")).profile
    th = np.linspace(0.01, TAU - 0.01, 400)
    want = clausen(th) - clausen(5 * th) / 5
    assert np.max(np.abs(prof(th)[:, 0] - want)) < 1e-10


def test_p2_volumes_at_toric_points():
    an = analyze(golden("P2"))
    V = {round(p.alpha, 6): p.volume for p in an.toric}
    assert abs(V[round(np.pi / 3, 6)] - 1.2 * CL3) < 1e-10
    assert abs(V[round(np.pi, 6)]) < 1e-10


def test_p4_volumes_are_twice_catalan():
    vols = sorted(p.volume for p in analyze(golden("P4")).toric)
    assert np.allclose(vols, [-2 * G, 2 * G], atol=1e-10)


def test_real_profiles_are_odd():
    for name in ("P1", "P2", "P3"):
        prof = analyze(golden(name)).profile
        th = np.linspace(0.1, 3.0, 25)
        a = np.sort(prof(th), axis=1)
        b = np.sort(-prof(TAU - th), axis=1)
        assert np.max(np.abs(a - b)) < 1e-9


def test_profile_derivative_is_the_eta_density():
    # for a single branch dV/dtheta = log|y(e^(i theta))|
    an = analyze(golden("P1"))
    t, h = 2.0, 1e-5
    dv = (an.profile(t + h)[0, 0] - an.profile(t - h)[0, 0]) / (2 * h)
    assert abs(dv - np.log(abs(1 - np.exp(1j * t)))) < 1e-8


def test_temperedness():
    assert temperedness(golden("P1"))[0]
    assert temperedness(golden("P3"))[0]
    assert not temperedness(parse_poly("X + Y - 3"))[0]
    assert not temperedness(parse_poly("X + 2*Y + 1"))[0]


@pytest.mark.parametrize("name", ["P1", "P2", "P3", "P4"])
def test_golden_polynomials_are_certified_exact(name):
    cert = exactness_certificate(golden(name))
    assert cert.verdict == "ExactCertified"
    assert cert.tempered and cert.corner_ok and cert.genus_bound == 0
    assert all(abs(v) < 1e-6 * max(1.0, L) for _, v, L in cert.cycle_integrals)


def test_non_tempered_is_not_exact():
    cert = exactness_certificate(parse_poly("X + Y - 3"))
    assert cert.verdict == "NotExact"
    assert not cert.tempered
    seam = [v for d, v, _ in cert.cycle_integrals if "seam" in d][0]
    assert abs(abs(seam) - TAU * np.log(3)) < 1e-9


@pytest.mark.parametrize("c", [1, 2, 3])
def test_diamond_family_periods(c):
    cert = exactness_certificate(parse_poly(DIAMOND) - c)
    assert cert.verdict == "NotExact"
    # the largest cycle integral does not depend on the chosen cycle basis
    period = max(abs(v) for _, v, _ in cert.cycle_integrals)
    assert abs(period - DIAMOND_PERIODS[c]) < 1e-8


def test_period_scan_reports_every_step():
    rows, cands = period_scan(parse_poly(DIAMOND), (4.5, 6.0), 3)
    assert [r.c for r in rows] == pytest.approx([4.5, 5.0, 5.5, 6.0])
    assert all(r.verdict == "NotExact" for r in rows)
    assert cands == []
    # the circle cycle of X + X^-1 + Y + Y^-1 - c grows with c
    assert np.all(np.diff([r.max_cycle for r in rows]) > 0)
