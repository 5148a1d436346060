import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _shared import golden, mp_poly_from_roots
from exact_mahler import UniPoly, parse_poly
from exact_mahler.roots import Path, match_fibers, roots_batch, roots_univariate, track_fiber


def _reconstruction_error(coeffs, rs):
    recon = mp_poly_from_roots(coeffs[-1], rs.values)
    scale = max(abs(c) for c in coeffs)
    return max(abs(mpmath.mpc(c) - r) for c, r in zip(coeffs, recon)) / scale


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=12).filter(lambda c: c[-1] != 0 and c[0] != 0))
def test_roots_reconstruct_the_polynomial(c):
    rs = roots_univariate(UniPoly(tuple(c)))
    assert rs.degree == len(c) - 1
    assert _reconstruction_error([complex(v) for v in c], rs) < 1e-9


def test_multiplicities_are_clustered():
    p = UniPoly.from_array(np.poly([1, 1, 1, -2])[::-1])
    rs = roots_univariate(p)
    ms = sorted(m for _, m, _ in rs.roots)
    assert ms == [1, 3]
    r3 = [r for r, m, _ in rs.roots if m == 3][0]
    assert abs(r3 - 1) < 1e-10


def test_batch_roots_of_unity():
    c = np.zeros((3, 6), complex)
    c[:, 0], c[:, 5] = -1, 1
    z = roots_batch(c)
    assert np.allclose(np.abs(z), 1, atol=1e-14)
    assert np.allclose(z**5, 1, atol=1e-13)


def test_match_fibers_recovers_permutation():
    prev = np.array([0, 1, 2j, -3])
    perm = np.array([2, 0, 3, 1])
    new = np.empty(4, complex)
    new[perm] = prev + 1e-3
    got, _ = match_fibers(prev, new)
    assert np.array_equal(got, perm)


def test_tracking_p1_over_circle():
    tp = track_fiber(golden("P1"), Path.circle(), samples=128)
    x = np.exp(1j * tp.s)
    assert np.allclose(tp.y[:, 0], 1 - x, atol=1e-13)


def test_square_root_monodromy_swaps_branches():
    # y^2 = x: going once around the circle exchanges the two roots
    tp = track_fiber(parse_poly("Y^2 - X"), Path.circle(), samples=256)
    y0, y1 = tp.y[0], tp.y[-1]
    assert np.allclose(y1, y0[::-1], atol=1e-12)
