import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _shared import CL3, G, clausen_series
from exact_mahler.dilog import bloch_wigner, clausen, li2


def test_bloch_wigner_at_i_is_catalan():
    assert abs(bloch_wigner(1j) - G) < 1e-14


def test_bloch_wigner_vanishes_on_the_real_line():
    assert np.allclose(bloch_wigner(np.array([-3.0, -0.5, 0.0, 0.3, 1.0, 2.5])), 0, atol=1e-15)


def test_bloch_wigner_at_sixth_root_is_clausen():
    assert abs(bloch_wigner(cmath.exp(1j * np.pi / 3)) - CL3) < 1e-14


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_bloch_wigner_symmetries(a, b):
    z = complex(a, b)
    if abs(z) < 1e-3 or abs(z - 1) < 1e-3:
        return
    d = bloch_wigner(z)
    assert abs(bloch_wigner(z.conjugate()) + d) < 1e-12
    assert abs(bloch_wigner(1 / z) + d) < 1e-12
    assert abs(bloch_wigner(1 - z) + d) < 1e-12


@pytest.mark.parametrize("z", [0.3 + 0.4j, -0.9 + 0.1j, 2 - 1j, 0.5 + 0.5j, -4 + 3j, 0.99 + 0.01j])
def test_li2_matches_mpmath(z):
    assert abs(li2(z) - complex(mpmath.polylog(2, z))) < 1e-13


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, np.pi / 3, 2.0, 3.1, 4.0, 6.0])
def test_clausen_matches_series(t):
    assert abs(clausen(t) - clausen_series(t)) < 1e-14


def test_clausen_duplication():
    t = np.linspace(0.05, 3.0, 30)
    assert np.allclose(clausen(2 * t), 2 * clausen(t) - 2 * clausen(np.pi - t), atol=1e-13)
