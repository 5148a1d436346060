import numpy as np
import pytest

from exact_mahler.errors import QuadratureStall
from exact_mahler.quad import adaptive_gl, gauss_legendre, graded_breaks, panel_rule


def test_gauss_legendre_is_exact_for_low_degree():
    x, w = gauss_legendre(10)
    for k in range(20):
        exact = 0.0 if k % 2 else 2 / (k + 1)
        assert abs(np.sum(w * x**k) - exact) < 1e-14


def test_panel_rule_shapes_and_total_weight():
    nodes, weights = panel_rule(np.array([0.0, 1.0, 3.0]), n=6)
    assert nodes.shape == (2, 6)
    assert abs(weights.sum() - 3) < 1e-14


def test_adaptive_handles_a_kink():
    val, err = adaptive_gl(lambda t: np.abs(t - 0.3137), [0.0, 1.0], tol=1e-12)
    exact = (0.3137**2 + 0.6863**2) / 2
    assert abs(val - exact) < 1e-11
    assert err < 1e-10


def test_adaptive_on_log_singularity():
    # log|2 sin(t/2)| integrates to 0 over [0, pi]; panels graded towards 0
    e = graded_breaks([0.0, np.pi], np.abs, min_width=1e-12)
    e = e[e > 1e-12]
    val, _ = adaptive_gl(lambda t: np.log(np.abs(2 * np.sin(t / 2))), e, tol=1e-10)
    assert abs(val) < 1e-9


def test_graded_breaks_refine_towards_a_singularity():
    e = graded_breaks([0.0, 1.0], lambda m: np.abs(m))
    assert e[1] < 1e-10
    w = np.diff(e)
    assert np.all(w[1:] <= 1.0 * e[1:-1] + 1e-15)


def test_stall_is_reported():
    with pytest.raises(QuadratureStall):
        adaptive_gl(lambda t: np.sign(np.sin(1 / np.maximum(t, 1e-300))), [0.0, 1.0], tol=1e-15, max_level=6)
