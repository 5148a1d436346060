"""Composite and adaptive Gauss-Legendre quadrature, vectorized over panels."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureStall


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def panel_rule(edges: np.ndarray, n: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on every panel ``[edges[k], edges[k+1]]``.

    Returns arrays of shape ``(len(edges) - 1, n)``.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def graded_breaks(
    breaks,
    dist: Callable[[np.ndarray], np.ndarray],
    kappa: float = 1.0,
    min_width: float = 1e-13,
    max_rounds: int = 80,
) -> np.ndarray:
    """Bisect panels until each is no wider than ``kappa`` times ``dist(midpoint)``.

    ``dist`` is the distance from a parameter to the nearest singularity of
    the integrand (in whatever metric controls Gauss-Legendre convergence).
    Panels narrower than ``min_width`` are left alone, which is where panels
    touching a singular endpoint stop.
    """
    e = np.unique(np.asarray(breaks, dtype=float))
    for _ in range(max_rounds):
        w = np.diff(e)
        mid = 0.5 * (e[:-1] + e[1:])
        split = (w > kappa * dist(mid)) & (w > 2 * min_width)
        if not split.any():
            break
        e = np.unique(np.concatenate([e, mid[split]]))
    return e


def adaptive_gl(
    f: Callable[[np.ndarray], np.ndarray],
    breaks,
    tol: float = 1e-9,
    n: int = 10,
    max_level: int = 40,
    min_width: float = 1e-14,
) -> tuple[float, float]:
    """Integrate a vectorized ``f`` over the union of panels given by ``breaks``.

    Each panel is compared against its two halves; panels whose difference
    exceeds their share of ``tol`` (proportional to width) are split.
    Returns ``(value, error_estimate)``.  Raises QuadratureStall when the
    panels shrink below ``min_width`` without meeting the tolerance.
    """
    e = np.asarray(breaks, dtype=float)
    a, b = e[:-1], e[1:]
    total_width = float(np.sum(b - a))
    if total_width <= 0:
        return 0.0, 0.0
    x, w = gauss_legendre(n)

    def rule(lo, hi):
        half = 0.5 * (hi - lo)[:, None]
        pts = lo[:, None] + half * (x + 1)
        return (f(pts.ravel()).reshape(pts.shape) * (half * w)).sum(axis=1)

    whole = rule(a, b)
    value, err = 0.0, 0.0
    for _ in range(max_level):
        mid = 0.5 * (a + b)
        left, right = rule(a, mid), rule(mid, b)
        est = np.abs(left + right - whole)
        share = tol * (b - a) / total_width
        ok = est <= share
        value += float(np.sum((left + right)[ok]))
        err += float(np.sum(est[ok]))
        if ok.all():
            return value, err
        narrow = (b - a) < 2 * min_width
        if np.any(~ok & narrow):
            bad = ~ok
            raise QuadratureStall(
                "adaptive quadrature stalled on a narrow panel",
                error_bound=err + float(np.sum(est[bad])),
            )
        keep = ~ok
        a, mid_k, b = a[keep], mid[keep], b[keep]
        lk, rk = left[keep], right[keep]
        a = np.concatenate([a, mid_k])
        b = np.concatenate([mid_k, b])
        whole = np.concatenate([lk, rk])
    raise QuadratureStall("adaptive quadrature did not converge", error_bound=err + float(np.sum(np.abs(whole))))
