"""Shared fixtures for the test modules: constants from independent series,
the golden polynomials and a seeded random corpus."""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

from exact_mahler import LaurentPoly2, parse_poly
from exact_mahler.poly import newton_polygon
from exact_mahler.volume import temperedness

mpmath.mp.dps = 30


@lru_cache(maxsize=None)
def clausen_series(theta: float) -> float:
    """Cl2(theta) = sum sin(n theta) / n^2, summed with mpmath's series acceleration."""
    t = mpmath.mpf(theta)
    return float(mpmath.nsum(lambda n: mpmath.sin(n * t) / n**2, [1, mpmath.inf]))


@lru_cache(maxsize=None)
def catalan_series() -> float:
    """G = sum (-1)^k / (2k+1)^2."""
    return float(mpmath.nsum(lambda k: (-1) ** k / (2 * k + 1) ** 2, [0, mpmath.inf]))


CL3 = clausen_series(float(mpmath.pi / 3))
CL23 = clausen_series(float(2 * mpmath.pi / 3))
G = catalan_series()

P1 = "X + Y - 1"
P2 = "Y - 1 - X - X^2 - X^3 - X^4"
P3 = "1 + X + Y + X*Y + X^2 + Y^2"
P4 = "1 + i*X + i*Y + X*Y"

M1 = CL3 / np.pi
M2 = (2 / (5 * np.pi)) * (3 * CL3 + 3 * CL23 - 2 * G)
M3_ORACLE = 0.4215888344519123  # frozen mpmath slice integration
M4 = 2 * G / np.pi


@lru_cache(maxsize=None)
def golden(name: str) -> LaurentPoly2:
    return parse_poly({"P1": P1, "P2": P2, "P3": P3, "P4": P4}[name])


@lru_cache(maxsize=None)
def corpus(seed: int = 11, n_each: int = 10) -> tuple[tuple[LaurentPoly2, bool], ...]:
    """``n_each`` tempered and ``n_each`` non-tempered random polynomials with support in [0,3]^2."""
    rng = np.random.default_rng(seed)
    temp: list[LaurentPoly2] = []
    non: list[LaurentPoly2] = []
    while len(temp) < n_each or len(non) < n_each:
        k = int(rng.integers(3, 7))
        pts: set[tuple[int, int]] = set()
        while len(pts) < k:
            pts.add((int(rng.integers(0, 4)), int(rng.integers(0, 4))))
        choices = [-1, 1] if rng.random() < 0.5 else [-3, -2, -1, 1, 2, 3]
        P = LaurentPoly2({p: complex(rng.choice(choices)) for p in pts})
        if newton_polygon(P).degenerate or P.y_range()[1] == P.y_range()[0] or P.x_range()[1] == P.x_range()[0]:
            continue
        ok, _ = temperedness(P)
        bucket = temp if ok else non
        if len(bucket) < n_each:
            bucket.append(P)
    return tuple((P, True) for P in temp) + tuple((P, False) for P in non)


def mp_poly_from_roots(lead, roots) -> list:
    """Coefficients (lowest first) of ``lead * prod (t - r)`` in extended precision."""
    c = [mpmath.mpc(lead)]
    for r in roots:
        r = mpmath.mpc(r)
        new = [mpmath.mpc(0)] * (len(c) + 1)
        for k, v in enumerate(c):
            new[k + 1] += v
            new[k] -= r * v
        c = new
    return c


ACCEPTANCE_LINES: list[str] = []
