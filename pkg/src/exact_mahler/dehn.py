"""Dehn-filling experiment: one-variable measures of P(t^-q, t^p) and their
convergence to m(P)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CollapsedSubstitution, DomainError, MahlerError, ParseError
from .poly import EPS_COEFF, LaurentPoly2, UniPoly, _as_matrix

CAVEAT = (
    "m(P(t^-q, t^p)) equals the Dehn-filling quantity only under hypotheses on "
    "the manifold (birational boundary restriction, singular points off torsion) "
    "which are not checked here"
)


@dataclass(frozen=True)
class SurgerySlope:
    p: int
    q: int

    def __post_init__(self):
        if (self.p, self.q) == (0, 0):
            raise DomainError("slope (0, 0) is not allowed")
        if math.gcd(self.p, self.q) != 1:
            raise DomainError(f"slope {self.p}/{self.q}: p and q must be coprime")

    @classmethod
    def parse(cls, text: str) -> "SurgerySlope":
        s = text.strip()
        try:
            if "/" in s:
                a, b = s.split("/")
                return cls(int(a), int(b))
            return cls(int(s), 1)
        except ValueError as e:
            if isinstance(e, DomainError):
                raise
            raise ParseError(f"cannot read slope {text!r}", 0) from None

    def __str__(self):
        return f"{self.p}/{self.q}"


def parse_slopes(text: str) -> list[SurgerySlope]:
    return [SurgerySlope.parse(t) for t in text.split(",") if t.strip()]


def dehn_substitute(P: LaurentPoly2, s: SurgerySlope) -> UniPoly:
    """``P(t^-q, t^p)``: exponent ``(i, j) -> p j - q i``, coefficients accumulated."""
    acc: dict[int, complex] = {}
    for (i, j), c in P:
        e = s.p * j - s.q * i
        acc[e] = acc.get(e, 0) + c
    scale = sum(abs(c) for _, c in P)
    live = {e: c for e, c in acc.items() if abs(c) > EPS_COEFF * scale}
    if not live:
        raise CollapsedSubstitution(f"P vanishes identically on x^{s.p} y^{s.q} = 1")
    lo, hi = min(live), max(live)
    dense = [live.get(e, 0j) for e in range(lo, hi + 1)]
    return UniPoly(tuple(dense), lo)


def transform_slope(s: SurgerySlope, M) -> SurgerySlope:
    """The slope matching ``monomial_transform(P, M)``: ``(-q', p') = M^-T (-q, p)``."""
    (a, b), (c, d) = _as_matrix(M)
    det = a * d - b * c
    # inverse transpose of [[a, b], [c, d]] is [[d, -c], [-b, a]] / det
    w0, w1 = -s.q, s.p
    u0 = (d * w0 - c * w1) * det
    u1 = (-b * w0 + a * w1) * det
    return SurgerySlope(int(u1), int(-u0))


@dataclass
class DehnRow:
    p: int
    q: int
    m_pq: float | None
    deviation: float | None
    error: str | None = None


def dehn_convergence(P: LaurentPoly2, slopes: list[SurgerySlope], m_ref: float | None = None) -> list[DehnRow]:
    """``m(P(t^-q, t^p))`` per slope with its distance to ``m(P)``; per-slope failures are recorded."""
    from .mahler import mahler_1d, mahler_numeric

    if m_ref is None:
        m_ref = mahler_numeric(P)
    rows = []
    for s in slopes:
        try:
            m = mahler_1d(dehn_substitute(P, s))
            rows.append(DehnRow(s.p, s.q, m, abs(m - m_ref)))
        except MahlerError as e:
            rows.append(DehnRow(s.p, s.q, None, None, f"{type(e).__name__}: {e}"))
    return rows


def tail_max(deviations) -> np.ndarray:
    """Running maximum of the deviations over each tail ``k, k+1, ...``."""
    d = np.asarray(deviations, dtype=float)
    return np.maximum.accumulate(d[::-1])[::-1]
