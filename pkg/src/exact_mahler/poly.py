"""Two-variable Laurent polynomials and their lattice combinatorics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping

import numpy as np

from .errors import CornerMismatch, DomainError, EmptySupport, NotUnimodular

EPS_COEFF = 1e-13
EPS_CORNER = 1e-9
MAX_EXPONENT = 10**6


def _clean(terms: Mapping[tuple[int, int], complex]) -> dict[tuple[int, int], complex]:
    if not terms:
        return {}
    scale = max(1.0, max(abs(c) for c in terms.values()))
    return {
        (int(i), int(j)): complex(c)
        for (i, j), c in terms.items()
        if abs(c) > EPS_COEFF * scale
    }


class LaurentPoly2:
    """Finitely supported map (i, j) -> c_ij standing for sum c_ij X^i Y^j.

    Instances are immutable; arithmetic returns new polynomials and drops
    coefficients below the dedup threshold.
    """

    __slots__ = ("_terms", "_exps", "_coeffs")

    def __init__(self, terms: Mapping[tuple[int, int], complex] | None = None):
        cleaned = _clean(dict(terms or {}))
        items = sorted(cleaned.items())
        self._terms = dict(items)
        self._exps = np.array([k for k, _ in items], dtype=np.int64).reshape(-1, 2)
        self._coeffs = np.array([c for _, c in items], dtype=complex)

    # -- construction -----------------------------------------------------
    @classmethod
    def monomial(cls, i: int, j: int, c: complex = 1.0) -> "LaurentPoly2":
        return cls({(i, j): c})

    @classmethod
    def constant(cls, c: complex) -> "LaurentPoly2":
        return cls({(0, 0): c})

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly2":
        from .parse import parse_poly

        return parse_poly(text)

    # -- accessors --------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, int], complex]:
        return dict(self._terms)

    @property
    def exponents(self) -> np.ndarray:
        return self._exps.copy()

    @property
    def coefficients(self) -> np.ndarray:
        return self._coeffs.copy()

    def coeff(self, i: int, j: int) -> complex:
        return self._terms.get((i, j), 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        return f"LaurentPoly2({format_poly(self)!r})"

    def is_real(self, tol: float = 1e-14) -> bool:
        return bool(np.all(np.abs(self._coeffs.imag) <= tol * max(1.0, np.abs(self._coeffs).max(initial=0))))

    def conjugate(self) -> "LaurentPoly2":
        return LaurentPoly2({k: c.conjugate() for k, c in self._terms.items()})

    def y_range(self) -> tuple[int, int]:
        if not self:
            raise EmptySupport("empty support")
        return int(self._exps[:, 1].min()), int(self._exps[:, 1].max())

    def x_range(self) -> tuple[int, int]:
        if not self:
            raise EmptySupport("empty support")
        return int(self._exps[:, 0].min()), int(self._exps[:, 0].max())

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0j) + c
        return LaurentPoly2(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly2({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: dict[tuple[int, int], complex] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0j) + c1 * c2
        return LaurentPoly2(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self) != 1:
                raise DomainError("negative powers are only defined for monomials")
            ((i, j), c), = self._terms.items()
            return LaurentPoly2({(i * n, j * n): c**n})
        result = LaurentPoly2.constant(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- evaluation -------------------------------------------------------
    def _monomials(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        if np.any(x == 0) or np.any(y == 0):
            raise DomainError("evaluation at x = 0 or y = 0")
        lx = np.log(x)[..., None]
        ly = np.log(y)[..., None]
        return np.exp(self._exps[:, 0] * lx + self._exps[:, 1] * ly)

    def __call__(self, x, y):
        return evaluate(self, x, y)

    # -- slicing helpers ---------------------------------------------------
    def y_coefficients(self, x, x_derivative: bool = False) -> np.ndarray:
        """Coefficients of P(x, .) as a polynomial in y, lowest y-degree first.

        Shape ``x.shape + (jmax - jmin + 1,)``.  With ``x_derivative`` the
        coefficients of ``x dP/dx`` are returned instead.
        """
        x = np.asarray(x, dtype=complex)
        if np.any(x == 0):
            raise DomainError("slice at x = 0")
        jmin, jmax = self.y_range()
        out = np.zeros(x.shape + (jmax - jmin + 1,), dtype=complex)
        lx = np.log(x)[..., None]
        c = self._coeffs * self._exps[:, 0] if x_derivative else self._coeffs
        vals = c * np.exp(self._exps[:, 0] * lx)
        for col, j in enumerate(self._exps[:, 1] - jmin):
            out[..., j] += vals[..., col]
        return out

    def x_polynomials(self) -> tuple[int, list[np.ndarray]]:
        """Per y-degree coefficient arrays in x (lowest x-degree first).

        Returns ``(imin, polys)`` with ``polys[j - jmin]`` the dense
        coefficients of ``x^(-imin) * a_j(x)``.
        """
        imin, imax = self.x_range()
        jmin, jmax = self.y_range()
        polys = [np.zeros(imax - imin + 1, dtype=complex) for _ in range(jmax - jmin + 1)]
        for (i, j), c in self._terms.items():
            polys[j - jmin][i - imin] += c
        return imin, polys

    # -- io ---------------------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "terms": [
                {"i": i, "j": j, "re": float(c.real), "im": float(c.imag)}
                for (i, j), c in self._terms.items()
            ]
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "LaurentPoly2":
        out: dict[tuple[int, int], complex] = {}
        for t in data["terms"]:
            k = (int(t["i"]), int(t["j"]))
            out[k] = out.get(k, 0j) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        return cls(out)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "LaurentPoly2":
        return cls.from_json_dict(json.loads(text))


def _coerce(value) -> LaurentPoly2:
    if isinstance(value, LaurentPoly2):
        return value
    return LaurentPoly2.constant(complex(value))


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return np.format_float_positional(v, unique=True, trim="-")


def format_poly(P: LaurentPoly2) -> str:
    """Expression text that ``parse_poly`` reads back to the same terms."""
    if not P:
        return "0"
    out = ""
    for n, ((i, j), c) in enumerate(P):
        neg = False
        if c.imag == 0:
            neg = c.real < 0
            cs = _num(abs(c.real))
        elif c.real == 0:
            neg = c.imag < 0
            cs = "i" if abs(c.imag) == 1 else f"{_num(abs(c.imag))}*i"
        else:
            sign = "-" if c.imag < 0 else "+"
            cs = f"({_num(c.real)} {sign} {_num(abs(c.imag))}*i)"
        mono = []
        if i:
            mono.append("X" if i == 1 else f"X^{i}")
        if j:
            mono.append("Y" if j == 1 else f"Y^{j}")
        body = "*".join(mono) if mono and cs == "1" else "*".join([cs] + mono)
        if n == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out


def evaluate(P: LaurentPoly2, x, y):
    """Evaluate ``P`` at ``(x, y)``; broadcasts over numpy arrays."""
    vals = P._monomials(x, y) @ P._coeffs
    return vals if np.ndim(vals) else complex(vals)


def log_derivatives(P: LaurentPoly2, x, y):
    """Return ``(x dP/dx, y dP/dy)`` at ``(x, y)``."""
    mon = P._monomials(x, y)
    a = mon @ (P._exps[:, 0] * P._coeffs)
    b = mon @ (P._exps[:, 1] * P._coeffs)
    if np.ndim(a) == 0:
        return complex(a), complex(b)
    return a, b


# ---------------------------------------------------------------------------
# Newton polygon
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    start: tuple[int, int]
    end: tuple[int, int]
    direction: tuple[int, int]
    length: int


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[tuple[int, int], ...]
    edges: tuple[Edge, ...]
    interior_count: int
    degenerate: str | None = None  # None, "segment" or "point"

    @property
    def boundary_count(self) -> int:
        if self.degenerate == "point":
            return 1
        if self.degenerate == "segment":
            return self.edges[0].length + 1
        return sum(e.length for e in self.edges)

    def area2(self) -> int:
        v = self.vertices
        return sum(v[k][0] * v[(k + 1) % len(v)][1] - v[(k + 1) % len(v)][0] * v[k][1] for k in range(len(v)))


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone chain on integer points; counter-clockwise, no collinear vertices."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 or all(_cross(hull[0], hull[1], p) == 0 for p in hull):
        return [hull[0], max(hull)] if len(hull) > 1 else hull
    return hull


def _edge(a, b) -> Edge:
    dx, dy = b[0] - a[0], b[1] - a[1]
    g = gcd(abs(dx), abs(dy))
    return Edge(tuple(a), tuple(b), (dx // g, dy // g), g)


def newton_polygon(P: LaurentPoly2) -> NewtonPolygon:
    if not P:
        raise EmptySupport("polynomial has empty support")
    hull = convex_hull(P.terms.keys())
    if len(hull) == 1:
        return NewtonPolygon(tuple(hull), (), 0, "point")
    if len(hull) == 2:
        return NewtonPolygon(tuple(hull), (_edge(hull[0], hull[1]),), 0, "segment")
    edges = tuple(_edge(hull[k], hull[(k + 1) % len(hull)]) for k in range(len(hull)))
    poly = NewtonPolygon(tuple(hull), edges, 0)
    boundary = sum(e.length for e in edges)
    # Pick: 2A = 2I + B - 2
    interior = (poly.area2() - boundary + 2) // 2
    return NewtonPolygon(tuple(hull), edges, interior)


# ---------------------------------------------------------------------------
# Univariate polynomials and side polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniPoly:
    """``t^shift * sum coeffs[k] t^k`` with coefficients lowest degree first."""

    coeffs: tuple[complex, ...]
    shift: int = 0

    def __post_init__(self):
        c = [complex(v) for v in self.coeffs]
        scale = max((abs(v) for v in c), default=0.0)
        shift = self.shift
        while c and abs(c[-1]) <= EPS_COEFF * scale:
            c.pop()
        while c and abs(c[0]) <= EPS_COEFF * scale:
            c.pop(0)
            shift += 1
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "shift", shift if c else 0)

    @classmethod
    def from_array(cls, arr, shift: int = 0) -> "UniPoly":
        return cls(tuple(np.asarray(arr, dtype=complex).tolist()), shift)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        acc = np.zeros_like(t)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        out = acc * t**self.shift
        return out if np.ndim(out) else complex(out)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        return UniPoly.from_array(np.convolve(self.as_array(), other.as_array()), self.shift + other.shift)

    def roots(self):
        from .roots import roots_univariate

        return roots_univariate(self)


@dataclass(frozen=True)
class SidePolynomial:
    edge: Edge
    poly: UniPoly = field(repr=False)

    @property
    def coeffs(self) -> tuple[complex, ...]:
        return self.poly.coeffs

    def root_moduli(self) -> np.ndarray:
        if self.poly.degree < 1:
            return np.zeros(0)
        rs = self.poly.roots()
        return np.array([abs(r) for r, m, _ in rs.roots for _ in range(m)])


def side_polynomials(P: LaurentPoly2) -> list[SidePolynomial]:
    npoly = newton_polygon(P)
    if npoly.degenerate == "point":
        return []
    out = []
    for e in npoly.edges:
        cs = [P.coeff(e.start[0] + k * e.direction[0], e.start[1] + k * e.direction[1]) for k in range(e.length + 1)]
        out.append(SidePolynomial(e, UniPoly(tuple(cs))))
    return out


# ---------------------------------------------------------------------------
# Monomial transformations and corner normalization
# ---------------------------------------------------------------------------


def _as_matrix(M) -> tuple[tuple[int, int], tuple[int, int]]:
    m = np.asarray(M, dtype=np.int64)
    if m.shape != (2, 2):
        raise NotUnimodular("transform must be a 2x2 integer matrix")
    return ((int(m[0, 0]), int(m[0, 1])), (int(m[1, 0]), int(m[1, 1])))


def det2(M) -> int:
    (a, b), (c, d) = _as_matrix(M)
    return a * d - b * c


def monomial_transform(P: LaurentPoly2, M, shift=(0, 0)) -> LaurentPoly2:
    """Map the support by ``(i, j) -> M (i, j) + shift``."""
    (a, b), (c, d) = _as_matrix(M)
    if abs(a * d - b * c) != 1:
        raise NotUnimodular(f"det = {a * d - b * c}, expected +-1")
    s0, s1 = int(shift[0]), int(shift[1])
    return LaurentPoly2({(a * i + b * j + s0, c * i + d * j + s1): v for (i, j), v in P})


def torus_map_back(M, x, y):
    """Original ``(x, y)`` of a point given in the coordinates of ``monomial_transform(P, M)``.

    ``x^i y^j = x'^(i') y'^(j')`` for ``(i', j') = M (i, j)``, hence
    ``(log x, log y) = M^T (log x', log y')``.
    """
    (a, b), (c, d) = _as_matrix(M)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    lx, ly = np.log(x), np.log(y)
    return np.exp(a * lx + c * ly), np.exp(b * lx + d * ly)


def corner_modulus(P: LaurentPoly2, eps: float = EPS_CORNER) -> float:
    """Common modulus c(P) of the vertex coefficients; raises if they differ."""
    npoly = newton_polygon(P)
    moduli = [abs(P.coeff(*v)) for v in npoly.vertices]
    lo, hi = min(moduli), max(moduli)
    if hi - lo > eps * hi:
        raise CornerMismatch(moduli)
    return float(np.mean(moduli))


def random_unimodular(rng: np.random.Generator, bound: int = 3, det: int | None = 1):
    while True:
        m = rng.integers(-bound, bound + 1, size=(2, 2))
        d = int(round(np.linalg.det(m)))
        if abs(d) == 1 and (det is None or d == det):
            return [[int(m[0, 0]), int(m[0, 1])], [int(m[1, 0]), int(m[1, 1])]]
