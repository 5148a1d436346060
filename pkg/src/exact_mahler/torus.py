"""The curve P = 0 relative to the unit torus.

Critical x-values, the fibration of the curve over the circle |x| = 1
(branch graph), toric points with their slopes, the arcs where |y| > 1 and
the index of each toric point obtained from arc incidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import math

import numpy as np
from scipy.optimize import brentq

from .errors import BranchCollision, DanglingArc, DomainError, IndexInconsistency, SingularPoint
from .poly import LaurentPoly2, log_derivatives
from .quad import graded_breaks, panel_rule
from .roots import Path, TrackedPath, horner, roots_batch, track_fiber

EPS_TORIC = 1e-9
EPS_SLOPE = 1e-7
EPS_TANGENT = 1e-10
EPS_SING = 1e-12
EPS_FLAT = 1e-9
MERGE_TOL = 1e-7
ON_CIRCLE = 1e-8
JUNCTION_GAP = 1e-10
IDEAL_GAP = 1e-14
CLUSTER_X = 1e-6
TWO_PI = 2 * np.pi

SLOPE_CLASSES = ("PlusImaginary", "MinusImaginary", "Real", "Infinite")


# ---------------------------------------------------------------------------
# Amoeba and logarithmic Gauss map
# ---------------------------------------------------------------------------


def amoeba_point(x, y) -> tuple[float, float]:
    """``(log|x|, log|y|)``."""
    if x == 0 or y == 0:
        raise DomainError("amoeba of a point with a zero coordinate")
    return float(np.log(abs(x))), float(np.log(abs(y)))


def _scale(P: LaurentPoly2, x, y):
    e = P.exponents
    ax = np.abs(np.asarray(x, dtype=complex))[..., None]
    ay = np.abs(np.asarray(y, dtype=complex))[..., None]
    return (np.abs(P.coefficients) * ax ** e[:, 0] * ay ** e[:, 1]).sum(axis=-1)


def log_gauss(P: LaurentPoly2, x, y, eps_sing: float = EPS_SING):
    """Slope ``x P_x / (y P_y)`` of the logarithmic Gauss map (``inf`` when ``y P_y = 0``)."""
    a, b = log_derivatives(P, x, y)
    scale = _scale(P, x, y)
    if np.ndim(a) == 0:
        if abs(a) < eps_sing * scale and abs(b) < eps_sing * scale:
            raise SingularPoint(f"both logarithmic derivatives vanish at ({x}, {y})")
        return complex(np.inf) if abs(b) < eps_sing * scale else complex(a / b)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(b) < eps_sing * scale, complex(np.inf), a / b)


def slope_class(gamma: complex, eps: float = EPS_SLOPE) -> str:
    if not np.isfinite(gamma):
        return "Infinite"
    if gamma.imag > eps:
        return "PlusImaginary"
    if gamma.imag < -eps:
        return "MinusImaginary"
    return "Real"


# ---------------------------------------------------------------------------
# Critical x-values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    """An x-value over which the fiber degenerates: a branch point or a zero of the lowest y-coefficient."""

    x: complex
    kind: str  # "branch" | "ideal"

    @property
    def on_circle(self) -> bool:
        return abs(abs(self.x) - 1) < ON_CIRCLE

    @property
    def theta(self) -> float:
        return float(np.angle(self.x) % TWO_PI)


def _sylvester_det(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Batched resultant via the Sylvester matrix; coefficients lowest first."""
    m, n = f.shape[-1] - 1, g.shape[-1] - 1
    N = m + n
    S = np.zeros(f.shape[:-1] + (N, N), dtype=complex)
    fr, gr = f[..., ::-1], g[..., ::-1]
    for r in range(n):
        S[..., r, r : r + m + 1] = fr
    for r in range(m):
        S[..., n + r, r : r + n + 1] = gr
    return np.linalg.det(S)


def y_discriminant(P: LaurentPoly2) -> tuple[int, np.ndarray]:
    """Resultant of ``P`` and ``dP/dy`` as a Laurent polynomial in x.

    Evaluated at roots of unity and interpolated by FFT.  Returns
    ``(lowest exponent, dense coefficients)``; empty for degree < 2 in y.
    """
    jmin, jmax = P.y_range()
    d = jmax - jmin
    if d < 2:
        return 0, np.zeros(0, complex)
    imin, imax = P.x_range()
    lo, hi = (2 * d - 1) * imin, (2 * d - 1) * imax
    K = hi - lo + 1
    N = 1 << int(np.ceil(np.log2(max(K, 2))))
    xs = np.exp(2j * np.pi * np.arange(N) / N)
    a = P.y_coefficients(xs)
    da = a[:, 1:] * np.arange(1, d + 1)
    R = _sylvester_det(a, da)
    c = np.fft.fft(R) / N
    exps = np.arange(lo, hi + 1)
    coeffs = c[exps % N] * 1.0
    # undo the x^e sampling phase: R(x_k) = sum c_e x_k^e, fft gives sum R_k x_k^{-n}
    coeffs = np.array([c[(e) % N] for e in exps])
    tiny = np.abs(coeffs) <= 1e-12 * np.abs(coeffs).max()
    nz = np.nonzero(~tiny)[0]
    if len(nz) == 0:
        return 0, np.zeros(0, complex)
    coeffs = coeffs[nz[0] : nz[-1] + 1]
    return int(lo + nz[0]), coeffs


def _fiber_derivs(P: LaurentPoly2, x: complex, y: complex):
    """``P, P_y, P_x, P_yy, P_xy`` at one point (with the y^jmin factor removed)."""
    a = P.y_coefficients(np.array([x]))[0]
    ax = P.y_coefficients(np.array([x]), x_derivative=True)[0] / x
    j = np.arange(len(a))
    yp = y ** j.astype(float)
    ym1 = np.where(j >= 1, y ** np.maximum(j - 1, 0).astype(float), 0)
    ym2 = np.where(j >= 2, y ** np.maximum(j - 2, 0).astype(float), 0)
    F = np.sum(a * yp)
    Fy = np.sum(j * a * ym1)
    Fx = np.sum(ax * yp)
    Fyy = np.sum(j * (j - 1) * a * ym2)
    Fxy = np.sum(j * ax * ym1)
    return F, Fy, Fx, Fyy, Fxy


def _refine_branch_point(P: LaurentPoly2, x0: complex) -> complex:
    c = P.y_coefficients(np.array([x0]))[0]
    ys = roots_batch(c)
    if len(ys) < 2:
        return x0
    dist = np.abs(ys[:, None] - ys[None, :]) + np.eye(len(ys)) * 1e300
    u, v = np.unravel_index(np.argmin(dist), dist.shape)
    x, y = complex(x0), complex(0.5 * (ys[u] + ys[v]))
    for _ in range(30):
        F, Fy, Fx, Fyy, Fxy = _fiber_derivs(P, x, y)
        det = Fx * Fyy - Fy * Fxy
        if det == 0 or not np.isfinite(det):
            return complex(x0)
        dx = (F * Fyy - Fy * Fy) / det
        dy = (Fx * Fy - Fxy * F) / det
        x, y = x - dx, y - dy
        if abs(dx) <= 4e-16 * max(1.0, abs(x)) and abs(dy) <= 4e-16 * max(1.0, abs(y)):
            break
    if not np.isfinite(x) or abs(x - x0) > 1e-5 * max(1.0, abs(x0)):
        return complex(x0)
    return complex(x)


def _cluster_values(xs: np.ndarray, tol: float) -> list[complex]:
    """Means of groups of values closer than ``tol * max(1, |x|)`` (multiple discriminant roots scatter)."""
    n = len(xs)
    parent = list(range(n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a in range(n):
        for b in range(a + 1, n):
            if abs(xs[a] - xs[b]) < tol * max(1.0, abs(xs[a])):
                parent[find(a)] = find(b)
    groups: dict[int, list[complex]] = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(complex(xs[a]))
    return [complex(np.mean(g)) for g in groups.values()]


def critical_points(P: LaurentPoly2) -> list[CriticalPoint]:
    """Nonzero finite branch points (y-discriminant roots) and ideal x-values (zeros of the lowest y-coefficient)."""
    out: list[CriticalPoint] = []
    lo, disc = y_discriminant(P)
    if len(disc) > 1:
        xs = roots_batch(disc)
        xs = xs[np.isfinite(xs) & (np.abs(xs) > 1e-12)]
        for x in _cluster_values(xs, CLUSTER_X):
            out.append(CriticalPoint(_refine_branch_point(P, complex(x)), "branch"))
    _, polys = P.x_polynomials()
    a0 = np.trim_zeros(polys[0], "f")
    a0 = np.trim_zeros(a0, "b")
    if len(a0) > 1:
        for x in roots_batch(a0):
            if abs(x) > 1e-12 and np.isfinite(x):
                out.append(CriticalPoint(complex(x), "ideal"))
    # snap nearly-unimodular values onto the circle and drop duplicates
    snapped: list[CriticalPoint] = []
    for c in out:
        x = c.x
        if abs(abs(x) - 1) < ON_CIRCLE:
            x = x / abs(x)
        if any(abs(x - s.x) < 1e-9 * max(1.0, abs(x)) and s.kind == c.kind for s in snapped):
            continue
        snapped.append(CriticalPoint(x, c.kind))
    snapped.sort(key=lambda c: (abs(c.x), np.angle(c.x)))
    return snapped


# ---------------------------------------------------------------------------
# Fibration over the unit circle
# ---------------------------------------------------------------------------


@dataclass
class BranchGraph:
    """All y-branches of the curve over ``x = exp(i theta)``, theta in ``[theta0, theta0 + 2 pi]``.

    Integrals of ``log|y_i|`` are computed by composite Gauss-Legendre on
    panels graded toward every critical x-value; the panels of width
    ``2 * gap`` centred on critical points of the circle itself are dropped.
    """

    P: LaurentPoly2
    theta0: float
    track: TrackedPath
    breaks: np.ndarray
    dropped: np.ndarray
    cum: np.ndarray  # (len(breaks), d): integral of log|y_i| from theta0 to each break
    critical: list[CriticalPoint]
    junctions: list[tuple[float, tuple[tuple[int, int], ...]]]
    n_gl: int = 10

    @property
    def degree(self) -> int:
        return self.track.degree

    @property
    def monodromy(self) -> tuple[int, ...]:
        return self.track.monodromy

    @property
    def theta(self) -> np.ndarray:
        return self.track.s

    @property
    def y(self) -> np.ndarray:
        return self.track.y

    @property
    def log_abs_y(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.track.y))

    @property
    def junction_thetas(self) -> list[float]:
        return [t for t, _ in self.junctions]

    @property
    def ideal_thetas(self) -> list[float]:
        return sorted(self.wrap(c.theta) for c in self.critical if c.on_circle and c.kind == "ideal")

    def wrap(self, theta):
        t = np.mod(np.asarray(theta, dtype=float) - self.theta0, TWO_PI) + self.theta0
        return t

    def values(self, theta) -> np.ndarray:
        """Branch values at arbitrary angles (already in the working range or wrapped into it)."""
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        inside = (t >= self.theta0) & (t <= self.theta0 + TWO_PI)
        t = np.where(inside, t, self.wrap(t))
        return self.track.values(t)

    def log_abs(self, theta) -> np.ndarray:
        return np.log(np.abs(self.values(theta)))

    def gamma(self, theta, y=None) -> np.ndarray:
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        if y is None:
            y = self.values(t)
        x = np.exp(1j * t)[:, None]
        return log_gauss(self.P, np.broadcast_to(x, y.shape), y)

    def integral(self, theta) -> np.ndarray:
        """``int_{theta0}^{theta} log|y_i|``, shape ``(len(theta), d)``."""
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        inside = (t >= self.theta0) & (t <= self.theta0 + TWO_PI)
        t = np.where(inside, t, self.wrap(t))
        m = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, len(self.breaks) - 2)
        base = self.cum[m]
        a = self.breaks[m]
        live = ~self.dropped[m] & (t > a)
        out = base.copy()
        if np.any(live):
            xg, wg = _gl(self.n_gl)
            tl, al = t[live], a[live]
            half = 0.5 * (tl - al)[:, None]
            nodes = al[:, None] + half * (xg + 1)
            vals = np.log(np.abs(self.values(nodes.ravel()))).reshape(nodes.shape + (self.degree,))
            out[live] += np.einsum("kn,knd->kd", half * wg, vals)
        return out

    def full_integrals(self) -> np.ndarray:
        """``int over the whole loop of log|y_i|`` per label."""
        return self.cum[-1]


def _gl(n):
    from .quad import gauss_legendre

    return gauss_legendre(n)


def _choose_seam(crit: list[CriticalPoint]) -> float:
    if not crit:
        return 0.0
    cand = np.linspace(0, TWO_PI, 1440, endpoint=False)
    xs = np.array([c.x for c in crit])
    dist = np.abs(np.exp(1j * cand)[:, None] - xs[None, :]).min(axis=1)
    if dist[0] >= 0.5 * dist.max():
        return 0.0
    return float(cand[np.argmax(dist)])


def branch_graph_over_circle(
    P: LaurentPoly2,
    base_panels: int = 64,
    n_gl: int = 10,
    critical: list[CriticalPoint] | None = None,
) -> BranchGraph:
    """Track every y-branch over the unit circle and integrate ``log|y|`` along it.

    ``P`` should have a single top vertex in y (see ``normalize_for_slicing``)
    so that no branch escapes to infinity on the circle.
    """
    crit = critical_points(P) if critical is None else critical
    theta0 = _choose_seam(crit)
    on = [c for c in crit if c.on_circle]
    xs = np.array([c.x for c in crit], dtype=complex)

    holes = []
    for c in on:
        gap = JUNCTION_GAP if c.kind == "branch" else IDEAL_GAP
        t = theta0 + (c.theta - theta0) % TWO_PI
        holes.append((t, gap))
    # merge coincident holes (an ideal point that is also a branch point)
    holes.sort()
    merged: list[list[float]] = []
    for t, g in holes:
        if merged and t - merged[-1][0] < 1e-9:
            merged[-1][1] = max(merged[-1][1], g)
        else:
            merged.append([t, g])
    hole_lo = np.array([t - g for t, g in merged])
    hole_hi = np.array([t + g for t, g in merged])

    def dist(theta):
        if len(xs) == 0:
            return np.full(np.shape(theta), np.inf)
        dd = np.abs(np.exp(1j * theta)[:, None] - xs[None, :]).min(axis=1)
        if len(hole_lo):
            inside = np.any((theta[:, None] > hole_lo) & (theta[:, None] < hole_hi), axis=1)
            dd = np.where(inside, np.inf, dd)
        return dd

    breaks = np.linspace(theta0, theta0 + TWO_PI, base_panels + 1)
    extra = []
    for t, g in merged:
        for e in (t - g, t + g):
            if theta0 < e < theta0 + TWO_PI:
                extra.append(e)
    breaks = np.concatenate([breaks, extra])
    for t, g in merged:
        for sh in (-TWO_PI, 0.0, TWO_PI):
            breaks = breaks[~((breaks > t + sh - g) & (breaks < t + sh + g))]
    breaks = graded_breaks(breaks, dist, kappa=1.0, min_width=1e-15)
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    dropped = np.zeros(len(mids), bool)
    for t, g in merged:
        dropped |= (mids > t - g) & (mids < t + g)
        # a hole straddling the seam is split over both ends of the loop
        dropped |= (mids > t - g + TWO_PI) & (mids < t + g + TWO_PI)
        dropped |= (mids > t - g - TWO_PI) & (mids < t + g - TWO_PI)

    nodes, weights = panel_rule(breaks, n_gl)
    grid = np.concatenate([breaks, nodes[~dropped].ravel()])
    def near(a, b):
        return abs((a - b + np.pi) % TWO_PI - np.pi) < 1e-9

    jumps = sorted({float(t) for t, _ in merged if any(c.kind == "branch" and near(c.theta, t) for c in on)})
    path = Path.circle(theta0, theta0 + TWO_PI)
    tp = track_fiber(P, path, grid=grid, jumps=jumps)
    d = tp.degree

    q = np.zeros((len(mids), d))
    if d:
        live = np.nonzero(~dropped)[0]
        idx = np.searchsorted(tp.s, nodes[live].ravel())
        yv = tp.y[idx].reshape(len(live), n_gl, d)
        q[live] = np.einsum("kn,knd->kd", weights[live], np.log(np.abs(yv)))
        # a dropped panel is charged its width times log|y| at its left edge
        for k in np.nonzero(dropped)[0]:
            yk = tp.y[np.searchsorted(tp.s, breaks[k])]
            with np.errstate(divide="ignore"):
                lg = np.log(np.abs(yk))
            q[k] = np.where(np.isfinite(lg), lg, 0.0) * (breaks[k + 1] - breaks[k])
    cum = np.vstack([np.zeros((1, d)), np.cumsum(q, axis=0)])

    junctions = []
    for t, labels in tp.junctions:
        k = int(np.searchsorted(tp.s, t)) - 1
        ya, yb = tp.y[k], tp.y[k + 1]
        mid = 0.5 * (ya + yb)
        pairs = []
        for u in labels:
            for v in labels:
                if u < v and abs(mid[u] - mid[v]) <= 2 * max(abs(ya[u] - yb[u]), abs(ya[v] - yb[v])) + 1e-8 * max(1.0, abs(mid[u])):
                    pairs.append((u, v))
        junctions.append((t, tuple(pairs)))
    return BranchGraph(P, theta0, tp, breaks, dropped, cum, crit, junctions, n_gl)


# ---------------------------------------------------------------------------
# Toric points
# ---------------------------------------------------------------------------


@dataclass
class ToricPoint:
    """A point of the curve on the unit torus, with slope, index and volume."""

    alpha: float
    beta: float
    slope: complex
    slope_class: str
    ramification: int = 1
    index: int = 0
    volume: float = float("nan")
    kind: str = "Transversal"  # Transversal | Tangential | OnOneDimComponent | UnresolvedSingular
    branch: int = -1
    theta: float = float("nan")  # parameter on the branch graph (unwrapped)
    members: tuple[tuple[int, float], ...] = ()

    @property
    def x(self) -> complex:
        return complex(np.exp(1j * self.alpha))

    @property
    def y(self) -> complex:
        return complex(np.exp(1j * self.beta))


def _runs(mask: np.ndarray, min_len: int = 3) -> list[tuple[int, int]]:
    """Maximal runs ``[a, b]`` (inclusive) of True with length >= min_len."""
    out = []
    k, n = 0, len(mask)
    while k < n:
        if mask[k]:
            j = k
            while j + 1 < n and mask[j + 1]:
                j += 1
            if j - k + 1 >= min_len:
                out.append((k, j))
            k = j + 1
        else:
            k += 1
    return out


def _make_point(bg: BranchGraph, theta: float, col: int, kind: str) -> ToricPoint:
    y = bg.values(theta)[0, col]
    gam = complex(bg.gamma(np.array([theta]), np.array([[y]]) if bg.degree == 1 else bg.values(theta))[0, col])
    return ToricPoint(
        alpha=float(theta % TWO_PI),
        beta=float(np.angle(y) % TWO_PI),
        slope=gam,
        slope_class=slope_class(gam),
        kind=kind,
        branch=col,
        theta=float(theta),
        members=((col, float(theta)),),
    )


def find_toric_points(bg: BranchGraph) -> tuple[list[ToricPoint], list[tuple[int, float, float]]]:
    """Toric points of the curve, plus the one-dimensional torus components.

    Returns ``(points, flat)`` where ``flat`` lists ``(branch, theta_a,
    theta_b)`` intervals on which ``|y| = 1`` identically.
    """
    S = bg.theta
    Y = bg.y
    d = bg.degree
    if d == 0:
        return [], []
    G = np.log(np.abs(Y))
    Gam = bg.gamma(S, Y)
    imG = np.where(np.isfinite(Gam), Gam.imag, 0.0)
    jumps = np.array(bg.junction_thetas)

    def straddles(k, pts):
        return len(pts) > 0 and np.any((pts > S[k]) & (pts < S[k + 1]))

    found: list[ToricPoint] = []
    flat_runs: list[tuple[int, float, float]] = []
    for col in range(d):
        g = G[:, col]
        flat = (np.abs(g) < EPS_FLAT) & (np.abs(imG[:, col]) < 1e-6)
        runs = _runs(flat)
        in_run = np.zeros(len(S), bool)
        for a, b in runs:
            in_run[a : b + 1] = True
            flat_runs.append((col, float(S[a]), float(S[b])))
            if a > 0:
                found.append(_make_point(bg, float(S[a]), col, "OnOneDimComponent"))
            if b < len(S) - 1:
                found.append(_make_point(bg, float(S[b]), col, "OnOneDimComponent"))
        sg = np.where(g >= 0, 1, -1)

        def gfun(t, col=col):
            return float(np.log(np.abs(bg.values(t)[0, col])))

        def hfun(t, col=col):
            return float(bg.gamma(np.array([t]))[0, col].imag)

        for k in np.nonzero(sg[:-1] != sg[1:])[0]:
            if in_run[k] or in_run[k + 1]:
                continue
            if straddles(k, jumps):
                t = float(jumps[(jumps > S[k]) & (jumps < S[k + 1])][0])
                _, _, Fx, _, _ = _fiber_derivs(bg.P, np.exp(1j * t), bg.values(S[k])[0, col])
                F = bg.values(S[k])[0, col]
                if abs(Fx) < 1e-6 * max(1.0, float(np.abs(bg.P.coefficients).sum())):
                    found.append(replace(_make_point(bg, S[k], col, "UnresolvedSingular"), theta=t, alpha=float(t % TWO_PI), beta=float(np.angle(F) % TWO_PI)))
                    continue
                raise BranchCollision(f"toric point at a branch point (theta = {t % TWO_PI:.10f})", t)
            t = _root(gfun, S[k], S[k + 1])
            found.append(_make_point(bg, t, col, "Transversal"))
        # tangential contacts: extremum of log|y| with value ~ 0
        h = imG[:, col]
        for k in np.nonzero(np.sign(h[:-1]) * np.sign(h[1:]) < 0)[0]:
            if in_run[k] or in_run[k + 1] or sg[k] != sg[k + 1]:
                continue
            if min(abs(g[k]), abs(g[k + 1])) > 1e-2 or straddles(k, jumps):
                continue
            t = _root(hfun, S[k], S[k + 1])
            if abs(gfun(t)) < EPS_TANGENT:
                found.append(_make_point(bg, t, col, "Tangential"))
    return _merge_points(bg, found), flat_runs


def _root(f, a: float, b: float) -> float:
    # tabulated and re-evaluated signs can disagree when an endpoint is ~0
    fa, fb = f(a), f(b)
    if fa == 0 or fb == 0 or (fa > 0) == (fb > 0):
        return float(a if abs(fa) <= abs(fb) else b)
    return float(brentq(f, a, b, xtol=1e-15, rtol=1e-15))


def _merge_points(bg: BranchGraph, pts: list[ToricPoint]) -> list[ToricPoint]:
    pts = sorted(pts, key=lambda p: (p.branch, p.theta))
    same_branch: list[ToricPoint] = []
    for p in pts:
        if same_branch and same_branch[-1].branch == p.branch and abs(p.theta - same_branch[-1].theta) < MERGE_TOL:
            q = same_branch[-1]
            kind = q.kind if q.kind != "Transversal" else ("Tangential" if p.kind == "Transversal" else p.kind)
            same_branch[-1] = replace(q, kind=kind)
            continue
        same_branch.append(p)
    # distinct branches through the same torus point
    out: list[ToricPoint] = []
    for p in sorted(same_branch, key=lambda p: p.theta):
        hit = None
        for k, q in enumerate(out):
            dt = abs((p.theta - q.theta + np.pi) % TWO_PI - np.pi)
            if dt < MERGE_TOL and abs(np.exp(1j * p.beta) - np.exp(1j * q.beta)) < 1e-6:
                hit = k
                break
        if hit is None:
            out.append(p)
            continue
        q = out[hit]
        kind = q.kind
        if not (np.isfinite(p.slope) and np.isfinite(q.slope) and abs(p.slope - q.slope) < 1e-6 * max(1.0, abs(q.slope))):
            kind = "UnresolvedSingular"
        out[hit] = replace(q, ramification=q.ramification + p.ramification, kind=kind, members=q.members + p.members)
    out.sort(key=lambda p: (p.alpha, p.beta))
    return out


# ---------------------------------------------------------------------------
# Arcs and indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    branch: int  # label at the start of the arc
    theta_start: float  # position along the strand (unwrapped, may exceed 2 pi)
    theta_end: float
    start: int | None  # node indices; None for a closed loop
    end: int | None
    delta_v: float


@dataclass
class ArcGraph:
    nodes: list[ToricPoint]
    arcs: list[Arc]
    components: list[list[int]]
    closed_loops: list[tuple[tuple[int, ...], float]] = field(default_factory=list)
    flat: list[tuple[int, float, float]] = field(default_factory=list)

    def total_delta_v(self) -> float:
        return float(sum(a.delta_v for a in self.arcs) + sum(v for _, v in self.closed_loops))


def _cycles(perm: tuple[int, ...]) -> list[list[int]]:
    seen = set()
    out = []
    for s in range(len(perm)):
        if s in seen:
            continue
        cyc = []
        k = s
        while k not in seen:
            seen.add(k)
            cyc.append(k)
            k = perm[k]
        out.append(cyc)
    return out


def build_arc_graph(bg: BranchGraph, toric: list[ToricPoint], flat: list[tuple[int, float, float]] = ()) -> ArcGraph:
    """Oriented arcs (increasing theta) on which ``|y| > 1``, and the index of every toric point."""
    d = bg.degree
    theta0 = bg.theta0
    full = bg.full_integrals()
    events_by_label: dict[int, list[tuple[float, int]]] = {i: [] for i in range(d)}
    for n, p in enumerate(toric):
        for col, t in p.members:
            events_by_label[col].append((float(t), n))
    flat_by_label: dict[int, list[tuple[float, float]]] = {i: [] for i in range(d)}
    for col, a, b in flat:
        flat_by_label[col].append((a, b))

    arcs: list[Arc] = []
    loops: list[tuple[tuple[int, ...], float]] = []
    mono = bg.monodromy or tuple(range(d))
    for cyc in _cycles(mono):
        L = len(cyc)
        total = TWO_PI * L
        offs = np.concatenate([[0.0], np.cumsum(full[cyc])])

        def J(pos):
            pos = np.asarray(pos, dtype=float)
            q = np.clip((pos // TWO_PI).astype(int), 0, L - 1)
            loc = theta0 + pos - q * TWO_PI
            out = np.empty(len(pos))
            for k, (qq, tt) in enumerate(zip(q, loc)):
                out[k] = offs[qq] + bg.integral(np.array([tt]))[0, cyc[qq]]
            return out

        def g_at(pos):
            q = int(pos // TWO_PI) % L
            return float(bg.log_abs(np.array([theta0 + pos - q * TWO_PI]))[0, cyc[q]])

        def in_flat(pos):
            q = int(pos // TWO_PI) % L
            t = theta0 + pos - q * TWO_PI
            return any(a - 1e-12 <= t <= b + 1e-12 for a, b in flat_by_label[cyc[q]])

        ev = []
        for q, lab in enumerate(cyc):
            for t, n in events_by_label[lab]:
                ev.append((q * TWO_PI + (t - theta0), n))
        ev.sort()
        if not ev:
            if all(flat_by_label[lab] for lab in cyc):
                continue
            if g_at(0.5) > 0 and np.all(bg.log_abs_y[:, cyc] > 0):
                loops.append((tuple(cyc), float(offs[-1])))
            continue
        for k in range(len(ev)):
            pa, na = ev[k]
            pb, nb = ev[(k + 1) % len(ev)]
            if k == len(ev) - 1:
                pb += total
            if pb - pa < MERGE_TOL:
                continue
            mid = 0.5 * (pa + pb) % total
            if in_flat(mid) or g_at(mid) <= 0:
                continue
            ja = J([pa % total])[0]
            jb = J([pb % total])[0] + (offs[-1] if pb >= total else 0.0)
            if pb % total < 1e-15 and pb >= total:
                jb = offs[-1]
            arcs.append(Arc(cyc[int(pa // TWO_PI) % L], pa, pb, na, nb, float(jb - ja)))

    # index by incidence
    idx = np.zeros(len(toric), dtype=int)
    for a in arcs:
        idx[a.end] += 1
        idx[a.start] -= 1
    nodes = []
    for n, p in enumerate(toric):
        q = replace(p, index=int(idx[n]))
        if q.kind in ("Transversal", "Tangential") and q.slope_class in ("PlusImaginary", "MinusImaginary"):
            expect = -q.ramification * int(np.sign(q.slope.imag))
            if expect != q.index:
                raise IndexInconsistency(
                    f"toric point at alpha={q.alpha:.9f}: arc incidence gives {q.index}, slope sign gives {expect}"
                )
        nodes.append(q)

    # arc-connected components
    parent = list(range(len(nodes)))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a in arcs:
        parent[find(a.start)] = find(a.end)
    comps: dict[int, list[int]] = {}
    for n in range(len(nodes)):
        comps.setdefault(find(n), []).append(n)
    ag = ArcGraph(nodes, arcs, list(comps.values()), loops, list(flat))
    _check_endpoints(bg, ag)
    return ag


def _check_endpoints(bg: BranchGraph, ag: ArcGraph) -> None:
    for a in ag.arcs:
        for n in (a.start, a.end):
            p = ag.nodes[n]
            if p.kind in ("OnOneDimComponent", "UnresolvedSingular"):
                continue
            if abs(abs(np.exp(1j * p.beta)) - 1) > EPS_TORIC:
                raise DanglingArc(f"arc endpoint off the torus at alpha={p.alpha}")
            g = bg.log_abs(np.array([p.theta]))[0, p.branch]
            if abs(g) > 1e3 * EPS_TORIC:
                raise DanglingArc(f"arc endpoint at alpha={p.alpha:.9f} has log|y| = {g:.3e}")


def _adist(a: float, b: float) -> float:
    return abs(math.remainder(a - b, TWO_PI))


def index(z: ToricPoint, ag: ArcGraph) -> int:
    """Index of a node of ``ag`` (arriving minus leaving arcs)."""
    for n, p in enumerate(ag.nodes):
        if p is z or (_adist(p.alpha, z.alpha) < MERGE_TOL and _adist(p.beta, z.beta) < 1e-6):
            return sum(1 for a in ag.arcs if a.end == n) - sum(1 for a in ag.arcs if a.start == n)
    raise KeyError("point is not a node of the arc graph")


# ---------------------------------------------------------------------------
# Amoeba raster
# ---------------------------------------------------------------------------


def amoeba_raster(
    P: LaurentPoly2,
    window: tuple[float, float, float, float] = (-3.0, 3.0, -3.0, 3.0),
    bins: tuple[int, int] = (120, 120),
    n_radius: int = 240,
    n_angle: int = 720,
):
    """Hit counts of the amoeba over a grid of ``(log|x|, log|y|)``.

    Fibers are sampled over ``x = exp(u + i theta)`` for ``n_radius`` values
    of ``u`` spanning the window and ``n_angle`` angles.
    Returns ``(u_edges, v_edges, counts)``.
    """
    umin, umax, vmin, vmax = window
    u = np.linspace(umin, umax, n_radius)
    th = np.linspace(0, TWO_PI, n_angle, endpoint=False)
    x = np.exp(u[:, None] + 1j * th[None, :]).ravel()
    c = P.y_coefficients(x)
    keep = np.abs(c[:, -1]) > 1e-14 * np.abs(c).max(axis=1)
    ys = roots_batch(c[keep]) if c.shape[1] > 1 else np.zeros((int(keep.sum()), 0))
    uu = np.repeat(np.log(np.abs(x[keep])), ys.shape[1])
    with np.errstate(divide="ignore"):
        vv = np.log(np.abs(ys)).ravel()
    ok = np.isfinite(vv)
    counts, ue, ve = np.histogram2d(uu[ok], vv[ok], bins=bins, range=[[umin, umax], [vmin, vmax]])
    return ue, ve, counts.astype(int)
