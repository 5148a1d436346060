"""Univariate root finding (Ehrlich-Aberth) and continuation of fiber roots."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BranchCollision, DegreeDrop, NoConvergence
from .poly import LaurentPoly2, UniPoly

EPS_RESIDUAL = 1e-9
CLUSTER_EPS = 1e-7
GAP_RATIO = 4.0
MAX_ITERS = 500


def horner(coeffs: np.ndarray, z: np.ndarray):
    """Values and derivatives of batched polynomials.

    ``coeffs`` has shape ``(..., d+1)`` (lowest degree first); ``z`` has shape
    ``(..., m)``.  Returns ``(p, dp)`` of shape ``(..., m)``.
    """
    c = coeffs[..., None, :]
    p = np.broadcast_to(c[..., -1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    # huge roots near ideal points overflow; callers discard non-finite values
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(coeffs.shape[-1] - 2, -1, -1):
            dp = dp * z + p
            p = p * z + c[..., k]
    return p, dp


def _initial_circle(coeffs: np.ndarray) -> np.ndarray:
    d = coeffs.shape[-1] - 1
    lead = np.abs(coeffs[..., -1])
    mags = np.abs(coeffs[..., :-1]) / lead[..., None]
    k = np.arange(d)
    # Fujiwara-type bound, then halve: Aberth is insensitive to the exact radius.
    bound = np.max(mags ** (1.0 / (d - k)), axis=-1)
    low = np.abs(coeffs[..., 0]) / lead
    radius = np.where(low > 0, np.maximum(np.abs(low) ** (1.0 / d), 0.5 * bound), 0.5 * bound)
    radius = np.maximum(radius, 1e-3)
    ang = 2 * np.pi * np.arange(d) / d + 0.4
    return radius[..., None] * np.exp(1j * ang)


def aberth(coeffs, z0=None, tol: float = 1e-15, max_iter: int = MAX_ITERS):
    """Simultaneous Ehrlich-Aberth iteration on a batch of polynomials.

    Returns ``(roots, converged)``; ``roots`` has shape ``(..., d)``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    d = coeffs.shape[-1] - 1
    if d < 1:
        return np.zeros(coeffs.shape[:-1] + (0,), dtype=complex), np.ones(coeffs.shape[:-1], bool)
    coeffs = coeffs / coeffs[..., -1:]
    if d == 1:
        return -coeffs[..., :1], np.ones(coeffs.shape[:-1], bool)
    z = _initial_circle(coeffs) if z0 is None else np.array(z0, dtype=complex)
    shape = coeffs.shape[:-1]
    flat_c = coeffs.reshape(-1, d + 1)
    flat_z = z.reshape(-1, d).copy()
    done = np.zeros(len(flat_c), dtype=bool)
    eye = np.eye(d, dtype=bool)
    active = np.arange(len(flat_c))
    for _ in range(max_iter):
        c, za = flat_c[active], flat_z[active]
        p, dp = horner(c, za)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            diff = za[:, :, None] - za[:, None, :]
            diff[:, eye] = np.inf
            s = (1.0 / diff).sum(axis=-1)
            corr = w / (1 - w * s)
        corr = np.where(np.isfinite(corr) & (p != 0), corr, 0)
        flat_z[active] = za - corr
        small = np.abs(corr) <= tol * np.maximum(np.abs(za), 1e-300)
        # a root is also settled once its residual is at rounding level
        bound, _ = horner(np.abs(c), np.abs(za))
        settled = np.abs(p) <= 8e-16 * bound.real
        fin = np.all(small | settled, axis=-1)
        done[active[fin]] = True
        active = active[~fin]
        if len(active) == 0:
            break
    z = flat_z.reshape(shape + (d,))
    done = done.reshape(shape)
    return z, done


def polish(coeffs: np.ndarray, z: np.ndarray, steps: int = 2) -> np.ndarray:
    """Newton steps, each accepted only where it lowers the residual."""
    coeffs = np.asarray(coeffs, dtype=complex)
    for _ in range(steps):
        p, dp = horner(coeffs, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            znew = z - p / dp
        ok = np.isfinite(znew)
        pn, _ = horner(coeffs, np.where(ok, znew, z))
        z = np.where(ok & (np.abs(pn) < np.abs(p)), znew, z)
    return z


def roots_batch(coeffs, z0=None) -> np.ndarray:
    """All roots of every polynomial in the batch (shape ``(..., d)``)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    z, ok = aberth(coeffs, z0)
    if not np.all(ok):
        # retry stragglers from a fresh start with more iterations
        idx = np.nonzero(~ok)
        z2, _ = aberth(coeffs[idx], None, max_iter=4 * MAX_ITERS)
        z[idx] = z2
    return polish(coeffs, z)


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicities; ``roots`` holds ``(value, multiplicity, residual)``."""

    roots: tuple[tuple[complex, int, float], ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([r for r, m, _ in self.roots for _ in range(m)], dtype=complex)

    @property
    def degree(self) -> int:
        return sum(m for _, m, _ in self.roots)

    def __len__(self):
        return len(self.roots)


def _taylor_coeffs(a: np.ndarray, c: complex, upto: int):
    """Taylor coefficients of ``sum a_k t^k`` at ``c`` and their rounding scales."""
    d = len(a) - 1
    out, scale = [], []
    for j in range(upto + 1):
        ks = np.arange(j, d + 1)
        binom = np.array([_binom(k, j) for k in ks], dtype=float)
        terms = binom * a[j:] * c ** (ks - j)
        out.append(terms.sum())
        scale.append(np.abs(terms).sum())
    return out, scale


def _refine_multiple(a: np.ndarray, c: complex, m: int) -> complex:
    """Newton on the (m-1)-th derivative, whose root at a multiplicity-m zero is simple."""
    der = a.copy()
    for _ in range(m - 1):
        der = der[1:] * np.arange(1, len(der))
    for _ in range(8):
        p, dp = horner(der, np.array([c]))
        if dp[0] == 0:
            break
        step = p[0] / dp[0]
        c = c - step
        if abs(step) <= 1e-16 * max(1.0, abs(c)):
            break
    return complex(c)


def _binom(n: int, k: int) -> float:
    from math import comb

    return float(comb(n, k))


def _cluster(a: np.ndarray, z: np.ndarray, eps: float):
    """Group numerically coincident roots into multiple roots.

    Candidates are linked at a loose radius; a group of size m survives only
    if the Taylor coefficients of orders < m vanish at its centroid up to
    rounding (or up to the size the group would have at radius ``eps``).
    """
    n = len(z)
    if n == 0:
        return []
    scale = np.maximum(1.0, np.abs(z))
    parent = list(range(n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for u in range(n):
        for v in range(u + 1, n):
            if abs(z[u] - z[v]) < 1e-3 * max(scale[u], scale[v]):
                parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for u in range(n):
        groups.setdefault(find(u), []).append(u)
    out = []
    for members in groups.values():
        stack = [members]
        while stack:
            g = stack.pop()
            m = len(g)
            c = z[g].mean()
            if m == 1:
                out.append((z[g[0]], 1))
                continue
            c = _refine_multiple(a, c, m)
            tc, sc = _taylor_coeffs(a, c, m)
            rho = eps * max(1.0, abs(c))
            ok = all(abs(tc[j]) <= abs(tc[m]) * rho ** (m - j) + 1e-10 * sc[j] for j in range(m))
            if ok:
                out.append((c, m))
            else:
                # split off the member farthest from the centroid and retry
                far = max(g, key=lambda u: abs(z[u] - c))
                stack.append([far])
                stack.append([u for u in g if u != far])
    return out


def roots_univariate(p: UniPoly, cluster_eps: float = CLUSTER_EPS, max_iters: int = MAX_ITERS) -> RootSet:
    """All roots of ``p`` (Laurent shift ignored) with multiplicities and residuals."""
    a = p.as_array()
    d = len(a) - 1
    if d < 1:
        return RootSet(())
    z, ok = aberth(a, max_iter=max_iters)
    z = polish(a, z)
    groups = _cluster(a, z, cluster_eps)
    scale = np.abs(a).sum()
    out = []
    for r, m in groups:
        res = float(abs(horner(a, np.array([r]))[0][0]))
        out.append((complex(r), int(m), res))
    out.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))
    rs = RootSet(tuple(out))
    if not ok:
        bad = [r for r, m, res in out if res > EPS_RESIDUAL * scale * max(1.0, abs(r)) ** d]
        if bad:
            raise NoConvergence(f"Aberth iteration did not converge after {max_iters} iterations", best=rs)
    return rs


# ---------------------------------------------------------------------------
# Matching and continuation
# ---------------------------------------------------------------------------


def match_fibers(prev: np.ndarray, new: np.ndarray, gap_ratio: float = GAP_RATIO):
    """Permutation ``perm`` with ``new[perm[k]]`` the continuation of ``prev[k]``.

    Greedy nearest neighbour, with optimal assignment whenever the greedy
    choice is ambiguous (second-nearest / nearest < ``gap_ratio``).
    Returns ``(perm, ambiguous)``.
    """
    d = len(prev)
    if d == 0:
        return np.zeros(0, dtype=int), False
    dist = np.abs(prev[:, None] - new[None, :])
    if d == 1:
        return np.zeros(1, dtype=int), False
    srt = np.sort(dist, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = srt[:, 1] / srt[:, 0]
    perm = np.argmin(dist, axis=1)
    ambiguous = bool(np.any(ratio < gap_ratio))
    if ambiguous or len(set(perm.tolist())) < d:
        _, perm = linear_sum_assignment(dist)
    return np.asarray(perm, dtype=int), ambiguous


class Path:
    """A parametrized path ``s -> x(s)`` in the x-plane, ``s`` in ``[s0, s1]``."""

    def __init__(self, x: Callable, dx: Callable, s0: float, s1: float, breakpoints: Sequence[float] = (), closed: bool = False):
        self.x = x
        self.dx = dx
        self.s0 = float(s0)
        self.s1 = float(s1)
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if s0 < b < s1))
        self.closed = closed

    @classmethod
    def circle(cls, theta0: float = 0.0, theta1: float = 2 * np.pi, radius: float = 1.0) -> "Path":
        closed = abs((theta1 - theta0) - 2 * np.pi) < 1e-15
        return cls(
            lambda s: radius * np.exp(1j * np.asarray(s)),
            lambda s: 1j * radius * np.exp(1j * np.asarray(s)),
            theta0,
            theta1,
            closed=closed,
        )

    @classmethod
    def polyline(cls, points: Sequence[complex], closed: bool = False) -> "Path":
        pts = np.asarray(points, dtype=complex)
        n = len(pts) - 1

        def x(s):
            s = np.asarray(s, dtype=float)
            k = np.clip(np.floor(s).astype(int), 0, n - 1)
            t = s - k
            return pts[k] + t * (pts[k + 1] - pts[k])

        def dx(s):
            s = np.asarray(s, dtype=float)
            k = np.clip(np.floor(s).astype(int), 0, n - 1)
            return pts[k + 1] - pts[k]

        return cls(x, dx, 0.0, float(n), breakpoints=range(1, n), closed=closed)


def slice_poly(P: LaurentPoly2, x):
    """Coefficients in y (lowest first) of ``P(x, y)``, after removing the y^jmin factor."""
    return P.y_coefficients(x)


def dyds(P: LaurentPoly2, x, y, dx):
    """Derivative of the fiber roots along a path: ``dy/ds = -(P_x / P_y) dx/ds``.

    ``x`` has shape ``(...)`` or ``(..., 1)``; ``y`` has shape ``(..., d)``.
    Works through y = 0 (no logarithmic derivatives involved).
    """
    x = np.asarray(x, dtype=complex).reshape(np.shape(y)[:-1])
    dx = np.asarray(dx, dtype=complex).reshape(np.shape(y)[:-1])
    c = P.y_coefficients(x)
    cx = P.y_coefficients(x, x_derivative=True)
    px, _ = horner(cx, y)
    _, py = horner(c, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        return -(px / py) * (dx / x)[..., None]


@dataclass
class TrackedPath:
    """Branch-consistent fibers of ``P(x(s), y) = 0`` along a path."""

    P: LaurentPoly2
    path: Path
    s: np.ndarray
    y: np.ndarray
    monodromy: tuple[int, ...] | None = None
    junctions: list[tuple[float, tuple[int, ...]]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.y.shape[1]

    @property
    def x(self) -> np.ndarray:
        return self.path.x(self.s)

    def locate(self, s: float) -> int:
        k = int(np.searchsorted(self.s, s, side="right") - 1)
        return min(max(k, 0), len(self.s) - 2)

    def values(self, s) -> np.ndarray:
        """Fiber values at arbitrary parameters, shape ``(len(s), d)``.

        Cubic Hermite guesses from the bracketing samples, then Newton.
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        k = np.clip(np.searchsorted(self.s, s, side="right") - 1, 0, len(self.s) - 2)
        s0, s1 = self.s[k], self.s[k + 1]
        h = (s1 - s0)[:, None]
        t = ((s - s0) / (s1 - s0))[:, None]
        y0, y1 = self.y[k], self.y[k + 1]
        x0, x1 = self.path.x(s0)[:, None], self.path.x(s1)[:, None]
        d0 = dyds(self.P, x0, y0, self.path.dx(s0)[:, None])
        d1 = dyds(self.P, x1, y1, self.path.dx(s1)[:, None])
        h00 = 2 * t**3 - 3 * t**2 + 1
        h10 = t**3 - 2 * t**2 + t
        h01 = -2 * t**3 + 3 * t**2
        h11 = t**3 - t**2
        herm = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
        lin = (1 - t) * y0 + t * y1
        guess = np.where(np.isfinite(herm), herm, lin)
        # fall back to linear interpolation where the Hermite step is implausible
        span = np.abs(y1 - y0) + 1e-300
        guess = np.where(np.abs(guess - lin) > 2 * span, lin, guess)
        coeffs = slice_poly(self.P, self.path.x(s))
        return newton_fiber(coeffs, guess)


def newton_fiber(coeffs: np.ndarray, guess: np.ndarray, steps: int = 6) -> np.ndarray:
    """Newton refinement of every guessed root of every fiber polynomial."""
    z = guess.copy()
    for _ in range(steps):
        p, dp = horner(coeffs, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        good = np.isfinite(step)
        z = np.where(good, z - np.where(good, step, 0), z)
        if np.all(np.abs(np.where(good, step, 0)) <= 1e-15 * np.maximum(np.abs(z), 1e-300)):
            break
    return z


def _gaps(y: np.ndarray) -> np.ndarray:
    """Distance from each root to the nearest other root (batched over leading axes)."""
    d = y.shape[-1]
    if d < 2:
        return np.full(y.shape, np.inf)
    dist = np.abs(y[..., :, None] - y[..., None, :])
    dist[..., np.arange(d), np.arange(d)] = np.inf
    return dist.min(axis=-1)


def _pair_matches(A: np.ndarray, B: np.ndarray, gap_ratio: float = GAP_RATIO):
    """Vectorized :func:`match_fibers` over rows: ``B[k, perm[k, a]]`` continues ``A[k, a]``."""
    n, d = A.shape
    if d == 1:
        return np.zeros((n, 1), dtype=int), np.zeros(n, bool)
    dist = np.abs(A[:, :, None] - B[:, None, :])
    perm = np.argmin(dist, axis=2)
    two = np.partition(dist, 1, axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = two[:, :, 1] / two[:, :, 0]
    valid = np.all(np.sort(perm, axis=1) == np.arange(d), axis=1)
    amb = np.any(ratio < gap_ratio, axis=1) | ~valid
    for k in np.nonzero(amb)[0]:
        perm[k] = linear_sum_assignment(dist[k])[1]
    return perm, amb


def track_fiber(
    P: LaurentPoly2,
    path: Path,
    initial: np.ndarray | None = None,
    samples: int = 512,
    grid: Sequence[float] | None = None,
    jumps: Sequence[float] = (),
    motion_ratio: float = 0.1,
    min_step: float = 1e-13,
    max_rounds: int = 60,
) -> TrackedPath:
    """Continue all roots of ``P(x(s), y)`` along ``path``.

    Every parameter of ``grid`` (default: ``samples`` uniform steps plus the
    path breakpoints) is solved at once; consecutive fibers are matched and
    a step is bisected until every root moves by less than ``motion_ratio``
    times its distance to the other roots.  Steps straddling a parameter in
    ``jumps`` (known branch points) are matched by optimal assignment without
    the motion test; the coincident branches are recorded as junctions.
    """
    jmin, jmax = P.y_range()
    d = jmax - jmin
    if grid is None:
        grid = np.linspace(path.s0, path.s1, samples + 1)
        grid = np.concatenate([grid, list(path.breakpoints)])
    s = np.unique(np.asarray(grid, dtype=float))
    jumps = np.sort(np.asarray([j for j in jumps if s[0] < j < s[-1]], dtype=float))

    def solve(params):
        c = slice_poly(P, path.x(params))
        if d and np.any(np.abs(c[:, -1]) <= 1e-12 * lead0):
            bad = params[np.argmin(np.abs(c[:, -1]))]
            raise DegreeDrop(f"leading coefficient vanishes at s = {bad:.12g}")
        return roots_batch(c)

    lead0 = float(np.max(np.abs(slice_poly(P, path.x(s[:1]))[0, -1]))) if d else 1.0
    if d == 0:
        return TrackedPath(P, path, s, np.zeros((len(s), 0), complex), tuple() if path.closed else None)

    Y = solve(s)
    for _ in range(max_rounds):
        perm, _ = _pair_matches(Y[:-1], Y[1:])
        moved = np.abs(np.take_along_axis(Y[1:], perm, axis=1) - Y[:-1])
        gap = np.minimum(_gaps(Y[:-1]), np.take_along_axis(_gaps(Y[1:]), perm, axis=1))
        bad = np.any(moved > motion_ratio * gap, axis=1)
        if len(jumps):
            k = np.searchsorted(jumps, s[:-1], side="right")
            straddle = (k < len(jumps)) & (jumps[np.minimum(k, len(jumps) - 1)] < s[1:])
            bad &= ~straddle
        if not bad.any():
            break
        idx = np.nonzero(bad)[0]
        h = s[idx + 1] - s[idx]
        if np.any(h <= min_step):
            at = s[idx[np.argmin(h)]]
            raise BranchCollision(f"path meets a branch point near s = {at:.12g}", float(at))
        mids = 0.5 * (s[idx] + s[idx + 1])
        Ymid = solve(mids)
        order = np.argsort(np.concatenate([s, mids]), kind="stable")
        s = np.concatenate([s, mids])[order]
        Y = np.concatenate([Y, Ymid])[order]
    else:
        raise BranchCollision("step refinement did not settle", float(s[0]))

    # compose the pairwise matchings into branch labels
    lab = np.empty_like(Y)
    pos = np.arange(d)
    if initial is not None:
        first, _ = match_fibers(np.asarray(initial, dtype=complex), Y[0])
        pos = first
    lab[0] = Y[0][pos]
    for k in range(len(s) - 1):
        pos = perm[k][pos]
        lab[k + 1] = Y[k + 1][pos]

    junctions = []
    for j in jumps:
        k = int(np.searchsorted(s, j)) - 1
        close = _coincident(0.5 * (lab[k] + lab[k + 1]), lab[k], lab[k + 1])
        junctions.append((float(j), close))
    mono = None
    if path.closed:
        p, _ = match_fibers(lab[-1], lab[0])
        mono = tuple(int(v) for v in p)
    return TrackedPath(P, path, s, lab, mono, junctions)


def _coincident(mid: np.ndarray, left: np.ndarray, right: np.ndarray) -> tuple[int, ...]:
    """Labels whose values nearly coincide at a junction (relative to the other roots)."""
    d = len(mid)
    spread = np.abs(left - right)
    out = set()
    for u in range(d):
        for v in range(u + 1, d):
            sep = abs(mid[u] - mid[v])
            if sep <= 2 * max(spread[u], spread[v]) + 1e-9 * max(1.0, abs(mid[u])):
                out |= {u, v}
    return tuple(sorted(out))
