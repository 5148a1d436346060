"""Integration of eta = log|y| d arg x - log|x| d arg y along the curve.

Volume profiles over |x| = 1, their additive constants, volumes at toric
points, exactness certificates and period scans over one-parameter
families.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .dilog import bloch_wigner, clausen  # noqa: F401  (re-exported evaluators)
from .errors import (
    CornerMismatch,
    DisconnectedComponent,
    InconsistentCycle,
    MahlerError,
    UnwrapAmbiguity,
)
from .poly import LaurentPoly2, corner_modulus, newton_polygon, side_polynomials
from .quad import graded_breaks, panel_rule
from .roots import Path, dyds, track_fiber
from .torus import TWO_PI, BranchGraph, CriticalPoint, ToricPoint

QUAD_TOL = 1e-9
EXACT_TOL = 1e-6
TEMPER_TOL = 1e-7


# ---------------------------------------------------------------------------
# eta along paths
# ---------------------------------------------------------------------------


def integrate_eta(x, y) -> float:
    """Trapezoidal integral of eta over a sampled curve path ``(x_k, y_k)``.

    Arguments are unwrapped step by step; a step whose argument change is
    not below pi/2 cannot be unwrapped reliably and raises UnwrapAmbiguity.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if len(x) < 2:
        return 0.0
    dax = np.angle(x[1:] / x[:-1])
    day = np.angle(y[1:] / y[:-1])
    bad = (np.abs(dax) >= np.pi / 2) | (np.abs(day) >= np.pi / 2)
    if bad.any():
        k = int(np.argmax(bad))
        raise UnwrapAmbiguity(f"argument jump at sample {k} is too large to unwrap")
    lx, ly = np.log(np.abs(x)), np.log(np.abs(y))
    return float(np.sum(0.5 * (ly[1:] + ly[:-1]) * dax - 0.5 * (lx[1:] + lx[:-1]) * day))


def eta_density(P: LaurentPoly2, x, y, dx) -> np.ndarray:
    """``eta(d/ds)`` at curve points ``(x, y_i)`` moving with ``dx/ds``; shape of ``y``."""
    x = np.asarray(x, dtype=complex)
    dy = dyds(P, x, y, dx)
    xs = x.reshape(np.shape(y)[:-1])[..., None]
    dxs = np.asarray(dx, dtype=complex).reshape(np.shape(y)[:-1])[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(np.abs(y)) * (dxs / xs).imag - np.log(np.abs(xs)) * (dy / y).imag


def eta_along(
    P: LaurentPoly2,
    path: Path,
    initial: np.ndarray,
    critical: np.ndarray = np.zeros(0, complex),
    panels_per_piece: int = 16,
    n_gl: int = 10,
):
    """Integrate eta over every lift of ``path`` starting at the fiber ``initial``.

    Gauss-Legendre panels are graded toward the critical x-values.  Returns
    ``(integrals, perm)``: ``integrals[i]`` is the integral along the lift
    starting at ``initial[i]``, which ends at ``initial[perm[i]]`` when the
    path is closed.
    """
    cuts = [path.s0, *path.breakpoints, path.s1]
    breaks = np.concatenate([np.linspace(a, b, panels_per_piece + 1) for a, b in zip(cuts[:-1], cuts[1:])])
    crit = np.asarray(critical, dtype=complex)

    def dist(s):
        speed = np.abs(path.dx(s)) + 1e-300
        dd = np.abs(path.x(s))
        if len(crit):
            dd = np.minimum(dd, np.abs(path.x(s)[:, None] - crit[None, :]).min(axis=1))
        return dd / speed

    breaks = graded_breaks(breaks, dist, kappa=1.0, min_width=1e-12)
    nodes, weights = panel_rule(breaks, n_gl)
    tp = track_fiber(P, path, initial=initial, grid=np.concatenate([breaks, nodes.ravel()]))
    idx = np.searchsorted(tp.s, nodes.ravel())
    ys = tp.y[idx]
    dens = eta_density(P, path.x(nodes.ravel()), ys, path.dx(nodes.ravel()))
    integrals = np.einsum("k,kd->d", weights.ravel(), dens)
    perm = tp.monodromy if tp.monodromy is not None else tuple(range(tp.degree))
    return integrals, perm


# ---------------------------------------------------------------------------
# Lassos around critical x-values
# ---------------------------------------------------------------------------


@dataclass
class Lasso:
    """A loop from the unit circle around one critical x-value and back."""

    center: complex
    kind: str
    radius: float
    theta_b: float  # basepoint angle in the working range of the branch graph
    perm: tuple[int, ...]
    integrals: np.ndarray
    length: float


def lasso_path(b: complex, c: complex, r: float) -> Path:
    """Segment ``b -> c + r u``, one positive turn around ``c``, segment back (``s`` in [0, 3])."""
    u = (b - c) / abs(b - c)
    p = c + r * u

    def x(s):
        s = np.asarray(s, dtype=float)
        out = np.where(s <= 1, b + s * (p - b), np.where(s <= 2, c + r * u * np.exp(TWO_PI * 1j * (s - 1)), p + (s - 2) * (b - p)))
        return out.astype(complex)

    def dx(s):
        s = np.asarray(s, dtype=float)
        return np.where(s < 1, p - b, np.where(s < 2, TWO_PI * 1j * r * u * np.exp(TWO_PI * 1j * (s - 1)), b - p)).astype(complex)

    return Path(x, dx, 0.0, 3.0, breakpoints=(1.0, 2.0), closed=True)


def _basepoint(c: complex, crit_all: np.ndarray, r: float) -> complex:
    phi = float(np.angle(c))
    if abs(abs(c) - 1) > 2 * r:
        return complex(np.exp(1j * phi))
    # the critical value is near the circle: step sideways along it
    delta = 2 * np.arcsin(min(1.0, r))
    for sgn in (1, -1):
        for k in range(1, 8):
            b = np.exp(1j * (phi + sgn * k * delta))
            if np.abs(crit_all - b).min() > 1.5 * r:
                return complex(b)
    return complex(np.exp(1j * (phi + 2 * delta)))


def lassos(bg: BranchGraph, include_on_circle: bool = False) -> list[Lasso]:
    """Lasso loops around every finite nonzero critical x-value off the circle."""
    crit = bg.critical
    xs = np.array([c.x for c in crit], dtype=complex)
    out: list[Lasso] = []
    if bg.degree == 0:
        return out
    for n, c in enumerate(crit):
        if c.on_circle and not include_on_circle:
            continue
        others = np.delete(xs, n)
        near = min([abs(c.x)] + list(np.abs(others - c.x)))
        r = 0.25 * near
        b = _basepoint(c.x, xs, r)
        theta_b = float(bg.wrap(np.angle(b)))
        y0 = bg.values(theta_b)[0]
        path = lasso_path(b, c.x, r)
        integrals, perm = eta_along(bg.P, path, y0, critical=xs)
        length = 2 * abs(b - c.x) + TWO_PI * r
        out.append(Lasso(c.x, c.kind, r, theta_b, tuple(int(v) for v in perm), integrals, length))
    return out


# ---------------------------------------------------------------------------
# Constants of the volume function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    """``C[v] - C[u] = w`` between the additive constants of two branch labels."""

    u: int
    v: int
    w: float
    desc: str
    length: float


def constraints(bg: BranchGraph, loops: list[Lasso] = ()) -> list[Constraint]:
    d = bg.degree
    full = bg.full_integrals()
    out = []
    mono = bg.monodromy or tuple(range(d))
    for i in range(d):
        out.append(Constraint(i, mono[i], float(full[i]), f"circle seam, branch {i}", TWO_PI))
    for t, pairs in bg.junctions:
        I = bg.integral(np.array([t]))[0]
        for a, b in pairs:
            out.append(Constraint(a, b, float(I[a] - I[b]), f"branch point at theta={t % TWO_PI:.9f}, branches {a},{b}", 0.0))
    for lp in loops:
        I = bg.integral(np.array([lp.theta_b]))[0]
        for i in range(d):
            j = lp.perm[i]
            desc = f"lasso around x={lp.center.real:.9f}{lp.center.imag:+.9f}i ({lp.kind}), branch {i}"
            out.append(Constraint(i, j, float(lp.integrals[i] + I[i] - I[j]), desc, lp.length))
    return out


def solve_constants(d: int, cons: list[Constraint]):
    """Spanning-forest solution of the constraints.

    Returns ``(C, component, cycles)``: one particular solution, the
    component id of each label and, for every constraint off the forest, the
    eta-integral around the closed cycle it closes.
    """
    adj: dict[int, list[tuple[int, float, int]]] = {i: [] for i in range(d)}
    for k, c in enumerate(cons):
        adj[c.u].append((c.v, c.w, k))
        adj[c.v].append((c.u, -c.w, k))
    C = np.full(d, np.nan)
    comp = np.full(d, -1, dtype=int)
    tree = set()
    ncomp = 0
    for root in range(d):
        if comp[root] >= 0:
            continue
        C[root] = 0.0
        comp[root] = ncomp
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, w, k in adj[u]:
                if comp[v] < 0:
                    comp[v] = ncomp
                    C[v] = C[u] + w
                    tree.add(k)
                    queue.append(v)
        ncomp += 1
    cycles = []
    for k, c in enumerate(cons):
        if k in tree:
            continue
        cycles.append((c.desc, float(C[c.v] - C[c.u] - c.w), c.length + TWO_PI))
    return C, comp, cycles


@dataclass
class VolumeProfile:
    """Volume function on the part of the curve over |x| = 1.

    ``V_i(theta) = constants[i] + int_{theta0}^{theta} log|y_i|``.
    """

    bg: BranchGraph
    constants: np.ndarray
    normalization: str  # OddUnderConjugation | ComponentBasepoint
    components: np.ndarray
    cycle_integrals: list[tuple[str, float, float]] = field(default_factory=list)
    loops: list[Lasso] = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return int(self.components.max()) + 1 if len(self.components) else 0

    @property
    def consistent(self) -> bool:
        return all(abs(v) <= EXACT_TOL * (1 + L) for _, v, L in self.cycle_integrals)

    @property
    def max_cycle(self) -> float:
        return max((abs(v) for _, v, _ in self.cycle_integrals), default=0.0)

    def __call__(self, theta) -> np.ndarray:
        return self.constants + self.bg.integral(theta)

    def sample(self, n: int = 1024):
        """Angles in ``[0, 2 pi)`` with ``V`` and ``log|y|`` per branch label."""
        th = np.linspace(0, TWO_PI, n, endpoint=False)
        return th, self(th), self.bg.log_abs(th)

    def check(self) -> None:
        if not self.consistent:
            worst = max(self.cycle_integrals, key=lambda c: abs(c[1]))
            raise InconsistentCycle(f"cycle integral {worst[1]:.3e} on {worst[0]}")


def _normalize_odd(bg: BranchGraph, C: np.ndarray, comp: np.ndarray) -> np.ndarray | None:
    """Shift per-component constants so that V(conj z) = -V(z); None if not determined."""
    ncomp = int(comp.max()) + 1
    ta = bg.theta0 + 0.25
    tb = float(bg.wrap(-ta))
    ya, yb = bg.values(ta)[0], bg.values(tb)[0]
    Ia, Ib = bg.integral(np.array([ta]))[0], bg.integral(np.array([tb]))[0]
    sums: dict[tuple[int, int], list[float]] = {}
    for i in range(bg.degree):
        j = int(np.argmin(np.abs(yb - np.conj(ya[i]))))
        key = (int(comp[i]), int(comp[j]))
        sums.setdefault(key, []).append(C[i] + Ia[i] + C[j] + Ib[j])
    K = np.full(ncomp, np.nan)
    for (a, b), vals in sums.items():
        if a == b:
            K[a] = -0.5 * float(np.mean(vals))
    for (a, b), vals in sums.items():
        if a != b and np.isnan(K[b]) and not np.isnan(K[a]):
            K[b] = -float(np.mean(vals)) - K[a]
    if np.any(np.isnan(K)):
        return None
    return C + K[comp]


def _normalize_centred(bg: BranchGraph, C: np.ndarray, comp: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    V = C + bg.integral(thetas)
    out = C.copy()
    for k in range(int(comp.max()) + 1):
        cols = comp == k
        out[cols] -= 0.5 * (V[:, cols].max() + V[:, cols].min())
    return out


def volume_profile(bg: BranchGraph, loops: list[Lasso] | None = None, extra_thetas=()) -> VolumeProfile:
    """Volume profile over the circle with branch constants chained through the constraint graph.

    Real polynomials get the odd normalization; otherwise each component is
    centred so that its maximum and minimum over the circle are opposite.
    ``extra_thetas`` (toric angles) are included in the centring samples.
    """
    d = bg.degree
    loops = list(loops or [])
    C, comp, cycles = solve_constants(d, constraints(bg, loops))
    C = np.asarray(C, dtype=float)
    tag = "ComponentBasepoint"
    if d and bg.P.is_real():
        odd = _normalize_odd(bg, C, comp)
        if odd is not None:
            C, tag = odd, "OddUnderConjugation"
    if d and tag == "ComponentBasepoint":
        th = np.concatenate([np.linspace(bg.theta0, bg.theta0 + TWO_PI, 2049), np.asarray(extra_thetas, dtype=float)])
        C = _normalize_centred(bg, C, comp, th)
    return VolumeProfile(bg, C, tag, comp, cycles, loops)


def volume_at_toric(points: list[ToricPoint], profile: VolumeProfile, require_connected: bool = False) -> list[ToricPoint]:
    """Fill the ``volume`` field of every toric point from the profile."""
    if require_connected and profile.n_components > 1:
        raise DisconnectedComponent(f"{profile.n_components} components over the circle are not joined")
    out = []
    for p in points:
        V = profile(np.array([p.theta]))[0, p.branch]
        out.append(replace(p, volume=float(V)))
    return out


def amplitude(points: list[ToricPoint], profile: VolumeProfile) -> float:
    """``max V - min V``; the extrema of V lie at toric points."""
    if profile.n_components > 1:
        raise DisconnectedComponent(f"{profile.n_components} components over the circle are not joined")
    vols = [p.volume for p in points if np.isfinite(p.volume)]
    if not vols:
        return 0.0
    return float(max(vols) - min(vols))


# ---------------------------------------------------------------------------
# Exactness
# ---------------------------------------------------------------------------


@dataclass
class ExactnessCertificate:
    tempered: bool
    side_deviation: list[tuple[tuple[int, int], tuple[int, int], float]]
    corner_ok: bool
    corner_moduli: list[float]
    cycle_integrals: list[tuple[str, float, float]]
    genus_bound: int
    verdict: str  # ExactCertified | ExactLikely | NotExact | Indeterminate
    margin: float  # worst |cycle| / tolerance (below 1 is consistent)
    diagnostics: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tempered": self.tempered,
            "side_deviation": [{"start": list(a), "end": list(b), "deviation": v} for a, b, v in self.side_deviation],
            "corner_ok": self.corner_ok,
            "corner_moduli": self.corner_moduli,
            "genus_bound": self.genus_bound,
            "cycle_integrals": [{"cycle": s, "value": v, "length": L} for s, v, L in self.cycle_integrals],
            "margin": self.margin,
            "diagnostics": self.diagnostics,
        }


def temperedness(P: LaurentPoly2):
    devs = []
    for s in side_polynomials(P):
        m = s.root_moduli()
        dev = float(np.max(np.abs(m - 1))) if len(m) else 0.0
        devs.append((s.edge.start, s.edge.end, dev))
    return all(v <= TEMPER_TOL for *_, v in devs), devs


def exactness_certificate(P: LaurentPoly2, analysis=None, seed: int = 0) -> ExactnessCertificate:
    """Temperedness, corner check and closed-cycle integrals of eta, with a verdict."""
    tempered, devs = temperedness(P)
    npoly = newton_polygon(P)
    try:
        corner_modulus(P)
        corner_ok, moduli = True, [abs(P.coeff(*v)) for v in npoly.vertices]
    except CornerMismatch as e:
        corner_ok, moduli = False, list(e.moduli)
    genus = npoly.interior_count
    diags: list[str] = []
    cycles: list[tuple[str, float, float]] = []
    failed = False
    if npoly.degenerate is None:
        try:
            if analysis is None:
                from .mahler import analyze

                analysis = analyze(P, seed=seed, with_lassos=True)
            cycles = list(analysis.profile.cycle_integrals)
        except MahlerError as e:
            failed = True
            diags.append(f"{type(e).__name__}: {e}")
    margin = max((abs(v) / (EXACT_TOL * (1 + L)) for _, v, L in cycles), default=0.0)
    if not tempered:
        diags.append("side polynomial roots off the unit circle")
    if not corner_ok:
        diags.append("vertex coefficients have different moduli")
    if not tempered or not corner_ok or margin > 1:
        verdict = "NotExact"
    elif failed:
        verdict = "Indeterminate"
    elif genus == 0:
        verdict = "ExactCertified"
    else:
        verdict = "ExactLikely"
    return ExactnessCertificate(tempered, devs, corner_ok, moduli, cycles, genus, verdict, margin, diags)


# ---------------------------------------------------------------------------
# Period scan
# ---------------------------------------------------------------------------


@dataclass
class ScanRow:
    c: float
    max_cycle: float
    verdict: str
    error: str | None = None


def period_scan(Q: LaurentPoly2, c_range: tuple[float, float], steps: int, exact_tol: float = EXACT_TOL, seed: int = 0):
    """Largest closed-cycle integral of ``Q - c`` over a grid of ``c``.

    Returns ``(rows, candidates)``; candidates are local minima of the
    period magnitude below ``exact_tol``.
    """
    a, b = c_range
    cs = np.linspace(a, b, steps + 1) if steps > 0 else np.array([a])
    rows: list[ScanRow] = []
    for c in cs:
        Pc = Q - LaurentPoly2.constant(float(c))
        try:
            cert = exactness_certificate(Pc, seed=seed)
            if cert.verdict == "Indeterminate":
                rows.append(ScanRow(float(c), float("nan"), cert.verdict, "; ".join(cert.diagnostics)))
                continue
            mx = max((abs(v) for _, v, _ in cert.cycle_integrals), default=0.0)
            rows.append(ScanRow(float(c), float(mx), cert.verdict))
        except MahlerError as e:
            rows.append(ScanRow(float(c), float("nan"), "Indeterminate", f"{type(e).__name__}: {e}"))
    vals = np.array([r.max_cycle for r in rows])
    cand = []
    for k, r in enumerate(rows):
        v = vals[k]
        if not np.isfinite(v) or v >= exact_tol:
            continue
        left = vals[k - 1] if k > 0 else np.inf
        right = vals[k + 1] if k + 1 < len(vals) else np.inf
        left = np.inf if not np.isfinite(left) else left
        right = np.inf if not np.isfinite(right) else right
        if v <= left and v <= right:
            cand.append(r.c)
    return rows, cand
