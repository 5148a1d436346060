"""Mahler measures: one-variable Jensen, two-variable slice integration and
the formula through toric points, indices and volumes."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    BranchCollision,
    CornerMismatch,
    DanglingArc,
    DegreeDrop,
    DisconnectedComponent,
    IndexInconsistency,
    MahlerError,
    NoConvergence,
    UnresolvedSingular,
    ZeroPolynomial,
)
from .poly import (
    LaurentPoly2,
    UniPoly,
    corner_modulus,
    log_derivatives,
    monomial_transform,
    newton_polygon,
    random_unimodular,
    torus_map_back,
)
from .quad import adaptive_gl
from .roots import _pair_matches, roots_batch, roots_univariate
from .torus import (
    TWO_PI,
    ArcGraph,
    BranchGraph,
    ToricPoint,
    branch_graph_over_circle,
    build_arc_graph,
    critical_points,
    find_toric_points,
    log_gauss,
    slope_class,
)
from .volume import (
    EXACT_TOL,
    ExactnessCertificate,
    Lasso,
    VolumeProfile,
    amplitude,
    exactness_certificate,
    lassos,
    volume_at_toric,
    volume_profile,
)

NUMERIC_TOL = 1e-9
RETRIES = 4


def _matmul(A, B):
    return [[A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
            [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]]]


IDENTITY = [[1, 0], [0, 1]]


# ---------------------------------------------------------------------------
# One variable
# ---------------------------------------------------------------------------


def mahler_1d(p: UniPoly) -> float:
    """``log|leading| + sum log+|root|`` (the Laurent shift plays no role on |t| = 1)."""
    if not isinstance(p, UniPoly):
        p = UniPoly(tuple(p))
    if p.degree < 0 or not p.coeffs:
        raise ZeroPolynomial("Mahler measure of the zero polynomial")
    out = float(np.log(abs(p.leading)))
    if p.degree >= 1:
        try:
            rs = roots_univariate(p)
        except NoConvergence as e:
            rs = e.best
        for r, m, _ in rs.roots:
            if abs(r) > 1:
                out += m * float(np.log(abs(r)))
    return out


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def normalize_for_slicing(P: LaurentPoly2, kmax: int = 4):
    """Shear ``(i, j) -> (i, j + k i)`` so that the top of the Newton polygon in y is one vertex.

    Among admissible shears the one with the smallest y-span is chosen, then
    the smallest ``|k|``.  Returns ``(sheared P, matrix)``.
    """
    if not P:
        raise ZeroPolynomial("zero polynomial")
    verts = newton_polygon(P).vertices
    best = None
    for k in sorted(range(-kmax, kmax + 1), key=abs):
        js = [j + k * i for i, j in verts]
        top = max(js)
        if sum(1 for j in js if j == top) != 1:
            continue
        key = (top - min(js), abs(k), k < 0)
        if best is None or key < best[0]:
            best = (key, k)
    if best is None:
        return P, IDENTITY
    k = best[1]
    M = [[1, 0], [k, 1]]
    return (P, IDENTITY) if k == 0 else (monomial_transform(P, M), M)


def _top_coefficient(P: LaurentPoly2) -> complex:
    jmax = P.y_range()[1]
    vals = [v for (i, j), v in P if j == jmax]
    return complex(vals[0])


# ---------------------------------------------------------------------------
# Numeric route
# ---------------------------------------------------------------------------


def _slice_values(P: LaurentPoly2, theta: np.ndarray, log_a: float) -> np.ndarray:
    c = P.y_coefficients(np.exp(1j * theta))
    if c.shape[1] == 1:
        return np.full(len(theta), log_a)
    ys = roots_batch(c)
    with np.errstate(divide="ignore"):
        lg = np.log(np.abs(ys))
    return log_a + np.maximum(lg, 0.0).sum(axis=1)


def _kinks(P: LaurentPoly2, samples: int) -> np.ndarray:
    """Angles where some root crosses |y| = 1, found per root on a uniform grid and bisected."""
    th = np.linspace(0, TWO_PI, samples + 1)
    c = P.y_coefficients(np.exp(1j * th))
    if c.shape[1] == 1:
        return np.zeros(0)
    Y = roots_batch(c)
    perm, _ = _pair_matches(Y[:-1], Y[1:])
    Yn = np.take_along_axis(Y[1:], perm, axis=1)
    with np.errstate(divide="ignore"):
        g0, g1 = np.log(np.abs(Y[:-1])), np.log(np.abs(Yn))
    s0 = np.where(g0 > 1e-12, 1, np.where(g0 < -1e-12, -1, 0))
    s1 = np.where(g1 > 1e-12, 1, np.where(g1 < -1e-12, -1, 0))
    kk, rr = np.nonzero(s0 * s1 < 0)
    if len(kk) == 0:
        return np.zeros(0)
    lo, hi = th[kk].copy(), th[kk + 1].copy()
    ylo = Y[kk, rr].copy()
    slo = s0[kk, rr]
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        Ym = roots_batch(P.y_coefficients(np.exp(1j * mid)))
        pick = Ym[np.arange(len(mid)), np.argmin(np.abs(Ym - ylo[:, None]), axis=1)]
        with np.errstate(divide="ignore"):
            same = np.sign(np.log(np.abs(pick))) == slo
        lo = np.where(same, mid, lo)
        ylo = np.where(same, pick, ylo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def mahler_numeric(P: LaurentPoly2, tol: float = NUMERIC_TOL, samples: int = 1024, return_error: bool = False):
    """``m(P)`` by adaptive Gauss-Legendre over theta of the Jensen slice measure.

    The integrand is split at every angle where a root crosses the unit
    circle and at the arguments of branch points on the circle.
    """
    if not P:
        raise ZeroPolynomial("Mahler measure of the zero polynomial")
    Pn, _ = normalize_for_slicing(P)
    log_a = float(np.log(abs(_top_coefficient(Pn))))
    breaks = [0.0, TWO_PI]
    breaks += list(np.linspace(0, TWO_PI, 17)[1:-1])
    breaks += list(_kinks(Pn, samples))
    if Pn.y_range()[1] - Pn.y_range()[0] >= 2:
        for c in critical_points(Pn):
            if c.on_circle:
                breaks.append(c.theta)
    b = np.unique(np.clip(np.asarray(breaks), 0, TWO_PI))
    b = b[np.concatenate([[True], np.diff(b) > 1e-13])]
    val, err = adaptive_gl(lambda t: _slice_values(Pn, t, log_a), b, tol=tol * TWO_PI)
    m = val / TWO_PI
    return (m, err / TWO_PI) if return_error else m


# ---------------------------------------------------------------------------
# Toric route
# ---------------------------------------------------------------------------


@dataclass
class Analysis:
    """Everything computed over the unit circle for one polynomial."""

    P: LaurentPoly2
    working: LaurentPoly2
    matrix: list  # working = monomial_transform(P, matrix)
    bg: BranchGraph
    arcs: ArcGraph
    profile: VolumeProfile
    toric: list[ToricPoint]  # in the coordinates of P
    log_c: float
    diagnostics: list[str] = field(default_factory=list)

    @property
    def amplitude(self) -> float | None:
        try:
            return amplitude(self.toric, self.profile)
        except DisconnectedComponent:
            return None


def _angle(z: complex) -> float:
    a = float(np.angle(z) % TWO_PI)
    return 0.0 if a > TWO_PI - 1e-12 else a


def _to_original(P: LaurentPoly2, M, pts: list[ToricPoint]) -> list[ToricPoint]:
    out = []
    for p in pts:
        x, y = torus_map_back(M, p.x, p.y)
        x, y = complex(x), complex(y)
        try:
            gam = complex(log_gauss(P, x, y))
        except MahlerError:
            gam = complex(np.nan, np.nan)
        cls = p.slope_class if np.isnan(gam.real) else slope_class(gam)
        out.append(replace(p, alpha=_angle(x), beta=_angle(y), slope=gam, slope_class=cls))
    return out


def analyze(P: LaurentPoly2, seed: int = 0, with_lassos: bool = True, retries: int = RETRIES) -> Analysis:
    """Branch graph, toric points, arcs, indices and volumes of ``P`` over the circle.

    When the chosen coordinates put a toric point on a branch point or make
    the two index computations disagree, the whole computation is rerun after
    a random unimodular change of variables (seeded).
    """
    rng = np.random.default_rng(seed)
    R = IDENTITY
    last: Exception | None = None
    diags: list[str] = []
    for attempt in range(retries + 1):
        P1 = P if attempt == 0 else monomial_transform(P, R)
        Pn, S = normalize_for_slicing(P1)
        M = _matmul(S, R)
        try:
            bg = branch_graph_over_circle(Pn)
            pts, flat = find_toric_points(bg)
            ag = build_arc_graph(bg, pts, flat)
        except (BranchCollision, IndexInconsistency, DanglingArc, DegreeDrop) as e:
            last = e
            diags.append(f"attempt {attempt}: {type(e).__name__}: {e}")
            R = random_unimodular(rng)
            continue
        loops: list[Lasso] = []
        if with_lassos:
            try:
                loops = lassos(bg)
            except MahlerError as e:
                diags.append(f"lassos skipped: {type(e).__name__}: {e}")
        profile = volume_profile(bg, loops, extra_thetas=[p.theta for p in ag.nodes])
        nodes = volume_at_toric(ag.nodes, profile)
        ag.nodes = nodes
        log_c = float(np.log(abs(_top_coefficient(Pn))))
        return Analysis(P, Pn, M, bg, ag, profile, _to_original(P, M, nodes), log_c, diags)
    assert last is not None
    raise last


@dataclass
class MahlerReport:
    m_numeric: float | None
    m_formula: float | None
    log_c: float | None
    contributions: list[tuple[ToricPoint, int, float, float]]
    residual: float | None
    amplitude: float | None
    inequality_margin: float | None
    matrix: list
    shift: tuple[int, int] = (0, 0)
    certificate: ExactnessCertificate | None = None
    partial_sum: float | None = None
    arc_sum: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def toric_points(self) -> list[ToricPoint]:
        return [c[0] for c in self.contributions]

    def to_json_dict(self) -> dict:
        def num(v):
            return None if v is None or not np.isfinite(v) else float(v)

        pts = []
        for p, ind, V, _ in self.contributions:
            pts.append({
                "alpha": num(p.alpha),
                "beta": num(p.beta),
                "slope_re": num(p.slope.real) if np.isfinite(p.slope) else None,
                "slope_im": num(p.slope.imag) if np.isfinite(p.slope) else None,
                "class": p.slope_class,
                "ramification": p.ramification,
                "index": ind,
                "V": num(V),
                "kind": p.kind,
            })
        return {
            "m_numeric": num(self.m_numeric),
            "m_formula": num(self.m_formula),
            "log_c": num(self.log_c),
            "residual": num(self.residual),
            "amplitude": num(self.amplitude),
            "inequality_margin": num(self.inequality_margin),
            "toric_points": pts,
            "normalization": {"matrix": [list(r) for r in self.matrix], "shift": list(self.shift)},
            "certificate": self.certificate.to_json_dict() if self.certificate else {},
            "notes": list(self.notes),
        }


def mahler_formula(
    P: LaurentPoly2,
    method: str = "both",
    seed: int = 0,
    tol: float = NUMERIC_TOL,
    samples: int = 1024,
    analysis: Analysis | None = None,
) -> MahlerReport:
    """Report with the toric-point formula and (for ``method`` numeric/both) the slice integral."""
    notes: list[str] = []
    m_num = mahler_numeric(P, tol=tol, samples=samples) if method in ("numeric", "both") else None
    if method == "numeric":
        return MahlerReport(m_num, None, None, [], None, None, None, IDENTITY, notes=notes)
    corner_ok = True
    try:
        corner_modulus(P)
    except CornerMismatch as e:
        if method == "formula":
            raise
        corner_ok = False
        notes.append(f"formula refused: {e}")
    an = analysis if analysis is not None else analyze(P, seed=seed)
    notes += an.diagnostics
    contrib = [(p, p.index, p.volume, p.index * p.volume / TWO_PI) for p in an.toric]
    partial = an.log_c + sum(c[3] for c in contrib if c[1] != 0 or np.isfinite(c[2]))
    unresolved = any(p.kind == "UnresolvedSingular" for p in an.toric)
    if unresolved:
        notes.append("unresolved singular toric points: formula indeterminate, partial sum reported")
    if unresolved and method == "formula":
        raise UnresolvedSingular("toric point at a singular point of the curve; only a partial sum is available")
    m_form = partial if corner_ok and not unresolved else None
    amp = an.amplitude
    cert = exactness_certificate(P, analysis=an)
    residual = abs(m_num - m_form) if (m_num is not None and m_form is not None) else None
    margin = TWO_PI * m_num - amp if (m_num is not None and amp is not None) else None
    return MahlerReport(
        m_num,
        m_form,
        an.log_c if corner_ok else None,
        contrib,
        residual,
        amp,
        margin,
        an.matrix,
        certificate=cert,
        partial_sum=partial,
        arc_sum=an.arcs.total_delta_v(),
        notes=notes,
    )


def inequality_check(report: MahlerReport) -> float:
    """``2 pi m - (max V - min V)``; nonnegative for exact irreducible polynomials."""
    if report.amplitude is None:
        raise DisconnectedComponent("no global volume function: amplitude unavailable")
    if report.m_numeric is None:
        raise ValueError("inequality check needs the numeric measure")
    return TWO_PI * report.m_numeric - report.amplitude
