"""CSV, SVG and JSON writers for profiles, amoebas, toric tables, Dehn and scan tables."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .torus import TWO_PI


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def to_json(obj) -> str:
    """Deterministic JSON (sorted keys, non-finite values as null)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Volume profile
# ---------------------------------------------------------------------------


def profile_rows(profile, n: int = 1024):
    th, V, lg = profile.sample(n)
    rows = []
    for i in range(V.shape[1]):
        for k in range(len(th)):
            rows.append((i, th[k], V[k, i], lg[k, i]))
    return rows


def profile_csv(profile, n: int = 1024) -> str:
    return to_csv(["branch", "theta", "V", "log_abs_y"], profile_rows(profile, n))


def _svg_frame(width, height, body: list[str], title: str) -> str:
    head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    return "\n".join([head, f"<title>{title}</title>", f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def profile_svg(profile, n: int = 1024, width: int = 800, height: int = 400) -> str:
    """Polylines of V_i(theta) over [0, 2 pi); a polyline is broken where it crosses the seam."""
    th, V, _ = profile.sample(n)
    lo, hi = float(np.nanmin(V)), float(np.nanmax(V))
    span = hi - lo if hi > lo else 1.0
    pad = 20

    def px(t, v):
        return pad + (width - 2 * pad) * t / TWO_PI, height - pad - (height - 2 * pad) * (v - lo) / span

    seam = float(profile.bg.theta0 % TWO_PI)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    body = []
    y0 = px(0, 0)[1] if lo <= 0 <= hi else None
    if y0 is not None:
        body.append(f'<line x1="{pad}" y1="{y0:.2f}" x2="{width - pad}" y2="{y0:.2f}" stroke="#aaa"/>')
    for i in range(V.shape[1]):
        pieces = [(th < seam), (th >= seam)] if seam > 0 else [np.ones(len(th), bool)]
        for mask in pieces:
            if mask.sum() < 2:
                continue
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in (px(t, v) for t, v in zip(th[mask], V[mask, i])))
            body.append(f'<polyline fill="none" stroke="{colors[i % len(colors)]}" stroke-width="1.5" points="{pts}"/>')
    return _svg_frame(width, height, body, "volume profile over |x| = 1")


# ---------------------------------------------------------------------------
# Amoeba
# ---------------------------------------------------------------------------


def amoeba_csv(ue, ve, counts) -> str:
    uc = 0.5 * (ue[:-1] + ue[1:])
    vc = 0.5 * (ve[:-1] + ve[1:])
    rows = [(uc[a], vc[b], int(counts[a, b])) for a in range(len(uc)) for b in range(len(vc))]
    return to_csv(["u", "v", "hit_count"], rows)


def amoeba_svg(ue, ve, counts, size: int = 480) -> str:
    nu, nv = counts.shape
    cw, ch = size / nu, size / nv
    body = []
    for a in range(nu):
        for b in range(nv):
            if counts[a, b]:
                body.append(f'<rect x="{a * cw:.2f}" y="{size - (b + 1) * ch:.2f}" width="{cw:.2f}" height="{ch:.2f}" fill="black"/>')
    return _svg_frame(size, size, body, "amoeba")


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def toric_dict(p, index=None, volume=None) -> dict:
    s = p.slope
    fin = bool(np.isfinite(s))
    return {
        "alpha": p.alpha,
        "beta": p.beta,
        "slope_re": s.real if fin else None,
        "slope_im": s.imag if fin else None,
        "class": p.slope_class,
        "ramification": p.ramification,
        "index": p.index if index is None else index,
        "V": p.volume if volume is None else volume,
        "kind": p.kind,
    }


def toric_csv(points) -> str:
    rows = []
    for p in points:
        d = toric_dict(p)
        rows.append([d[k] for k in ("alpha", "beta", "slope_re", "slope_im", "class", "ramification", "index", "V", "kind")])
    return to_csv(["alpha", "beta", "slope_re", "slope_im", "class", "ramification", "index", "V", "kind"], rows)


def dehn_csv(rows) -> str:
    return to_csv(["p", "q", "m_pq", "deviation"], [(r.p, r.q, r.m_pq, r.deviation) for r in rows])


def scan_csv(rows) -> str:
    return to_csv(["c", "max_cycle", "verdict", "error"], [(r.c, r.max_cycle, r.verdict, r.error) for r in rows])


def scan_svg(rows, width: int = 800, height: int = 400) -> str:
    pts = [(r.c, r.max_cycle) for r in rows if np.isfinite(r.max_cycle) and r.max_cycle > 0]
    if len(pts) < 2:
        return _svg_frame(width, height, [], "period scan")
    cs = np.array([p[0] for p in pts])
    lv = np.log10(np.array([p[1] for p in pts]))
    pad = 20
    xs = pad + (width - 2 * pad) * (cs - cs.min()) / max(cs.max() - cs.min(), 1e-300)
    ys = height - pad - (height - 2 * pad) * (lv - lv.min()) / max(lv.max() - lv.min(), 1e-300)
    line = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(xs, ys))
    return _svg_frame(width, height, [f'<polyline fill="none" stroke="black" points="{line}"/>'], "log10 max period over c")
