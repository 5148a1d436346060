"""Command-line front end: ``exact-mahler <command> <polynomial> [options]``.

Exit status: 0 on success, 2 on unreadable input, 1 on computational failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path as FilePath

import numpy as np

from . import __version__
from .dehn import CAVEAT, dehn_convergence, parse_slopes, tail_max
from .errors import DomainError, MahlerError, ParseError
from .export import (
    amoeba_csv,
    amoeba_svg,
    dehn_csv,
    profile_csv,
    profile_svg,
    scan_csv,
    scan_svg,
    to_json,
    toric_csv,
    toric_dict,
)
from .mahler import analyze, inequality_check, mahler_formula, mahler_numeric, normalize_for_slicing
from .parse import parse_poly
from .poly import corner_modulus, format_poly, newton_polygon, side_polynomials
from .torus import amoeba_raster
from .volume import EXACT_TOL, exactness_certificate, period_scan, temperedness

COMMANDS = ("info", "mahler", "toric", "volume-plot", "amoeba", "exactness", "dehn", "scan")
FORMATS = ("json", "csv", "svg")


class UsageError(Exception):
    pass


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exact-mahler", description="Mahler measures of two-variable polynomials through toric points and volumes.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("expression", nargs="?", help="polynomial in X, Y (or use --file)")
    ap.add_argument("--file", help="read the polynomial from a file (expression or JSON)")
    ap.add_argument("--tol", type=_positive, default=1e-9, help="quadrature tolerance for the measure")
    ap.add_argument("--exact-tol", type=_positive, default=EXACT_TOL, help="relative tolerance for closed-cycle integrals")
    ap.add_argument("--samples", type=int, default=1024, help="sampling density (profile points, amoeba angles, kink grid)")
    ap.add_argument("--seed", type=int, default=0, help="seed for random monomial transforms")
    ap.add_argument("--method", choices=("numeric", "formula", "both"), default="both")
    ap.add_argument("--pq", default="1/10,1/20,1/50", help="Dehn slopes p1/q1,p2/q2,...")
    ap.add_argument("--param-range", default="0:6", help="scan range a:b for c in P - c")
    ap.add_argument("--steps", type=int, default=60, help="number of scan steps")
    ap.add_argument("--window", default="-3:3:-3:3", help="amoeba window umin:umax:vmin:vmax")
    ap.add_argument("--assert-irreducible", action="store_true", help="assert P is irreducible over C (enables the inequality verdict)")
    ap.add_argument("--out", "-o", help="output path, or just a format (json, csv, svg) for standard output")
    ap.add_argument("--format", choices=FORMATS, help="output format (default from --out or json)")
    return ap


def _read_poly(args):
    if (args.expression is None) == (args.file is None):
        raise UsageError("give exactly one of an expression or --file")
    if args.file is not None:
        text = FilePath(args.file).read_text(encoding="utf-8").strip()
        if text.startswith("{"):
            from .poly import LaurentPoly2

            try:
                return LaurentPoly2.from_json(text)
            except (KeyError, TypeError, ValueError) as e:
                raise ParseError(f"bad polynomial JSON: {e}") from None
        return parse_poly(text)
    return parse_poly(args.expression)


def _target(args):
    fmt, path = args.format, None
    if args.out:
        if args.out.lower() in FORMATS:
            fmt = fmt or args.out.lower()
        else:
            path = args.out
            if fmt is None:
                suffix = FilePath(path).suffix.lower().lstrip(".")
                fmt = suffix if suffix in FORMATS else None
    return fmt or "json", path


def _range(text: str):
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise ParseError(f"cannot read range {text!r} (expected a:b)") from None
    return a, b


def _need(fmt, allowed, command):
    if fmt not in allowed:
        raise UsageError(f"{command} supports formats {', '.join(allowed)}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_info(P, args, fmt):
    _need(fmt, ("json",), "info")
    npoly = newton_polygon(P)
    tempered, devs = temperedness(P)
    try:
        c = corner_modulus(P)
    except MahlerError:
        c = None
    sides = []
    for s in side_polynomials(P):
        sides.append({"start": list(s.edge.start), "end": list(s.edge.end), "coefficients": [[v.real, v.imag] for v in s.coeffs], "root_moduli": sorted(float(m) for m in s.root_moduli())})
    _, M = normalize_for_slicing(P)
    return to_json({
        "expression": format_poly(P),
        "polynomial": P.to_json_dict(),
        "newton_polygon": {"vertices": [list(v) for v in npoly.vertices], "interior_count": npoly.interior_count, "degenerate": npoly.degenerate},
        "sides": sides,
        "tempered": tempered,
        "corner_modulus": c,
        "y_degree": P.y_range()[1] - P.y_range()[0],
        "normalization": {"matrix": M, "shift": [0, 0]},
        "real_coefficients": P.is_real(),
    })


def cmd_mahler(P, args, fmt):
    _need(fmt, ("json", "csv"), "mahler")
    report = mahler_formula(P, method=args.method, seed=args.seed, tol=args.tol, samples=args.samples)
    if fmt == "csv":
        return toric_csv(report.toric_points)
    d = report.to_json_dict()
    d["irreducible_asserted"] = bool(args.assert_irreducible)
    if args.assert_irreducible and report.amplitude is not None and report.m_numeric is not None:
        margin = inequality_check(report)
        d["inequality_holds"] = bool(margin >= -1e-6)
        d["inequality_equality_case"] = bool(abs(margin) < 1e-6)
    return to_json(d)


def cmd_toric(P, args, fmt):
    _need(fmt, ("json", "csv"), "toric")
    an = analyze(P, seed=args.seed)
    if fmt == "csv":
        return toric_csv(an.toric)
    return to_json({
        "count": len(an.toric),
        "toric_points": [toric_dict(p) for p in an.toric],
        "arcs": [{"branch": a.branch, "theta_start": a.theta_start, "theta_end": a.theta_end, "start": a.start, "end": a.end, "deltaV": a.delta_v} for a in an.arcs.arcs],
        "components": an.arcs.components,
        "monodromy": list(an.bg.monodromy or ()),
        "normalization": {"matrix": an.matrix, "shift": [0, 0]},
        "diagnostics": an.diagnostics,
    })


def cmd_volume(P, args, fmt):
    an = analyze(P, seed=args.seed)
    prof = an.profile
    if fmt == "csv":
        return profile_csv(prof, args.samples)
    if fmt == "svg":
        return profile_svg(prof, args.samples)
    th, V, lg = prof.sample(args.samples)
    return to_json({
        "normalization": prof.normalization,
        "constants": list(prof.constants),
        "theta": list(th),
        "V": V.T.tolist(),
        "log_abs_y": lg.T.tolist(),
        "critical_theta": sorted(p.alpha for p in an.toric),
        "cycle_integrals": [{"cycle": s, "value": v, "length": L} for s, v, L in prof.cycle_integrals],
    })


def cmd_amoeba(P, args, fmt):
    try:
        window = tuple(float(v) for v in args.window.split(":"))
        if len(window) != 4:
            raise ValueError
    except ValueError:
        raise ParseError(f"cannot read window {args.window!r} (expected umin:umax:vmin:vmax)") from None
    ue, ve, counts = amoeba_raster(P, window, n_angle=max(args.samples, 16))
    if fmt == "csv":
        return amoeba_csv(ue, ve, counts)
    if fmt == "svg":
        return amoeba_svg(ue, ve, counts)
    return to_json({"u_edges": list(ue), "v_edges": list(ve), "counts": counts.tolist()})


def cmd_exactness(P, args, fmt):
    _need(fmt, ("json",), "exactness")
    cert = exactness_certificate(P, seed=args.seed)
    return to_json(cert.to_json_dict())


def cmd_dehn(P, args, fmt):
    _need(fmt, ("json", "csv"), "dehn")
    slopes = parse_slopes(args.pq)
    m_ref = mahler_numeric(P, tol=args.tol)
    rows = dehn_convergence(P, slopes, m_ref)
    if fmt == "csv":
        return dehn_csv(rows)
    devs = [r.deviation for r in rows]
    tail = tail_max(devs).tolist() if all(d is not None for d in devs) and devs else None
    return to_json({
        "m": m_ref,
        "rows": [{"p": r.p, "q": r.q, "m_pq": r.m_pq, "deviation": r.deviation, "error": r.error} for r in rows],
        "tail_max": tail,
        "caveat": CAVEAT,
    })


def cmd_scan(P, args, fmt):
    a, b = _range(args.param_range)
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    rows, cands = period_scan(P, (a, b), args.steps, exact_tol=args.exact_tol, seed=args.seed)
    if fmt == "csv":
        return scan_csv(rows)
    if fmt == "svg":
        return scan_svg(rows)
    return to_json({
        "family": format_poly(P) + " - c",
        "rows": [{"c": r.c, "max_cycle": r.max_cycle, "verdict": r.verdict, "error": r.error} for r in rows],
        "candidates": cands,
    })


HANDLERS = {
    "info": cmd_info,
    "mahler": cmd_mahler,
    "toric": cmd_toric,
    "volume-plot": cmd_volume,
    "amoeba": cmd_amoeba,
    "exactness": cmd_exactness,
    "dehn": cmd_dehn,
    "scan": cmd_scan,
}


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        P = _read_poly(args)
        fmt, path = _target(args)
        if args.samples < 16:
            raise UsageError("--samples must be at least 16")
    except (ParseError, UsageError, DomainError, OSError) as e:
        print(f"exact-mahler: {e}", file=sys.stderr)
        return 2
    try:
        with np.errstate(all="ignore"):
            text = HANDLERS[args.command](P, args, fmt)
    except (ParseError, UsageError, DomainError) as e:
        print(f"exact-mahler: {e}", file=sys.stderr)
        return 2
    except MahlerError as e:
        print(f"exact-mahler: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if path:
        FilePath(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
