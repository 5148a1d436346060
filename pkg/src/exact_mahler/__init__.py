"""Mahler measures of two-variable polynomials, computed by slice integration
and through toric points, indices and volume functions."""

__version__ = "0.1.0"

from .poly import LaurentPoly2, UniPoly, newton_polygon, side_polynomials  # noqa: E402
from .parse import parse_poly  # noqa: E402
from .mahler import analyze, mahler_1d, mahler_formula, mahler_numeric, normalize_for_slicing  # noqa: E402
from .volume import exactness_certificate, period_scan, volume_profile  # noqa: E402
from .dehn import SurgerySlope, dehn_convergence, dehn_substitute  # noqa: E402

__all__ = [
    "LaurentPoly2",
    "UniPoly",
    "newton_polygon",
    "side_polynomials",
    "parse_poly",
    "analyze",
    "mahler_1d",
    "mahler_formula",
    "mahler_numeric",
    "normalize_for_slicing",
    "exactness_certificate",
    "period_scan",
    "volume_profile",
    "SurgerySlope",
    "dehn_convergence",
    "dehn_substitute",
]
