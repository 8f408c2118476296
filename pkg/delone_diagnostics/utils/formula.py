"""This module contains reusable formulas"""

import math
from fractions import Fraction

import numpy as np

# Irrationality is only checked against rationals with small denominators
MAX_DENOMINATOR = 50
RATIONAL_TOL = 1e-9


def nearby_rational(
    x: float, max_denominator: int = MAX_DENOMINATOR, tol: float = RATIONAL_TOL
) -> Fraction | None:
    """Return p/q with q <= max_denominator within tol of x, or None."""
    for q in range(1, max_denominator + 1):
        p = round(x * q)
        if abs(x - p / q) < tol:
            return Fraction(p, q)
    return None


def strip_scale(theta: float) -> float:
    """Length of the vector (1, theta), the scale of the strip projection."""
    return math.sqrt(1 + theta**2)


def sturmian_gap_lengths(theta: float) -> tuple[float, float]:
    """The short and the long gap of the Sturmian set of slope theta."""
    s = strip_scale(theta)
    return theta / s, 1 / s


def sturmian_window(theta: float) -> tuple[float, float]:
    """Projection of [0,1)^2 onto the internal line, as a half-open interval."""
    s = strip_scale(theta)
    return -theta / s, 1 / s


def triangle_bump(u, half_width: float, height: float):
    """Piecewise-linear bump, height at 0 and zero outside (-half_width, half_width)."""
    return height * np.maximum(0.0, 1.0 - np.abs(u) / half_width)


def round_sig(x: float, digits: int = 12) -> float:
    """Round to a number of significant digits."""
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")
