import logging
from dataclasses import dataclass

import numpy as np

from delone_diagnostics.errors import SpecError
from delone_diagnostics.geometry import Ball
from delone_diagnostics.sources import DeloneSource
from delone_diagnostics.utils.formula import (
    nearby_rational,
    strip_scale,
    sturmian_gap_lengths,
    sturmian_window,
)

DESC = """Sturmian sets: the strip projection of ℤ² onto a line of irrational slope.

For (m, n) in ℤ², the internal coordinate is u = (n − θm)/s and the position on
the line is t = (m + θn)/s, with s = √(1+θ²). A point is accepted when u + phase
lies in the half-open projection of the unit square onto the internal line.
"""

# Offsets closer than this to an edge of the acceptance window are refused
GRAZING_TOL = 1e-12
# Keeps the origin inside the set and every lattice point off the window edges
DEFAULT_PHASE = 0.1


def check_slope(theta: float):
    """Reject slopes outside (0, 1) or close to a rational with small denominator."""
    if not 0 < theta < 1:
        raise SpecError(f"theta must lie in (0, 1), got {theta}")
    rational = nearby_rational(theta)
    if rational is not None:
        raise SpecError(f"theta too close to rational: {theta} ≈ {rational}")


@dataclass(frozen=True)
class SturmianSpec:
    theta: float
    phase: float = DEFAULT_PHASE
    label: str = "sturmian"


class SturmianSource(DeloneSource):
    def __init__(self, spec: SturmianSpec):
        check_slope(spec.theta)
        self.spec = spec
        self.scale = strip_scale(spec.theta)
        self.window_lo, self.window_hi = sturmian_window(spec.theta)
        short, long = sturmian_gap_lengths(spec.theta)
        super().__init__(1, spec.label, r_min_lower=short / 2, r_max_upper=long / 2)

    def _candidates(self, ball: Ball) -> np.ndarray:
        theta, s, phase = self.spec.theta, self.scale, self.spec.phase
        t_lo = ball.center[0] - ball.radius
        t_hi = ball.center[0] + ball.radius
        u_lo, u_hi = self.window_lo - phase, self.window_hi - phase

        # m = (t − θu)/s over the box of admissible (t, u)
        ms = np.arange(
            np.floor((t_lo - theta * u_hi) / s) - 1,
            np.ceil((t_hi - theta * u_lo) / s) + 2,
        )
        # The window spans 1 + θ < 2 units of n for each m
        n_first = np.floor(theta * ms + s * u_lo)
        ms = np.repeat(ms, 4)
        ns = np.repeat(n_first, 4) + np.tile(np.arange(4), len(n_first))

        offsets = (ns - theta * ms) / s + phase
        t = (ms + theta * ns) / s
        in_ball = (t >= t_lo) & (t <= t_hi)

        grazing = in_ball & (
            (np.abs(offsets - self.window_lo) < GRAZING_TOL)
            | (np.abs(offsets - self.window_hi) < GRAZING_TOL)
        )
        if np.any(grazing):
            m, n = ms[grazing][0], ns[grazing][0]
            raise SpecError(
                f"singular phase {phase}: lattice point ({m:.0f}, {n:.0f}) "
                f"grazes the acceptance window"
            )
        accepted = (offsets >= self.window_lo) & (offsets < self.window_hi)
        logging.debug(f"Sturmian query {ball}: {np.count_nonzero(accepted)} points.")
        return t[accepted].reshape(-1, 1)


def sturmian_source(spec: SturmianSpec) -> SturmianSource:
    return SturmianSource(spec)
