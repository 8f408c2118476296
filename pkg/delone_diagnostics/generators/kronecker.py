import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from delone_diagnostics.errors import InputError, SolverError, SpecError
from delone_diagnostics.generators.sturmian import check_slope
from delone_diagnostics.geometry import Ball, merge_duplicates
from delone_diagnostics.sources import DeloneSource

DESC = """Crossing times of a Kronecker line with a transversal curve on the torus.

The curve Γ = ℤ² + {(s, γ(s)) : s in [0,1]} is given in graph form. A time t
belongs to the set when phase + (t, θt) lies on Γ. Writing s = phase_x + t − p
for the integer cell p, this means H_p(s) = phase_y + θt − γ(s) is an integer q.
H_p is strictly monotone in s because γ′ never equals θ, so each (p, q) has at
most one root, found by bisection.
"""

FAMILIES = ("linear", "cosine2", "polynomial")
CURVE_SAMPLES = 10_000
ENDPOINT_TOL = 1e-12
BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 60


@dataclass(frozen=True)
class CurveSpec:
    """A graph-form curve γ with the slope θ and the phase of the Kronecker line.

    Families and their params:
        linear      [a, b]      γ(s) = a + b·s
        cosine2     [] or [c]   γ(s) = c + cos²(πs/2)
        polynomial  [c0, c1..]  γ(s) = Σ c_k s^k
    """

    family: str
    params: tuple[float, ...]
    theta: float
    phase: tuple[float, float] = (0.0, 0.0)
    label: str = field(default="kronecker")

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(
                f"unknown curve family '{self.family}', expected one of {FAMILIES}"
            )
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        phase = tuple(float(c) for c in self.phase)
        if len(phase) != 2:
            raise SpecError(f"phase must be a point of the plane, got {self.phase}")
        object.__setattr__(self, "phase", phase)
        expected = {"linear": (2,), "cosine2": (0, 1)}.get(self.family)
        if expected is not None and len(self.params) not in expected:
            raise SpecError(
                f"family '{self.family}' takes {' or '.join(map(str, expected))} "
                f"params, got {len(self.params)}"
            )
        if self.family == "polynomial" and not self.params:
            raise SpecError("family 'polynomial' needs at least one coefficient")
        check_slope(self.theta)

    @cached_property
    def _polynomial(self) -> Polynomial:
        return Polynomial(self.params)

    def gamma(self, s):
        s = np.asarray(s, dtype=float)
        if self.family == "linear":
            a, b = self.params
            return a + b * s
        if self.family == "cosine2":
            offset = self.params[0] if self.params else 0.0
            return offset + np.cos(np.pi * s / 2) ** 2
        return self._polynomial(s)

    def gamma_prime(self, s):
        s = np.asarray(s, dtype=float)
        if self.family == "linear":
            return np.full_like(s, self.params[1])
        if self.family == "cosine2":
            return -np.pi / 2 * np.sin(np.pi * s)
        return self._polynomial.deriv()(s)

    def with_phase(self, phase) -> "CurveSpec":
        return replace(self, phase=tuple(phase))


@dataclass
class CurveValidationReport:
    transversal_margin: float
    endpoint_defect: float
    injective: bool
    epsilon_estimate: float
    # Range of |θ − γ′|: crossing times are between 1/d_hi and 1/d_lo apart
    density_bounds: tuple[float, float]
    direction: int

    @property
    def valid(self) -> bool:
        return (
            self.transversal_margin > 0
            and self.endpoint_defect <= ENDPOINT_TOL
            and self.injective
        )

    def failing_invariant(self) -> str | None:
        if self.transversal_margin <= 0:
            return (
                f"transversal_margin={self.transversal_margin:g} "
                "(gamma' - theta changes sign)"
            )
        if self.endpoint_defect > ENDPOINT_TOL:
            return f"endpoint_defect={self.endpoint_defect:g}"
        if not self.injective:
            return "injective=False"
        return None


def validate_curve(spec: CurveSpec) -> CurveValidationReport:
    s = np.linspace(0.0, 1.0, CURVE_SAMPLES)
    slopes = spec.gamma_prime(s)
    diff = slopes - spec.theta
    gap = np.abs(diff)

    sign_constant = bool(np.all(diff > 0) or np.all(diff < 0))
    margin = float(np.min(gap)) if sign_constant else 0.0
    jump = float(spec.gamma(1.0) - spec.gamma(0.0))
    defect = abs(jump - round(jump))
    epsilon = margin / (2 * (1 + spec.theta + float(np.max(np.abs(slopes)))))

    report = CurveValidationReport(
        transversal_margin=margin,
        endpoint_defect=defect,
        # Graph curves never meet themselves: first coordinates differ mod 1
        injective=True,
        epsilon_estimate=epsilon,
        density_bounds=(float(np.min(gap)), float(np.max(gap))),
        direction=1 if float(np.mean(diff)) < 0 else -1,
    )
    if not report.valid:
        logging.warning(
            f"Curve '{spec.label}' is invalid: {report.failing_invariant()}."
        )
    return report


def _reduced_phase(spec: CurveSpec) -> tuple[float, float]:
    x, y = spec.phase
    return x - math.floor(x), y - math.floor(y)


def solve_intersections(
    spec: CurveSpec,
    interval: tuple[float, float],
    report: CurveValidationReport | None = None,
) -> np.ndarray:
    """All times t in the closed interval with phase + (t, θt) on Γ, sorted."""
    report = report or validate_curve(spec)
    if not report.valid:
        raise SpecError(f"invalid curve '{spec.label}': {report.failing_invariant()}")
    t_a, t_b = map(float, interval)
    if t_a > t_b:
        raise InputError(f"Empty interval [{t_a}, {t_b}].")

    x0, y0 = _reduced_phase(spec)
    theta, sign = spec.theta, report.direction
    # One spare cell on each side so duplicate roots at cell edges always meet
    cells = np.arange(math.floor(t_a + x0) - 1, math.floor(t_b + x0) + 2)

    def height(s, p):
        return y0 + theta * (s + p - x0) - spec.gamma(s)

    h_lo, h_hi = height(0.0, cells), height(1.0, cells)
    # Integers q hit by H_p on the half-open cell s in [0, 1)
    if sign > 0:
        q_first, q_last = np.ceil(h_lo), np.ceil(h_hi) - 1
    else:
        q_first, q_last = np.floor(h_hi) + 1, np.floor(h_lo)
    counts = np.maximum(q_last - q_first + 1, 0).astype(int)
    ps = np.repeat(cells, counts)
    qs = np.concatenate(
        [np.arange(a, a + n) for a, n in zip(q_first, counts)] or [np.empty(0)]
    )
    if ps.size == 0:
        return np.empty(0)

    def signed(s):
        return sign * (height(s, ps) - qs)

    lo, hi = np.zeros(ps.size), np.ones(ps.size)
    g_lo, g_hi = signed(lo), signed(hi)
    broken = (g_lo > 0) | (g_hi <= 0)
    if np.any(broken):
        i = int(np.flatnonzero(broken)[0])
        raise SolverError(
            f"bisection bracket failure in cell (p, q) = ({ps[i]:.0f}, {qs[i]:.0f})",
            cell=(int(ps[i]), int(qs[i])),
        )
    exact = g_lo == 0
    for _ in range(BISECTION_MAX_ITER):
        if np.max(hi - lo) <= BISECTION_TOL:
            break
        mid = (lo + hi) / 2
        below = signed(mid) <= 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    s_root = np.where(exact, 0.0, (lo + hi) / 2)

    roots = merge_duplicates(s_root + ps - x0)
    return roots[(roots >= t_a) & (roots <= t_b)]


class KroneckerSource(DeloneSource):
    def __init__(self, spec: CurveSpec):
        self.spec = spec
        self.report = validate_curve(spec)
        if not self.report.valid:
            raise SpecError(
                f"invalid curve '{spec.label}': {self.report.failing_invariant()}"
            )
        d_lo, d_hi = self.report.density_bounds
        super().__init__(
            1, spec.label, r_min_lower=1 / (2 * d_hi), r_max_upper=1 / (2 * d_lo)
        )

    def _candidates(self, ball: Ball) -> np.ndarray:
        c, r = ball.center[0], ball.radius
        roots = solve_intersections(self.spec, (c - r, c + r), self.report)
        return roots.reshape(-1, 1)


def kronecker_source(spec: CurveSpec) -> KroneckerSource:
    return KroneckerSource(spec)
