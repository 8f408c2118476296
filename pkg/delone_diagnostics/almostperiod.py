"""Finite-window diagnostics of almost periodicity for 1D Delone sets.

The distance between two sets is d = 1/R*, where R* is the largest radius on
which their boundary-augmented patches around the origin are within 1/R* of
each other. Small means close, for both the metric and the return vectors.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from tabulate import tabulate

from delone_diagnostics.errors import (
    DimensionError,
    EmptyError,
    InputError,
    NotAlmostPeriodError,
    NotUniqueError,
    ScaleError,
)
from delone_diagnostics.geometry import (
    Ball,
    FinitePointSet,
    boundary_augmented_distance,
    largest_empty_gap,
    merge_duplicates,
    nearest_distances,
)
from delone_diagnostics.sources import (
    ANCHOR_TOL,
    DeloneSource,
    delone_check,
    materialize,
    nearest_point,
    normalize,
)
from delone_diagnostics.utils.formula import triangle_bump

# Point-for-point agreement treated as equality of two sets
AGREEMENT_TOL = 1e-9
# Resolution of the bisection refining R*
DISTANCE_RESOLUTION = 1e-6
# Candidates tested against a few points first, then survivors against all
PREFILTER_POINTS = 64
CHUNK = 2048

CONSISTENT = "consistent-with-equicontinuous"
REFUTED = "refuted-at-scale"
INCONCLUSIVE = "inconclusive"


@dataclass
class ReturnVectorReport:
    r: float
    search_window: Ball
    vectors: FinitePointSet
    max_gap: float


@dataclass
class EpsPeriodReport:
    epsilon: float
    search_window: Ball
    periods: FinitePointSet
    max_gap: float
    relatively_dense_at_scale: bool
    check_window: Ball | None = None


@dataclass
class BijectionWitness:
    a: float
    pairs: np.ndarray = field(repr=False)
    max_displacement: float
    epsilon: float


@dataclass(frozen=True)
class BumpSpec:
    """Triangle bump centered at 0."""

    half_width: float
    height: float = 1.0
    shape: str = "triangle"

    def __post_init__(self):
        if self.shape != "triangle":
            raise InputError(f"Only triangle bumps are supported, got '{self.shape}'.")
        if self.half_width <= 0 or self.height <= 0:
            raise InputError("Bump half-width and height must be positive.")

    @property
    def lipschitz(self) -> float:
        return self.height / self.half_width

    def __call__(self, u):
        return triangle_bump(u, self.half_width, self.height)


@dataclass
class LadderStep:
    epsilon: float
    return_vectors: ReturnVectorReport
    reports: list[EpsPeriodReport]
    witnesses: list[BijectionWitness]
    failures: list[str]


@dataclass
class UapVerdict:
    verdict: str
    windows: list[Ball]
    steps: list[LadderStep]
    skipped: list[float]
    seed: int


def _require_1d(*sources: DeloneSource):
    dims = {src.dim for src in sources}
    if len(dims) > 1:
        raise DimensionError(f"Dimension mismatch: {sorted(dims)}.")
    if dims != {1}:
        raise DimensionError("Almost-period diagnostics are implemented for 1D sets.")


def _origin_patch(coords: np.ndarray, r: float) -> np.ndarray:
    return coords[np.abs(coords) <= r].reshape(-1, 1)


def shifted_patch(coords: np.ndarray, a: float, r: float) -> np.ndarray:
    """The r-patch of coords − a around the origin."""
    i = np.searchsorted(coords, a - r - ANCHOR_TOL, side="left")
    j = np.searchsorted(coords, a + r + ANCHOR_TOL, side="right")
    return _origin_patch(coords[i:j] - a, r)


def _max_gap(vectors: FinitePointSet, window: Ball) -> float:
    return 2 * largest_empty_gap(vectors, window)


def _check_epsilon(src: DeloneSource, epsilon: float, window: Ball) -> float:
    """Matching within epsilon is unique when epsilon < (minimal distance)/3."""
    if epsilon <= 0:
        raise InputError(f"epsilon must be positive, got {epsilon}.")
    r_min = delone_check(src, window).r_min
    bound = 2 * r_min / 3
    if epsilon >= bound:
        raise InputError(
            f"epsilon too coarse for unique matching: {epsilon:g} >= "
            f"2 * r_min / 3 = {bound:g}"
        )
    return r_min


def delone_distance(src1: DeloneSource, src2: DeloneSource, r_cap: float) -> float:
    _require_1d(src1, src2)
    if r_cap < 1:
        raise InputError(f"r_cap must be at least 1, got {r_cap}.")
    reach = Ball.around_origin(r_cap)
    a = materialize(src1, reach).coords
    b = materialize(src2, reach).coords
    if a.size == b.size and (a.size == 0 or np.max(np.abs(a - b)) <= AGREEMENT_TOL):
        return 0.0

    def passes(r: float) -> bool:
        dist = boundary_augmented_distance(_origin_patch(a, r), _origin_patch(b, r), r)
        return dist <= 1 / r

    grid = np.arange(1, math.floor(r_cap) + 1, dtype=float)
    if grid[-1] < r_cap:
        grid = np.append(grid, r_cap)
    passing = [i for i, r in enumerate(grid) if passes(r)]
    if not passing:
        return 1.0
    best = passing[-1]
    if best == len(grid) - 1:
        return 1 / float(grid[best])

    lo, hi = float(grid[best]), float(grid[best + 1])
    while hi - lo > DISTANCE_RESOLUTION:
        mid = (lo + hi) / 2
        if passes(mid):
            lo = mid
        else:
            hi = mid
    return 1 / lo


def return_vectors(
    src: DeloneSource, r: float, search_window: Ball
) -> ReturnVectorReport:
    """All a in the search window with d(B_r[Λ], B_r[Λ − a]) <= 1/r.

    Candidates are points of Λ plus a grid of offsets inside B_{1/r}, since every
    return vector lies within 1/r of the set.
    """
    _require_1d(src)
    if r <= 0:
        raise InputError(f"r must be positive, got {r}.")
    if abs(nearest_point(src)[0]) > ANCHOR_TOL:
        raise InputError(
            f"return vectors need 0 in '{src.label}'; normalize the set first"
        )
    reach = 1 / r
    pitch = min(1e-2, 1 / (4 * r))
    coords = materialize(src, search_window.grown(r + 2 * reach)).coords
    base = coords[search_window.grown(reach).contains(coords.reshape(-1, 1))]

    steps = np.arange(-math.floor(reach / pitch), math.floor(reach / pitch) + 1)
    offsets = steps * pitch
    offsets = offsets[np.abs(offsets) < reach]
    candidates = merge_duplicates((base[:, None] + offsets[None, :]).ravel())
    candidates = candidates[search_window.contains(candidates.reshape(-1, 1))]

    reference = _origin_patch(materialize(src, Ball.around_origin(r)).coords, r)
    kept = [
        a
        for a in candidates
        if boundary_augmented_distance(reference, shifted_patch(coords, a, r), r)
        <= reach
    ]
    vectors = FinitePointSet.from_coords(np.array(kept), dim=1)
    max_gap = _max_gap(vectors, search_window)
    logging.info(
        f"Return vectors of '{src.label}' at r={r:g} in {search_window}: "
        f"{len(vectors)} of {candidates.size} candidates, max gap {max_gap:.6g}."
    )
    return ReturnVectorReport(
        r=r, search_window=search_window, vectors=vectors, max_gap=max_gap
    )


def _within_everywhere(
    coords: np.ndarray, xs: np.ndarray, shifts: np.ndarray, epsilon: float
) -> np.ndarray:
    """For each shift a: every x + a and x − a lies within epsilon of coords."""
    ok = np.ones(shifts.size, dtype=bool)
    for start in range(0, shifts.size, CHUNK):
        part = shifts[start : start + CHUNK]
        for sign in (1, -1):
            queries = (xs[None, :] + sign * part[:, None]).ravel()
            dists = nearest_distances(coords, queries).reshape(part.size, xs.size)
            ok[start : start + CHUNK] &= np.max(dists, axis=1) <= epsilon
    return ok


def eps_almost_periods(
    src: DeloneSource,
    epsilon: float,
    search_window: Ball,
    check_radius: float | None = None,
    pitch: float | None = None,
) -> EpsPeriodReport:
    """The ε-almost periods of the set inside the search window.

    A candidate a is kept when x + a and x − a lie within epsilon of the set for
    every point x in the check window (default: twice the search radius).
    Candidates are Λ − x0 plus offsets of the given pitch (default ε/4) inside
    B_ε, x0 being the point nearest the origin. Shifts with 0 < |a| <= ε are
    trivially periods and are reported as 0 alone. Only a >= 0 is tested and the
    result mirrored, then restricted to the search window; for a window centered
    at the origin it is symmetric under negation.
    """
    _require_1d(src)
    _check_epsilon(src, epsilon, search_window)
    pitch = pitch or epsilon / 4
    check = Ball(search_window.center, check_radius or 2 * search_window.radius)
    reach = float(np.abs(search_window.center[0])) + search_window.radius
    coords = materialize(src, check.grown(reach + 2 * epsilon)).coords
    xs = coords[check.contains(coords.reshape(-1, 1))]
    if xs.size == 0:
        raise EmptyError(f"No points of '{src.label}' in the check window {check}.")

    x0 = nearest_point(src)[0]
    base = coords[np.abs(coords - x0) <= reach + epsilon] - x0
    steps = np.arange(-math.floor(epsilon / pitch), math.floor(epsilon / pitch) + 1)
    offsets = steps * pitch
    offsets = offsets[np.abs(offsets) <= epsilon]
    candidates = merge_duplicates(np.abs(base[:, None] + offsets[None, :]).ravel())
    # Shifts within ε of 0 are the identity and stand for 0 alone
    candidates = candidates[(candidates > epsilon) & (candidates <= reach)]
    candidates = np.concatenate([[0.0], candidates])

    sample = xs[np.linspace(0, xs.size - 1, min(PREFILTER_POINTS, xs.size)).astype(int)]
    survivors = candidates[_within_everywhere(coords, sample, candidates, epsilon)]
    positive = survivors[_within_everywhere(coords, xs, survivors, epsilon)]

    mirrored = np.concatenate([-positive[positive > 0], positive])
    mirrored = mirrored[search_window.contains(mirrored.reshape(-1, 1))]
    periods = FinitePointSet.from_coords(mirrored, dim=1)
    max_gap = _max_gap(periods, search_window)
    logging.info(
        f"ε-almost periods of '{src.label}' at ε={epsilon:g} in {search_window} "
        f"(checked on {check}): {len(periods)} periods, max gap {max_gap:.6g}."
    )
    return EpsPeriodReport(
        epsilon=epsilon,
        search_window=search_window,
        periods=periods,
        max_gap=max_gap,
        relatively_dense_at_scale=max_gap <= search_window.radius / 4,
        check_window=check,
    )


def find_bijection(
    src: DeloneSource, a: float, epsilon: float, window: Ball
) -> BijectionWitness:
    """Pair each x in the window with the unique y within epsilon of x + a."""
    _require_1d(src)
    _check_epsilon(src, epsilon, window)
    a = float(np.asarray(a).reshape(-1)[0])
    coords = materialize(src, window.grown(abs(a) + 2 * epsilon)).coords
    xs = coords[window.contains(coords.reshape(-1, 1))]
    targets = xs + a

    idx = np.clip(np.searchsorted(coords, targets), 1, coords.size - 1)
    left, right = coords[idx - 1], coords[idx]
    nearest = np.where(np.abs(targets - left) <= np.abs(targets - right), left, right)
    displacement = np.abs(targets - nearest)

    missed = np.flatnonzero(displacement > epsilon)
    if missed.size:
        x = float(xs[missed[0]])
        raise NotAlmostPeriodError(
            f"a={a:.12g} is not an ε-almost period: x={x:.12g} + a misses the set "
            f"by {displacement[missed[0]]:.6g} > ε={epsilon:g}",
            x=x,
        )
    both = (np.abs(targets - left) <= epsilon) & (np.abs(targets - right) <= epsilon)
    if np.any(both):
        raise NotUniqueError(
            f"epsilon exceeds matching uniqueness at x={xs[np.argmax(both)]:.12g}"
        )
    if np.unique(nearest).size != nearest.size:
        raise NotUniqueError(f"pairing for a={a:.12g} is not injective")

    return BijectionWitness(
        a=a,
        pairs=np.column_stack([xs, nearest]),
        max_displacement=float(np.max(displacement)) if displacement.size else 0.0,
        epsilon=epsilon,
    )


def _sample_comb(
    coords: np.ndarray, phi: BumpSpec, center: float, pitch: float, span: int
) -> np.ndarray:
    """f(s) = Σ φ(s − x) at s = center + i·pitch for |i| <= span."""
    f = np.zeros(2 * span + 1)
    first = np.ceil((coords - phi.half_width - center) / pitch).astype(int)
    last = np.floor((coords + phi.half_width - center) / pitch).astype(int)
    lengths = np.maximum(last - first + 1, 0)
    owner = np.repeat(np.arange(coords.size), lengths)
    starts = np.repeat(np.cumsum(lengths) - lengths, lengths)
    grid_idx = np.repeat(first, lengths) + np.arange(lengths.sum()) - starts
    values = phi(center + grid_idx * pitch - coords[owner])
    inside = np.abs(grid_idx) <= span
    np.add.at(f, grid_idx[inside] + span, values[inside])
    return f


def bohr_diagnostic(
    src: DeloneSource,
    phi: BumpSpec,
    epsilon: float,
    grid_pitch: float,
    window: Ball,
    check_radius: float | None = None,
) -> EpsPeriodReport:
    """Grid ε-periods t of f(s) = Σ_{x∈Λ} φ(s − x), |t| up to the window radius.

    t is kept when |f(s − t) − f(s)| <= epsilon for every grid point s within
    check_radius (default: twice the window radius) of the window center.
    """
    _require_1d(src)
    if grid_pitch > phi.half_width / 10 * (1 + 1e-12):
        raise ScaleError(
            f"grid pitch {grid_pitch:g} > half-width {phi.half_width:g} / 10 "
            f"= {phi.half_width / 10:g}"
        )
    if epsilon <= 0:
        raise InputError(f"epsilon must be positive, got {epsilon}.")
    center = float(window.center[0])
    shifts = math.floor(window.radius / grid_pitch)
    core = math.floor((check_radius or 2 * window.radius) / grid_pitch)
    span = core + shifts
    coords = materialize(
        src, Ball(window.center, span * grid_pitch + phi.half_width + grid_pitch)
    ).coords
    f = _sample_comb(coords, phi, center, grid_pitch, span)

    ks = np.arange(-shifts, shifts + 1)
    core_idx = np.arange(-core, core + 1) + span
    # Bump peaks catch most misaligned shifts cheaply
    peaks = np.round((coords - center) / grid_pitch).astype(int)
    peaks = peaks[np.abs(peaks) <= core] + span
    if peaks.size == 0:
        peaks = core_idx[:: max(1, core_idx.size // PREFILTER_POINTS)]

    def max_deviation(indices: np.ndarray, k_part: np.ndarray) -> np.ndarray:
        moved = f[indices[None, :] - k_part[:, None]]
        return np.max(np.abs(moved - f[indices][None, :]), axis=1)

    survivors = []
    for start in range(0, ks.size, CHUNK):
        part = ks[start : start + CHUNK]
        survivors.append(part[max_deviation(peaks, part) <= epsilon])
    candidates = np.concatenate(survivors)
    kept = [
        k for k in candidates if max_deviation(core_idx, np.array([k]))[0] <= epsilon
    ]

    periods = FinitePointSet.from_coords(
        np.array(kept, dtype=float) * grid_pitch, dim=1
    )
    max_gap = _max_gap(periods, window)
    logging.info(
        f"Bohr diagnostic of '{src.label}' (half-width {phi.half_width:g}, "
        f"ε={epsilon:g}, pitch {grid_pitch:g}) in {window}: {len(periods)} grid "
        f"periods, max gap {max_gap:.6g}."
    )
    return EpsPeriodReport(
        epsilon=epsilon,
        search_window=window,
        periods=periods,
        max_gap=max_gap,
        relatively_dense_at_scale=max_gap <= window.radius / 4,
        check_window=Ball(window.center, core * grid_pitch),
    )


def default_ladder(r_min: float) -> list[float]:
    """Epsilons at fixed fractions of the minimal point distance 2·r_min."""
    return [fraction * 2 * r_min for fraction in (0.2, 0.1, 0.05)]


def uap_diagnostic(
    src: DeloneSource,
    ladder: list[float] | None = None,
    windows: list[Ball] | None = None,
    seed: int = 0,
    spot_checks: int = 3,
) -> UapVerdict:
    """Run the almost-period diagnostics over a ladder of ε and windows.

    The verdict is refuted-at-scale when, at the largest window, some ε-period
    set leaves a gap longer than half the window radius. It is inconclusive when
    a bijection spot-check fails or no ladder step could run. Otherwise it is
    consistent-with-equicontinuous, which is evidence and never a proof.
    """
    _require_1d(src)
    if ladder is not None and not ladder:
        raise InputError("The ladder needs at least one epsilon.")
    windows = sorted(
        windows or [Ball.around_origin(100), Ball.around_origin(200)],
        key=lambda w: w.radius,
    )
    largest = windows[-1]
    src = normalize(src)
    r_min = delone_check(src, largest).r_min
    ladder = ladder or default_ladder(r_min)
    rng = np.random.default_rng(seed)

    steps: list[LadderStep] = []
    skipped: list[float] = []
    for epsilon in ladder:
        if epsilon >= 2 * r_min / 3:
            logging.warning(
                f"Skipping ε={epsilon:g}: not below 2 * r_min / 3 = {2 * r_min / 3:g}."
            )
            skipped.append(epsilon)
            continue
        vectors = return_vectors(src, 1 / epsilon, windows[0])
        reports = [eps_almost_periods(src, epsilon, w) for w in windows]

        nonzero = reports[-1].periods.coords[reports[-1].periods.coords != 0]
        picks = rng.choice(nonzero, size=min(spot_checks, nonzero.size), replace=False)
        witnesses, failures = [], []
        for a in sorted(picks):
            try:
                witnesses.append(
                    find_bijection(src, a, epsilon, reports[-1].check_window)
                )
            except InputError as e:
                logging.error(str(e), exc_info=True)
                failures.append(str(e))
        steps.append(LadderStep(epsilon, vectors, reports, witnesses, failures))

    if any(step.reports[-1].max_gap > largest.radius / 2 for step in steps):
        verdict = REFUTED
    elif not steps or any(step.failures for step in steps):
        verdict = INCONCLUSIVE
    else:
        verdict = CONSISTENT

    rows = [
        [step.epsilon, step.return_vectors.max_gap]
        + [report.max_gap for report in step.reports]
        + [len(step.witnesses), len(step.failures)]
        for step in steps
    ]
    headers = ["epsilon", "return max gap"]
    headers += [f"max gap {w}" for w in windows] + ["witnesses", "failures"]
    logging.info("\n" + tabulate(rows, headers=headers))
    logging.info(f"Verdict for '{src.label}': {verdict}.")
    return UapVerdict(
        verdict=verdict, windows=windows, steps=steps, skipped=skipped, seed=seed
    )
