"""Implicitly infinite point sets queried by window, and their local structure.

A DeloneSource answers "which points lie in this ball". Everything here works
on materialized windows. When an analysis quantifies over points x with an
auxiliary search radius s, it materializes a window enlarged by s so the finite
result is an exact restriction of the infinite-set quantity.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from tabulate import tabulate

from delone_diagnostics.errors import (
    DimensionError,
    EmptyError,
    InputError,
    ScaleError,
    require_margin,
)
from delone_diagnostics.geometry import (
    Ball,
    FinitePointSet,
    Patch,
    distances_to,
    largest_empty_gap,
    min_pair_separation,
)

# How far a requested anchor may sit from the point it stands for
ANCHOR_TOL = 1e-9
# Default matching tolerance for patch equivalence (exact-FLC mode)
PATCH_TOL = 1e-9


class DeloneSource(ABC):
    """A point set known only through window queries.

    Subclasses implement _candidates, which may return extra points outside the
    ball. points_in filters exactly, which makes nested queries consistent.
    """

    def __init__(
        self,
        dim: int,
        label: str,
        r_min_lower: float | None = None,
        r_max_upper: float | None = None,
    ):
        self.dim = dim
        self.label = label
        self.r_min_lower = r_min_lower
        self.r_max_upper = r_max_upper

    @abstractmethod
    def _candidates(self, ball: Ball) -> np.ndarray:
        """Points of the set in (and possibly around) ball, shape (n, dim)."""

    def points_in(self, ball: Ball) -> FinitePointSet:
        if ball.dim != self.dim:
            raise DimensionError(
                f"{ball}-query on the {self.dim}D source '{self.label}'."
            )
        pts = np.asarray(self._candidates(ball), dtype=float).reshape(-1, self.dim)
        return FinitePointSet.from_coords(pts[ball.contains(pts)], dim=self.dim)

    def __repr__(self):
        return f"{type(self).__name__}('{self.label}')"


class TranslatedSource(DeloneSource):
    """The translate base − offset."""

    def __init__(self, base: DeloneSource, offset):
        self.base = base
        self.offset = np.atleast_1d(np.asarray(offset, dtype=float))
        offset_str = ", ".join(f"{c:.12g}" for c in self.offset)
        super().__init__(
            base.dim,
            f"{base.label} - ({offset_str})",
            base.r_min_lower,
            base.r_max_upper,
        )

    def _candidates(self, ball: Ball) -> np.ndarray:
        query = ball.shifted(self.offset).grown(ANCHOR_TOL)
        return self.base.points_in(query).points - self.offset


class FiniteSource(DeloneSource):
    """A materialized point set, e.g. read from a point file.

    Nothing is known beyond the extent, so queries reaching past it are refused.
    """

    def __init__(
        self, points: FinitePointSet, extent: Ball | None = None, label: str = "points"
    ):
        if len(points) == 0:
            raise EmptyError("A finite source needs at least one point.")
        self.points = points
        self.extent = extent if extent is not None else _bounding_ball(points)
        super().__init__(points.dim, label)

    def _candidates(self, ball: Ball) -> np.ndarray:
        reach = float(np.linalg.norm(ball.center - self.extent.center)) + ball.radius
        if reach > self.extent.radius + ANCHOR_TOL:
            raise ScaleError(
                f"window {ball} reaches {reach:g} from the data center, "
                f"beyond the extent radius {self.extent.radius:g}"
            )
        return self.points.points


def _bounding_ball(points: FinitePointSet) -> Ball:
    lo, hi = points.points.min(axis=0), points.points.max(axis=0)
    center = (lo + hi) / 2
    return Ball(center, float(np.max(np.linalg.norm(points.points - center, axis=1))))


@dataclass
class DeloneCheckReport:
    r_min: float
    r_max: float
    uniformly_discrete: bool
    relatively_dense: bool
    window: Ball


@dataclass
class OccurrenceReport:
    patch: Patch
    window: Ball
    occurrences: FinitePointSet
    max_gap: float


def translate(src: DeloneSource, offset) -> DeloneSource:
    """The source of src − offset."""
    return TranslatedSource(src, offset)


def nearest_point(src: DeloneSource, near=None) -> np.ndarray:
    """The point of src closest to near (default: the origin)."""
    center = np.zeros(src.dim) if near is None else np.atleast_1d(near).astype(float)
    radius = src.r_max_upper or 1.0
    for _ in range(40):
        found = src.points_in(Ball(center, radius))
        if len(found):
            dists = np.linalg.norm(found.points - center, axis=1)
            return found.points[int(np.argmin(dists))]
        radius *= 2
    raise EmptyError(f"No point of '{src.label}' found near {center}.")


def normalize(src: DeloneSource, near=None) -> DeloneSource:
    """Translate src so that its point nearest to near sits at the origin."""
    x = nearest_point(src, near)
    if not np.any(x):
        return src
    return translate(src, x)


def materialize(src: DeloneSource, window: Ball) -> FinitePointSet:
    if window.radius <= 0:
        raise InputError(f"Window radius must be positive, got {window.radius}.")
    return src.points_in(window)


def snap_to_set(src: DeloneSource, x) -> np.ndarray:
    """Return the point of src within ANCHOR_TOL of x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    near = src.points_in(Ball(x, ANCHOR_TOL))
    if len(near) == 0:
        raise InputError(f"anchor not a point of the set: {x} in '{src.label}'")
    return near.points[int(np.argmin(np.linalg.norm(near.points - x, axis=1)))]


def patch_array(points: np.ndarray, anchor: np.ndarray, r: float) -> np.ndarray:
    shifted = points - anchor
    return shifted[Ball.around_origin(r, points.shape[1]).contains(shifted)]


def r_patch(src: DeloneSource, x, r: float, centered: bool = True) -> Patch:
    """The r-patch (−x + Λ) ∩ B_r(0).

    For centered patches x is snapped to the point of the set it stands for, so
    the origin is exactly one of the patch points.
    """
    if r <= 0:
        raise InputError(f"Patch radius must be positive, got {r}.")
    anchor = (
        snap_to_set(src, x) if centered else np.atleast_1d(np.asarray(x, dtype=float))
    )
    nearby = src.points_in(Ball(anchor, r + ANCHOR_TOL)).points
    points = FinitePointSet.from_coords(patch_array(nearby, anchor, r), dim=src.dim)
    return Patch(radius=r, points=points, centered=centered)


def patch_arrays_equivalent(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """Greedy nearest-neighbour matching of two point arrays within tol."""
    if a.shape != b.shape:
        return False
    if a.shape[0] == 0:
        return True
    if a.shape[1] == 1:
        return bool(np.max(np.abs(np.sort(a[:, 0]) - np.sort(b[:, 0]))) <= tol)
    dists, idx = cKDTree(b).query(a)
    return bool(np.all(dists <= tol) and np.unique(idx).size == idx.size)


def patches_equivalent(p: Patch, q: Patch, tol: float = PATCH_TOL) -> bool:
    if p.dim != q.dim:
        raise DimensionError(f"Dimension mismatch: {p.dim} vs {q.dim}.")
    return patch_arrays_equivalent(p.points.points, q.points.points, tol)


def _anchored_patches(pts: FinitePointSet, anchors: np.ndarray, r: float):
    """Yield (anchor, patch array) for anchors whose r-ball lies in the data."""
    if pts.dim == 1:
        coords = pts.coords
        lo = np.searchsorted(coords, anchors[:, 0] - r - ANCHOR_TOL, side="left")
        hi = np.searchsorted(coords, anchors[:, 0] + r + ANCHOR_TOL, side="right")
        for anchor, i, j in zip(anchors, lo, hi):
            yield anchor, patch_array(pts.points[i:j], anchor, r)
    else:
        tree = cKDTree(pts.points)
        for anchor in anchors:
            idx = tree.query_ball_point(anchor, r + ANCHOR_TOL)
            yield anchor, patch_array(pts.points[sorted(idx)], anchor, r)


def _covering_bound(src: DeloneSource, window: Ball) -> float:
    if src.r_max_upper is not None:
        return src.r_max_upper
    return delone_check(src, window).r_max


def delone_check(src: DeloneSource, window: Ball) -> DeloneCheckReport:
    """Packing and covering radii of the materialized window.

    Gaps touching the window edge are ignored for r_max. The flags compare with
    the bounds the source declares, when it declares any.
    """
    pts = materialize(src, window)
    if len(pts) < 2:
        raise EmptyError(f"{window} holds {len(pts)} point(s), need at least 2.")
    r_min = min_pair_separation(pts) / 2
    r_max = largest_empty_gap(pts, window, interior=True)

    uniformly_discrete = r_min > 0
    if src.r_min_lower is not None:
        uniformly_discrete = r_min >= src.r_min_lower * (1 - 1e-9)
    relatively_dense = bool(np.isfinite(r_max))
    if src.r_max_upper is not None:
        relatively_dense = relatively_dense and r_max <= src.r_max_upper * (1 + 1e-9)

    logging.info(
        f"Delone check of '{src.label}' on {window}: "
        f"r_min={r_min:.6g}, r_max={r_max:.6g}."
    )
    return DeloneCheckReport(
        r_min=r_min,
        r_max=r_max,
        uniformly_discrete=bool(uniformly_discrete),
        relatively_dense=relatively_dense,
        window=window,
    )


def flc_census(
    src: DeloneSource, r: float, window: Ball, tol: float = PATCH_TOL
) -> list[tuple[Patch, int]]:
    """Classes of centered r-patches over the anchors in window shrunk by r.

    Classes are listed in order of first occurrence; a patch joins the first
    class whose representative it matches within tol.
    """
    if tol < 0:
        raise InputError(f"Tolerance must be >= 0, got {tol}.")
    r_max = _covering_bound(src, window)
    if window.radius < r + r_max:
        raise ScaleError(
            f"window too small for radius: {window.radius:g} < "
            f"r {r:g} + r_max {r_max:g} = {r + r_max:g}"
        )
    pts = materialize(src, window)
    anchors = pts.restricted(window.shrunk(r)).points

    reps: list[np.ndarray] = []
    counts: list[int] = []
    # 1D patches of equal size are compared in bulk, one matrix per size
    by_size: dict[int, tuple[list[int], np.ndarray]] = {}
    for _, arr in _anchored_patches(pts, anchors, r):
        match = None
        if pts.dim == 1:
            row = arr[:, 0]
            ids, matrix = by_size.get(row.size, ([], np.empty((0, row.size))))
            if ids:
                hits = np.flatnonzero(np.max(np.abs(matrix - row), axis=1) <= tol)
                match = ids[hits[0]] if hits.size else None
            if match is None:
                by_size[row.size] = (ids + [len(reps)], np.vstack([matrix, row]))
        else:
            for i, rep in enumerate(reps):
                if patch_arrays_equivalent(rep, arr, tol):
                    match = i
                    break
        if match is None:
            reps.append(arr)
            counts.append(1)
        else:
            counts[match] += 1

    census = [
        (Patch(r, FinitePointSet.from_coords(rep, dim=pts.dim)), count)
        for rep, count in zip(reps, counts)
    ]
    logging.info(
        f"FLC census of '{src.label}' at r={r:g} on {window}: "
        f"{len(census)} classes over {len(anchors)} anchors."
    )
    top = sorted(census, key=lambda c: -c[1])[:10]
    logging.info(
        "\n"
        + tabulate(
            [[len(p), count] for p, count in top],
            headers=["points in patch", "anchors"],
        )
    )
    return census


def _agrees_shifted(
    pts: FinitePointSet, core: np.ndarray, t: np.ndarray, tol: float
) -> bool:
    if core.shape[0] == 0:
        return True
    if np.max(distances_to(pts, core + t)) > tol:
        return False
    return bool(np.max(distances_to(pts, core - t)) <= tol)


def detect_periods(
    src: DeloneSource, window: Ball, tol: float = PATCH_TOL
) -> FinitePointSet:
    """Exact periods t of the set with |t| up to half the window radius.

    Candidates are the differences y − x0 to the point x0 nearest the window
    center. A candidate is kept if t + Λ and Λ agree point for point within tol
    on the window shrunk by |t|, checked in both directions, so the result is
    symmetric under negation.
    """
    r_max = _covering_bound(src, window)
    if window.radius <= 2 * r_max:
        raise ScaleError(
            f"window radius {window.radius:g} <= 2 * r_max {r_max:g} = {2 * r_max:g}"
        )
    pts = materialize(src, window.grown(tol))
    inside = pts.restricted(window)
    x0 = inside.points[
        int(np.argmin(np.linalg.norm(inside.points - window.center, axis=1)))
    ]

    diffs = inside.points - x0
    norms = np.linalg.norm(diffs, axis=1)
    # One of each ±t pair: positive first coordinate, or zero first and positive second
    positive = (diffs[:, 0] > tol) | (
        (np.abs(diffs[:, 0]) <= tol) & (diffs[:, -1] > tol)
    )
    candidates = diffs[positive & (norms <= window.radius / 2)]

    periods = []
    for t in candidates:
        core = inside.restricted(window.shrunk(float(np.linalg.norm(t)))).points
        if _agrees_shifted(pts, core, t, tol):
            periods.append(t)
    logging.info(
        f"Period detection on '{src.label}' over {window}: "
        f"{len(periods)} positive periods among {len(candidates)} candidates."
    )
    if not periods:
        return FinitePointSet.empty(src.dim)
    found = np.array(periods)
    return FinitePointSet.from_coords(np.vstack([-found, found]), dim=src.dim)


def patch_occurrences(
    src: DeloneSource, patch: Patch, window: Ball, tol: float = PATCH_TOL
) -> OccurrenceReport:
    """Anchors in window shrunk by the patch radius whose patch matches patch."""
    require_margin(window.radius, patch.radius, "window radius vs patch radius")
    pts = materialize(src, window)
    anchors = pts.restricted(window.shrunk(patch.radius)).points
    hits = [
        anchor
        for anchor, arr in _anchored_patches(pts, anchors, patch.radius)
        if patch_arrays_equivalent(arr, patch.points.points, tol)
    ]
    occurrences = FinitePointSet.from_coords(
        np.array(hits).reshape(-1, src.dim), dim=src.dim
    )
    inner = window.shrunk(patch.radius)
    max_gap = 2 * largest_empty_gap(occurrences, inner)
    logging.info(
        f"Patch with {len(patch)} points occurs {len(occurrences)} times in "
        f"{inner}; largest gap between occurrences {max_gap:.6g}."
    )
    return OccurrenceReport(
        patch=patch, window=window, occurrences=occurrences, max_gap=max_gap
    )
