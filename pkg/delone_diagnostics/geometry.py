"""Point sets, balls and the distance statistics everything else is built from.

Points are rows of float64 numpy arrays. Dimensions 1 and 2 are supported.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from delone_diagnostics.errors import DimensionError, EmptyError, InputError

DUPLICATE_TOL = 1e-12
# Spacing of the sampled circle standing in for the boundary of a 2D ball
BOUNDARY_PITCH = 1e-3
# Grid pitch of the 2D empty-ball search, relative to the window radius
GAP_GRID_FRACTION = 1e-2

SUPPORTED_DIMS = (1, 2)


def _as_points(coords, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(coords, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        # A flat list is a list of 1D points unless a 2D dim was asked for
        arr = arr.reshape(-1, 2) if dim == 2 else arr.reshape(-1, 1)
    if dim is not None and arr.size and arr.shape[1] != dim:
        raise DimensionError(f"Expected {dim}D points, got {arr.shape[1]}D.")
    if not np.all(np.isfinite(arr)):
        raise InputError("Point coordinates must be finite.")
    return arr


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed ball B_radius(center)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        if center.ndim != 1 or center.shape[0] not in SUPPORTED_DIMS:
            raise DimensionError(f"Unsupported ball center {self.center!r}.")
        if not (math.isfinite(self.radius) and self.radius >= 0):
            raise InputError(f"Ball radius must be finite and >= 0, got {self.radius}.")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def around_origin(cls, radius: float, dim: int = 1) -> "Ball":
        return cls(np.zeros(dim), radius)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of the rows of points lying in the closed ball."""
        if self.dim == 1:
            return np.abs(points[:, 0] - self.center[0]) <= self.radius
        return np.hypot(*(points - self.center).T) <= self.radius

    def grown(self, margin: float) -> "Ball":
        return Ball(self.center, self.radius + margin)

    def shrunk(self, margin: float) -> "Ball":
        return Ball(self.center, max(self.radius - margin, 0.0))

    def shifted(self, offset) -> "Ball":
        return Ball(self.center + np.asarray(offset, dtype=float), self.radius)

    def __repr__(self):
        center = ", ".join(f"{c:g}" for c in self.center)
        return f"B_{self.radius:g}({center})"


@dataclass(frozen=True, eq=False)
class FinitePointSet:
    """Sorted, duplicate-free finite point set.

    Build with FinitePointSet.from_coords, which sorts lexicographically and
    enforces the duplicate guard.
    """

    dim: int
    points: np.ndarray = field(repr=False)

    @classmethod
    def from_coords(cls, coords, dim: int | None = None) -> "FinitePointSet":
        arr = _as_points(coords, dim)
        if dim is None:
            dim = arr.shape[1] if arr.size else 1
        if dim not in SUPPORTED_DIMS:
            raise DimensionError(f"Unsupported dimension {dim}.")
        arr = arr.reshape(-1, dim)
        arr = arr[np.lexsort(arr.T[::-1])]
        ps = cls(dim=dim, points=arr)
        if len(ps) >= 2 and _closest_pair(arr) < DUPLICATE_TOL:
            raise InputError(
                f"Points closer than the duplicate threshold {DUPLICATE_TOL:g}."
            )
        return ps

    @classmethod
    def empty(cls, dim: int = 1) -> "FinitePointSet":
        return cls(dim=dim, points=np.empty((0, dim)))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def coords(self) -> np.ndarray:
        """The sorted coordinates of a 1D set as a flat array."""
        if self.dim != 1:
            raise DimensionError("coords is only defined for 1D sets.")
        return self.points[:, 0]

    def restricted(self, ball: Ball) -> "FinitePointSet":
        return FinitePointSet(self.dim, self.points[ball.contains(self.points)])

    def shifted(self, offset) -> "FinitePointSet":
        """The translate ps + offset. Order is preserved by translation."""
        return FinitePointSet(self.dim, self.points + np.asarray(offset, dtype=float))

    def allclose(self, other: "FinitePointSet", tol: float) -> bool:
        """Point-for-point agreement of two sorted sets within tol."""
        if self.dim != other.dim or len(self) != len(other):
            return False
        if len(self) == 0:
            return True
        return bool(np.max(np.abs(self.points - other.points)) <= tol)

    def __repr__(self):
        return f"FinitePointSet(dim={self.dim}, n={len(self)})"


@dataclass(frozen=True, eq=False)
class Patch:
    """The points of a set inside B_radius(0), usually recentred at a point.

    centered is true when the patch was anchored at a point of the set, in which
    case the origin is one of the points.
    """

    radius: float
    points: FinitePointSet
    centered: bool = True

    @property
    def dim(self) -> int:
        return self.points.dim

    def __len__(self) -> int:
        return len(self.points)


def merge_duplicates(values: np.ndarray, tol: float = DUPLICATE_TOL) -> np.ndarray:
    """Sort 1D values and keep the first of every run closer than tol."""
    values = np.sort(np.asarray(values, dtype=float))
    if values.size < 2:
        return values
    keep = np.concatenate([[True], np.diff(values) >= tol])
    return values[keep]


def _closest_pair(points: np.ndarray) -> float:
    if points.shape[1] == 1:
        return float(np.min(np.diff(points[:, 0])))
    dists, _ = cKDTree(points).query(points, k=2)
    return float(np.min(dists[:, 1]))


def nearest_distances(sorted_coords: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Distance from each query to the nearest of the sorted 1D coordinates."""
    idx = np.searchsorted(sorted_coords, queries)
    left = sorted_coords[np.clip(idx - 1, 0, sorted_coords.size - 1)]
    right = sorted_coords[np.clip(idx, 0, sorted_coords.size - 1)]
    return np.minimum(np.abs(queries - left), np.abs(queries - right))


def distances_to(ps: FinitePointSet, queries: np.ndarray) -> np.ndarray:
    """Distance from each row of queries to the nearest point of ps."""
    if ps.dim == 1:
        return nearest_distances(ps.coords, queries.reshape(-1))
    dists, _ = cKDTree(ps.points).query(queries)
    return dists


def _directed(a: np.ndarray, b: np.ndarray) -> float:
    """sup over a of the distance to b."""
    if a.shape[1] == 1:
        return float(np.max(nearest_distances(np.sort(b[:, 0]), a[:, 0])))
    dists, _ = cKDTree(b).query(a)
    return float(np.max(dists))


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    return max(_directed(a, b), _directed(b, a))


def hausdorff_distance(a: FinitePointSet, b: FinitePointSet) -> float:
    if len(a) == 0 or len(b) == 0:
        raise EmptyError("empty set has no Hausdorff distance")
    if a.dim != b.dim:
        raise DimensionError(f"Dimension mismatch: {a.dim} vs {b.dim}.")
    return _hausdorff(a.points, b.points)


def sphere_points(radius: float, dim: int) -> np.ndarray:
    """The boundary of B_radius(0): two points in 1D, a sampled circle in 2D."""
    if dim == 1:
        return np.array([[-radius], [radius]])
    n = max(64, math.ceil(2 * math.pi * radius / BOUNDARY_PITCH))
    angles = np.linspace(0, 2 * math.pi, n, endpoint=False)
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def boundary_augmented_distance(a: np.ndarray, b: np.ndarray, radius: float) -> float:
    """Hausdorff distance of (a ∪ ∂B_r) and (b ∪ ∂B_r) for arrays in B_r(0)."""
    boundary = sphere_points(radius, a.shape[1] if a.size else b.shape[1])
    return _hausdorff(np.vstack([a, boundary]), np.vstack([b, boundary]))


def patch_distance(p: Patch, q: Patch) -> float:
    if abs(p.radius - q.radius) > DUPLICATE_TOL:
        raise InputError(f"Patch radius mismatch: {p.radius} vs {q.radius}.")
    if p.dim != q.dim:
        raise DimensionError(f"Dimension mismatch: {p.dim} vs {q.dim}.")
    return boundary_augmented_distance(p.points.points, q.points.points, p.radius)


def min_pair_separation(ps: FinitePointSet) -> float:
    if len(ps) < 2:
        raise EmptyError(f"Need at least 2 points for a separation, got {len(ps)}.")
    return _closest_pair(ps.points)


def largest_empty_gap(
    ps: FinitePointSet, window: Ball, interior: bool = False
) -> float:
    """Radius of the largest ball inside window that contains no point of ps.

    With interior=True, balls touching the window boundary are discarded, so only
    gaps between points count.
    """
    if ps.dim != window.dim:
        raise DimensionError(f"Dimension mismatch: {ps.dim} vs {window.dim}.")
    inside = ps.restricted(window)
    if len(inside) == 0:
        logging.warning(f"No points in {window}, returning the window radius.")
        return window.radius

    if ps.dim == 1:
        coords = inside.coords
        gaps = np.diff(coords)
        if not interior:
            lo, hi = window.center[0] - window.radius, window.center[0] + window.radius
            gaps = np.concatenate([[coords[0] - lo], gaps, [hi - coords[-1]]])
        return float(np.max(gaps)) / 2 if gaps.size else 0.0

    pitch = GAP_GRID_FRACTION * window.radius
    ticks = np.arange(-window.radius, window.radius + pitch / 2, pitch)
    gx, gy = np.meshgrid(ticks, ticks)
    grid = np.column_stack([gx.ravel(), gy.ravel()]) + window.center
    to_boundary = window.radius - np.hypot(*(grid - window.center).T)
    grid, to_boundary = grid[to_boundary >= 0], to_boundary[to_boundary >= 0]
    to_points, _ = cKDTree(inside.points).query(grid)
    if interior:
        enclosed = to_points <= to_boundary
        return float(np.max(to_points[enclosed])) if np.any(enclosed) else 0.0
    return float(np.max(np.minimum(to_points, to_boundary)))
