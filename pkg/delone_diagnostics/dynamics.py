"""Probes of the translation dynamics: hull sampling, proximality, separation, forcing.

Hull elements are only ever exact translates Λ − x of the base set, so every
result here is a finite sample and never a certificate.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from delone_diagnostics.almostperiod import shifted_patch
from delone_diagnostics.errors import DimensionError, InputError
from delone_diagnostics.geometry import (
    Ball,
    Patch,
    boundary_augmented_distance,
    distances_to,
    merge_duplicates,
)
from delone_diagnostics.sources import (
    ANCHOR_TOL,
    PATCH_TOL,
    DeloneSource,
    materialize,
    patch_array,
    patch_arrays_equivalent,
    r_patch,
    translate,
)

# Coarse grid of probe times added to the points of the two translates
PROBE_PITCH = 0.1


@dataclass
class HullSample:
    base: DeloneSource
    offsets: np.ndarray = field(repr=False)
    window: Ball

    def __len__(self) -> int:
        return self.offsets.shape[0]

    def translates(self) -> list[DeloneSource]:
        """The elements Λ − x, each containing 0."""
        return [translate(self.base, x) for x in self.offsets]


@dataclass
class ProximalityReport:
    r: float
    t_window: Ball
    inf_estimate: float
    argmin_t: float


@dataclass
class AnchorReport:
    found: bool
    anchor: float | np.ndarray | None
    C_radius: float
    search_window: Ball
    examined: int


@dataclass
class ForcingReport:
    patch: Patch
    extension_radius: float
    forced: bool
    counterexample: tuple[np.ndarray, np.ndarray] | None
    matches: int


def _contains_origin(src: DeloneSource) -> bool:
    return len(src.points_in(Ball.around_origin(ANCHOR_TOL, src.dim))) > 0


def hull_transversal_sample(src: DeloneSource, window: Ball, count: int) -> HullSample:
    """The count points of the set in window closest to the origin, as offsets.

    Ties in |x| go to the smaller coordinate, so ℤ gives 0, −1, 1, −2, 2, ...
    """
    pts = materialize(src, window)
    if count < 1 or count > len(pts):
        raise InputError(
            f"Cannot sample {count} translates from {len(pts)} points in {window}."
        )
    norms = np.linalg.norm(pts.points, axis=1)
    order = np.lexsort((pts.points[:, 0], norms))
    offsets = pts.points[order[:count]]
    logging.info(f"Sampled {count} transversal elements of '{src.label}' in {window}.")
    return HullSample(base=src, offsets=offsets, window=window)


def proximality_probe(
    e1: DeloneSource, e2: DeloneSource, t_window: Ball, r: float
) -> ProximalityReport:
    """Smallest patch distance of e1 − t and e2 − t over probe times t in t_window.

    Probe times are the points of both translates in t_window plus a grid of
    pitch 0.1. The minimum is an upper bound for the infimum over the window;
    ties go to the smaller t.
    """
    if e1.dim != 1 or e2.dim != 1:
        raise DimensionError("Proximality probes are implemented for 1D sets.")
    if r <= 0:
        raise InputError(f"r must be positive, got {r}.")
    for e in (e1, e2):
        if not _contains_origin(e):
            logging.warning(f"Translate '{e.label}' does not contain 0.")

    reach = t_window.grown(r + ANCHOR_TOL)
    a, b = materialize(e1, reach).coords, materialize(e2, reach).coords
    lo = t_window.center[0] - t_window.radius
    steps = np.arange(math.floor(2 * t_window.radius / PROBE_PITCH) + 1)
    grid = lo + PROBE_PITCH * steps
    times = np.concatenate([a, b, grid])
    times = merge_duplicates(times[t_window.contains(times.reshape(-1, 1))])

    dists = np.array(
        [
            boundary_augmented_distance(
                shifted_patch(a, t, r), shifted_patch(b, t, r), r
            )
            for t in times
        ]
    )
    best = int(np.argmin(dists))
    report = ProximalityReport(
        r=r,
        t_window=t_window,
        inf_estimate=float(dists[best]),
        argmin_t=float(times[best]),
    )
    logging.info(
        f"Proximality of '{e1.label}' and '{e2.label}' at r={r:g} over {t_window}: "
        f"{report.inf_estimate:.6g} at t={report.argmin_t:.6g} "
        f"({times.size} probe times)."
    )
    return report


def separation_radius(R: float, f: int = 0) -> float:
    """Radius 2R + √f + 1 of the ball that separates distinct transversal elements.

    R is the covering radius, f the rank of the discrete ℤ^f factor of the group.
    """
    if R <= 0:
        raise InputError(f"R must be positive, got {R}.")
    if f < 0 or int(f) != f:
        raise InputError(f"f must be a nonnegative integer, got {f}.")
    return 2 * R + math.sqrt(f) + 1


def find_separating_anchor(
    e1: DeloneSource,
    e2: DeloneSource,
    C_radius: float,
    search_window: Ball,
    tol: float = PATCH_TOL,
) -> AnchorReport:
    """Smallest |v| common point of e1 and e2 whose C_radius-patches differ.

    Not finding one is a result of the finite window, reported with found=False.
    """
    if e1.dim != e2.dim:
        raise DimensionError(f"Dimension mismatch: {e1.dim} vs {e2.dim}.")
    if not (_contains_origin(e1) and _contains_origin(e2)):
        raise InputError("Both translates must contain 0.")
    reach = search_window.grown(C_radius + ANCHOR_TOL + tol)
    pts1, pts2 = materialize(e1, reach), materialize(e2, reach)
    inside1, inside2 = pts1.restricted(search_window), pts2.restricted(search_window)
    if patch_arrays_equivalent(inside1.points, inside2.points, tol):
        raise InputError(f"sets not distinct at this scale: equal on {search_window}")

    common = inside1.points[distances_to(inside2, inside1.points) <= tol]
    order = np.lexsort((common[:, 0], np.linalg.norm(common, axis=1)))
    for examined, v in enumerate(common[order], start=1):
        if not patch_arrays_equivalent(
            patch_array(pts1.points, v, C_radius),
            patch_array(pts2.points, v, C_radius),
            tol,
        ):
            logging.info(
                f"Separating anchor of '{e1.label}' and '{e2.label}' at v={v} "
                f"(C={C_radius:g}, {examined} common points examined)."
            )
            return AnchorReport(
                found=True,
                anchor=float(v[0]) if e1.dim == 1 else v,
                C_radius=C_radius,
                search_window=search_window,
                examined=examined,
            )
    logging.warning(
        f"No separating anchor for '{e1.label}' and '{e2.label}' among "
        f"{len(common)} common points in {search_window}."
    )
    return AnchorReport(
        found=False,
        anchor=None,
        C_radius=C_radius,
        search_window=search_window,
        examined=len(common),
    )


def patch_forcing_probe(
    src: DeloneSource,
    anchor,
    r: float,
    extension: float,
    sample: HullSample,
    tol: float = PATCH_TOL,
) -> ForcingReport:
    """Check whether the r-patch at anchor determines the set out to extension.

    Every sample translate whose r-patch at 0 matches is extended to radius
    extension and compared with the first match. forced=True only means the
    sample holds no counterexample.
    """
    if extension <= r:
        raise InputError(f"extension {extension:g} must exceed r {r:g}.")
    patch = r_patch(src, anchor, r)

    first = None
    matches = 0
    for x in sample.offsets:
        nearby = materialize(sample.base, Ball(x, extension + ANCHOR_TOL)).points
        if not patch_arrays_equivalent(
            patch_array(nearby, x, r), patch.points.points, tol
        ):
            continue
        matches += 1
        extended = patch_array(nearby, x, extension)
        if first is None:
            first = (x, extended)
        elif not patch_arrays_equivalent(first[1], extended, tol):
            logging.info(
                f"Patch at {anchor} (r={r:g}) does not force radius {extension:g}: "
                f"translates by {first[0]} and {x} disagree."
            )
            return ForcingReport(
                patch=patch,
                extension_radius=extension,
                forced=False,
                counterexample=(first[0], x),
                matches=matches,
            )
    if first is None:
        raise InputError(
            f"patch not found in sample: none of {len(sample)} translates of "
            f"'{sample.base.label}' has it at 0"
        )
    logging.info(
        f"No counterexample to forcing among {matches} matching translates "
        f"(r={r:g}, extension {extension:g})."
    )
    return ForcingReport(
        patch=patch,
        extension_radius=extension,
        forced=True,
        counterexample=None,
        matches=matches,
    )
