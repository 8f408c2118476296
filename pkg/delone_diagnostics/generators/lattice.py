import itertools
import logging
from dataclasses import dataclass

import numpy as np

from delone_diagnostics.errors import SpecError
from delone_diagnostics.geometry import Ball, SUPPORTED_DIMS, min_pair_separation
from delone_diagnostics.sources import DeloneSource

DESC = """Crystalline sets: a lattice basis·ℤⁿ plus finitely many motif offsets."""

MOTIF_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """Columns of basis are the lattice vectors; motif rows are offsets."""

    basis: np.ndarray
    motif: np.ndarray
    label: str = "lattice"

    def __post_init__(self):
        basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        dim = basis.shape[0]
        motif = np.asarray(self.motif, dtype=float).reshape(-1, dim)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "motif", motif)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def check_lattice_spec(spec: LatticeSpec):
    if spec.basis.shape != (spec.dim, spec.dim) or spec.dim not in SUPPORTED_DIMS:
        raise SpecError(f"basis must be a 1x1 or 2x2 matrix, got {spec.basis.shape}")
    det = float(np.linalg.det(spec.basis))
    if abs(det) <= 1e-12:
        raise SpecError(f"singular basis: det={det:g}")
    if spec.motif.shape[0] == 0:
        raise SpecError("motif must contain at least one offset")

    frac = np.linalg.solve(spec.basis, spec.motif.T).T
    if np.any(frac < -MOTIF_TOL) or np.any(frac >= 1 - MOTIF_TOL):
        raise SpecError(
            f"motif offsets must lie in the fundamental domain, got fractional "
            f"coordinates {frac.tolist()}"
        )
    for i, j in itertools.combinations(range(len(frac)), 2):
        wrapped = frac[i] - frac[j]
        wrapped -= np.round(wrapped)
        if np.linalg.norm(spec.basis @ wrapped) < MOTIF_TOL:
            raise SpecError(f"motif offsets {i} and {j} coincide mod the lattice")


class LatticeSource(DeloneSource):
    def __init__(self, spec: LatticeSpec):
        check_lattice_spec(spec)
        self.spec = spec
        self._inverse = np.linalg.inv(spec.basis)
        super().__init__(spec.dim, spec.label)
        self.r_min_lower, self.r_max_upper = self._radii()
        logging.info(
            f"Lattice source '{self.label}': r_min={self.r_min_lower:.6g}, "
            f"r_max <= {self.r_max_upper:.6g}."
        )

    def _radii(self) -> tuple[float, float]:
        lengths = np.linalg.norm(self.spec.basis, axis=0)
        reach = float(np.max(np.linalg.norm(self.spec.motif, axis=1)) + lengths.sum())
        near_origin = self.points_in(Ball.around_origin(reach + 1e-9, self.dim))
        r_min = min_pair_separation(near_origin) / 2
        if self.dim == 1:
            period = abs(self.spec.basis[0, 0])
            offsets = np.sort(self.spec.motif[:, 0] % period)
            gaps = np.diff(np.append(offsets, offsets[0] + period))
            return r_min, float(np.max(gaps)) / 2
        return r_min, float(lengths.sum()) / 2

    def _candidates(self, ball: Ball) -> np.ndarray:
        # Row norms of the inverse bound how far lattice coordinates reach
        spans = ball.radius * np.linalg.norm(self._inverse, axis=1)
        chunks = []
        for offset in self.spec.motif:
            center = self._inverse @ (ball.center - offset)
            ranges = [
                np.arange(np.floor(c - w), np.ceil(c + w) + 1)
                for c, w in zip(center, spans)
            ]
            ks = np.array(list(itertools.product(*ranges))).reshape(-1, self.dim)
            # Column-wise sums keep every point bit-identical across queries
            pts = np.tile(offset, (len(ks), 1))
            for i in range(self.dim):
                pts = pts + ks[:, i : i + 1] * self.spec.basis[:, i]
            chunks.append(pts)
        return np.vstack(chunks)


def lattice_source(spec: LatticeSpec) -> LatticeSource:
    return LatticeSource(spec)
