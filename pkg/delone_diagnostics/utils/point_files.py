"""Plain-text point-set files.

Line 1 is `dim n`, followed by lines of n whitespace-separated coordinates,
one point per line, in lexicographic order. A point count after n is accepted
and checked but never required. Lines starting with # are comments.
The writer records the window the points were materialized on as

    # window <center coordinates> <radius>

and the reader uses it as the extent of the resulting source.
"""

import logging

import numpy as np

from delone_diagnostics.errors import DimensionError, InputError
from delone_diagnostics.geometry import SUPPORTED_DIMS, Ball, FinitePointSet
from delone_diagnostics.sources import FiniteSource


def _fmt(x: float) -> str:
    # repr is the shortest string that reads back to the same float
    return repr(float(x))


def write_points(pts: FinitePointSet, path: str, window: Ball | None = None):
    lines = []
    if window is not None:
        center = " ".join(_fmt(c) for c in window.center)
        lines.append(f"# window {center} {_fmt(window.radius)}")
    lines.append(f"dim {pts.dim}")
    lines += [" ".join(_fmt(c) for c in row) for row in pts.points]
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    logging.info(f"Wrote {len(pts)} points to '{path}'.")


def _parse_window(comment: str, dim: int) -> Ball:
    values = comment.split()[2:]
    if len(values) != dim + 1:
        raise InputError(f"Malformed window comment '{comment}'.")
    *center, radius = map(float, values)
    return Ball(np.array(center), radius)


def read_points(path: str) -> tuple[FinitePointSet, Ball | None]:
    """Read a point file. Returns the points and the recorded window, if any."""
    with open(path) as f:
        lines = [line.strip() for line in f]

    window_comments = [line for line in lines if line.startswith("# window")]
    content = [line for line in lines if line and not line.startswith("#")]
    if not content:
        raise InputError(f"Point file '{path}' is empty.")

    header = content[0].split()
    if len(header) not in (2, 3) or header[0] != "dim":
        raise InputError(
            f"Point file '{path}' must start with 'dim n', got '{content[0]}'."
        )
    try:
        dim = int(header[1])
        count = int(header[2]) if len(header) == 3 else None
    except ValueError as e:
        raise InputError(f"Malformed header '{content[0]}' in '{path}'.") from e
    if dim not in SUPPORTED_DIMS:
        raise DimensionError(f"Unsupported dimension {dim} in '{path}'.")

    rows = content[1:]
    if count is not None and len(rows) != count:
        raise InputError(
            f"Point file '{path}' declares {count} points but holds {len(rows)}."
        )
    try:
        coords = np.loadtxt(rows, ndmin=2) if rows else np.empty((0, dim))
    except ValueError as e:
        raise InputError(f"Non-numeric coordinates in '{path}': {e}") from e
    if coords.shape[1] != dim:
        raise DimensionError(
            f"Point file '{path}' declares dim {dim} but has {coords.shape[1]} columns."
        )

    window = _parse_window(window_comments[0], dim) if window_comments else None
    pts = FinitePointSet.from_coords(coords, dim=dim)
    logging.info(f"Read {len(pts)} {dim}D points from '{path}'.")
    return pts, window


def source_from_points(path: str) -> FiniteSource:
    pts, window = read_points(path)
    return FiniteSource(pts, extent=window, label=path)
