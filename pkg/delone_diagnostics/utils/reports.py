"""JSON reports and CSV plot data. Floats are written at 12 significant digits."""

import dataclasses
import json
import logging
import sys

import numpy as np
import pandas as pd

from delone_diagnostics.geometry import Ball, FinitePointSet, Patch
from delone_diagnostics.sources import DeloneSource
from delone_diagnostics.utils.formula import round_sig

SIG_DIGITS = 12


def to_jsonable(obj):
    """Recursively convert report objects to JSON-compatible values."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj), SIG_DIGITS)
    if isinstance(obj, Ball):
        return {"center": to_jsonable(obj.center), "radius": to_jsonable(obj.radius)}
    if isinstance(obj, FinitePointSet):
        return to_jsonable(obj.coords if obj.dim == 1 else obj.points)
    if isinstance(obj, Patch):
        return {"radius": to_jsonable(obj.radius), "points": to_jsonable(obj.points)}
    if isinstance(obj, DeloneSource):
        return obj.label
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


def op_record(op: str, params: dict, result) -> dict:
    """One report entry: the op name, its resolved params and its result fields."""
    record = {"op": op, "params": to_jsonable(params)}
    fields = to_jsonable(result)
    if isinstance(fields, dict):
        record.update(fields)
    else:
        record["result"] = fields
    return record


def write_report(report: dict, path: str | None):
    text = json.dumps(to_jsonable(report), indent=2, allow_nan=True)
    if path is None:
        sys.stdout.write(text + "\n")
        return
    with open(path, "w") as f:
        f.write(text + "\n")
    logging.info(f"Wrote report to '{path}'.")


def write_plot_data(rows: list[dict], path: str | None):
    """Long-format plot data: one row per (series, x, y)."""
    df = pd.DataFrame(rows, columns=["series", "x", "y"])
    text = df.to_csv(index=False, float_format=f"%.{SIG_DIGITS}g")
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w") as f:
        f.write(text)
    logging.info(f"Wrote {len(df)} plot data rows to '{path}'.")
