"""Generator spec files: a YAML or JSON mapping naming a generator and its parameters.

    {"type": "sturmian", "theta": "(sqrt(5)-1)/2", "phase": 0.1}
    {"type": "lattice", "basis": [[1]], "motif": [[0.5]]}
    {"type": "kronecker", "family": "cosine2", "params": [], "theta": "1/sqrt(2)"}

Numeric fields take numbers or short arithmetic strings over sqrt and pi.
"""

import logging
import math
import re

import numpy as np
import yaml

from delone_diagnostics.errors import SpecError
from delone_diagnostics.generators import (
    CurveSpec,
    GeneratorSpec,
    LatticeSpec,
    SturmianSpec,
)
from delone_diagnostics.generators.sturmian import DEFAULT_PHASE

FIELDS = {
    "lattice": {"type", "basis", "motif", "label"},
    "sturmian": {"type", "theta", "phase", "label"},
    "kronecker": {"type", "family", "params", "theta", "phase", "label"},
}
REQUIRED = {
    "lattice": {"basis"},
    "sturmian": {"theta"},
    "kronecker": {"family", "theta"},
}
# Digits, operators, brackets and exponents, once the names sqrt and pi are removed
_ARITHMETIC = re.compile(r"^[0-9eE+\-*/(). ]*$")


def parse_number(value) -> float:
    """A number, or an arithmetic string such as 'sqrt(2)-1' or '1/sqrt(2)'."""
    if isinstance(value, bool):
        raise SpecError(f"Expected a number, got {value!r}.")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str) or not value.strip():
        raise SpecError(f"Expected a number, got {value!r}.")
    if "**" in value or not _ARITHMETIC.match(re.sub(r"sqrt|pi", "", value)):
        raise SpecError(f"Invalid numeric expression '{value}'.")
    # Eval is usually scary, but the string is restricted to arithmetic by now
    try:
        result = eval(value, {"__builtins__": {}}, {"sqrt": math.sqrt, "pi": math.pi})
    except (NameError, SyntaxError, TypeError, ValueError, ZeroDivisionError) as e:
        raise SpecError(f"Cannot evaluate '{value}': {e}") from e
    return float(result)


def _parse_array(value, what: str) -> np.ndarray:
    if not isinstance(value, (list, int, float, str)):
        raise SpecError(f"Field '{what}' must be a number or a list, got {value!r}.")
    if isinstance(value, list):
        return np.array([_parse_array(v, what) for v in value], dtype=float)
    return np.array(parse_number(value))


def spec_from_dict(data: dict) -> GeneratorSpec:
    if not isinstance(data, dict):
        raise SpecError(
            f"A generator spec must be a mapping, got {type(data).__name__}."
        )
    kind = data.get("type")
    if kind not in FIELDS:
        raise SpecError(
            f"Unknown generator type {kind!r}, expected one of {list(FIELDS)}."
        )
    unknown = set(data) - FIELDS[kind]
    if unknown:
        raise SpecError(f"Unknown fields for type '{kind}': {sorted(unknown)}")
    absent = REQUIRED[kind] - set(data)
    if absent:
        raise SpecError(f"Missing fields for type '{kind}': {sorted(absent)}")
    label = str(data.get("label", kind))

    if kind == "lattice":
        basis = np.atleast_2d(_parse_array(data["basis"], "basis"))
        motif = _parse_array(data.get("motif", [[0.0] * basis.shape[0]]), "motif")
        return LatticeSpec(basis=basis, motif=motif, label=label)
    if kind == "sturmian":
        return SturmianSpec(
            theta=parse_number(data["theta"]),
            phase=parse_number(data.get("phase", DEFAULT_PHASE)),
            label=label,
        )
    params = data.get("params", [])
    if not isinstance(params, list):
        raise SpecError(f"Field 'params' must be a list, got {params!r}.")
    phase = data.get("phase", [0.0, 0.0])
    if not isinstance(phase, list):
        raise SpecError(f"Field 'phase' must be a pair of numbers, got {phase!r}.")
    return CurveSpec(
        family=str(data["family"]),
        params=tuple(parse_number(p) for p in params),
        theta=parse_number(data["theta"]),
        phase=tuple(parse_number(c) for c in phase),
        label=label,
    )


def load_generator_spec(path: str) -> GeneratorSpec:
    with open(path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise SpecError(f"Cannot parse spec file '{path}': {e}") from e
    spec = spec_from_dict(data)
    logging.info(f"Loaded {type(spec).__name__} '{spec.label}' from '{path}'.")
    return spec
