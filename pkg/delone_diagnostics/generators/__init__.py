"""Concrete point set constructors: lattices, Sturmian sets and Kronecker-curve sets."""

from delone_diagnostics.errors import SpecError
from delone_diagnostics.generators.kronecker import (
    CurveSpec,
    CurveValidationReport,
    KroneckerSource,
    kronecker_source,
    solve_intersections,
    validate_curve,
)
from delone_diagnostics.generators.lattice import (
    LatticeSource,
    LatticeSpec,
    lattice_source,
)
from delone_diagnostics.generators.sturmian import (
    SturmianSource,
    SturmianSpec,
    sturmian_source,
)
from delone_diagnostics.sources import DeloneSource

GeneratorSpec = LatticeSpec | SturmianSpec | CurveSpec


def source_from_spec(spec: GeneratorSpec) -> DeloneSource:
    if isinstance(spec, LatticeSpec):
        return lattice_source(spec)
    if isinstance(spec, SturmianSpec):
        return sturmian_source(spec)
    if isinstance(spec, CurveSpec):
        return kronecker_source(spec)
    raise SpecError(f"Not a generator spec: {spec!r}")


__all__ = [
    "CurveSpec",
    "CurveValidationReport",
    "GeneratorSpec",
    "KroneckerSource",
    "LatticeSource",
    "LatticeSpec",
    "SturmianSource",
    "SturmianSpec",
    "kronecker_source",
    "lattice_source",
    "solve_intersections",
    "source_from_spec",
    "sturmian_source",
    "validate_curve",
]
