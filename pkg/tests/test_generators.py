import math

import numpy as np
import pytest
from conftest import GOLDEN, INV_SQRT2, cosine2_spec
from scipy.optimize import brentq

from delone_diagnostics.errors import SpecError
from delone_diagnostics.generators import (
    CurveSpec,
    LatticeSpec,
    SturmianSpec,
    kronecker_source,
    lattice_source,
    solve_intersections,
    source_from_spec,
    sturmian_source,
    validate_curve,
)
from delone_diagnostics.generators.sturmian import DEFAULT_PHASE
from delone_diagnostics.geometry import Ball
from delone_diagnostics.sources import materialize


def test_lattice_with_motif():
    src = lattice_source(LatticeSpec(basis=[[1.0]], motif=[[0.0], [0.25]]))
    pts = materialize(src, Ball.around_origin(1))
    assert pts.coords.tolist() == [-1.0, -0.75, 0.0, 0.25, 1.0]


def test_square_lattice_ball(square_lattice):
    pts = materialize(square_lattice, Ball.around_origin(1.5, 2))
    assert len(pts) == 9
    assert {tuple(p) for p in pts.points.tolist()} == {
        (i, j) for i in (-1.0, 0.0, 1.0) for j in (-1.0, 0.0, 1.0)
    }


def test_lattice_metadata(integers):
    assert integers.r_min_lower == pytest.approx(0.5)
    assert integers.r_max_upper == pytest.approx(0.5)


def test_lattice_singular_basis():
    with pytest.raises(SpecError, match="singular basis"):
        lattice_source(LatticeSpec(basis=[[1.0, 2.0], [2.0, 4.0]], motif=[[0.0, 0.0]]))


def test_lattice_motif_outside_fundamental_domain():
    with pytest.raises(SpecError, match="fundamental domain"):
        lattice_source(LatticeSpec(basis=[[1.0]], motif=[[1.5]]))


def test_lattice_motif_coinciding():
    with pytest.raises(SpecError, match="coincide"):
        lattice_source(LatticeSpec(basis=[[1.0]], motif=[[0.0], [0.0]]))


def test_sturmian_two_gap_lengths(sturmian):
    s = math.sqrt(1 + GOLDEN**2)
    gaps = np.diff(materialize(sturmian, Ball.around_origin(20)).coords)
    lengths = np.array([GOLDEN / s, 1 / s])
    assert np.all(np.min(np.abs(gaps[:, None] - lengths[None, :]), axis=1) < 1e-9)
    assert np.any(np.abs(gaps - lengths[0]) < 1e-9)
    assert np.any(np.abs(gaps - lengths[1]) < 1e-9)


def test_sturmian_contains_origin_at_default_phase(sturmian):
    assert sturmian.spec.phase == DEFAULT_PHASE
    assert 0.0 in materialize(sturmian, Ball.around_origin(1)).coords


def test_sturmian_rational_slope():
    with pytest.raises(SpecError, match="theta too close to rational"):
        sturmian_source(SturmianSpec(theta=0.5))


def test_sturmian_slope_out_of_range():
    with pytest.raises(SpecError):
        sturmian_source(SturmianSpec(theta=1.5))


def test_sturmian_singular_phase():
    s = math.sqrt(1 + GOLDEN**2)
    src = sturmian_source(SturmianSpec(theta=GOLDEN, phase=-GOLDEN / s))
    with pytest.raises(SpecError, match="singular phase"):
        materialize(src, Ball.around_origin(5))


def test_validate_linear_curve():
    spec = CurveSpec(family="linear", params=(1.0, -1.0), theta=INV_SQRT2)
    report = validate_curve(spec)
    assert report.valid
    assert report.transversal_margin == pytest.approx(1 + INV_SQRT2)
    assert report.endpoint_defect == 0.0
    assert report.injective
    assert report.epsilon_estimate > 0


def test_validate_cosine2_curve():
    report = validate_curve(cosine2_spec())
    assert report.valid
    assert report.transversal_margin == pytest.approx(INV_SQRT2)
    d_lo, d_hi = report.density_bounds
    assert d_lo == pytest.approx(INV_SQRT2)
    assert d_hi == pytest.approx(INV_SQRT2 + math.pi / 2, rel=1e-6)


def test_validate_open_curve():
    spec = CurveSpec(family="linear", params=(0.0, 0.5), theta=INV_SQRT2)
    report = validate_curve(spec)
    assert not report.valid
    assert report.endpoint_defect == pytest.approx(0.5)
    assert report.failing_invariant() == "endpoint_defect=0.5"


def test_validate_tangent_curve():
    spec = CurveSpec(family="polynomial", params=(0.0, 0.0, 1.0), theta=INV_SQRT2)
    report = validate_curve(spec)
    assert not report.valid
    assert report.transversal_margin == 0.0
    assert report.failing_invariant().startswith("transversal_margin")


def test_kronecker_source_rejects_invalid_curve():
    spec = CurveSpec(family="linear", params=(0.0, 0.5), theta=INV_SQRT2)
    with pytest.raises(SpecError, match="endpoint_defect=0.5"):
        kronecker_source(spec)


def test_curve_spec_checks_family_and_params():
    with pytest.raises(SpecError, match="unknown curve family"):
        CurveSpec(family="sine", params=(), theta=INV_SQRT2)
    with pytest.raises(SpecError):
        CurveSpec(family="linear", params=(1.0,), theta=INV_SQRT2)
    with pytest.raises(SpecError, match="theta too close to rational"):
        CurveSpec(family="cosine2", params=(), theta=0.5)


def _lifted_height(t: np.ndarray, spec: CurveSpec) -> np.ndarray:
    """θt − γ lifted to a continuous function of t (phase 0)."""
    jump = float(spec.gamma(1.0) - spec.gamma(0.0))
    cell = np.floor(t)
    return spec.theta * t - (spec.gamma(t - cell) + cell * jump)


def test_solve_intersections_against_sampling():
    spec = cosine2_spec()
    roots = solve_intersections(spec, (-10.0, 10.0))

    grid = np.round(np.arange(-100_000, 100_001) * 1e-4, 12)
    levels = np.floor(_lifted_height(grid, spec))
    crossings = np.flatnonzero(np.diff(levels) != 0)
    expected = []
    for i in crossings:
        q = levels[i + 1]
        lo, hi = grid[i], grid[i + 1]
        root = brentq(lambda t: _lifted_height(t, spec) - q, lo, hi, xtol=1e-14)
        expected.append(root)
    expected = np.array(expected)

    d_lo, d_hi = validate_curve(spec).density_bounds
    assert math.floor(20 * d_lo) <= roots.size <= math.ceil(20 * d_hi)
    assert roots.size == expected.size
    assert np.allclose(roots, expected, atol=1e-9, rtol=0)


def test_solve_intersections_degenerate_interval():
    spec = cosine2_spec()
    assert solve_intersections(spec, (0.0, 0.0)).tolist() == [0.0]
    assert solve_intersections(spec, (0.3, 0.3)).size == 0


def test_linear_curve_is_completely_periodic(linear_curve):
    pts = materialize(linear_curve, Ball.around_origin(50))
    k = np.round(pts.coords * math.sqrt(2))
    assert np.allclose(pts.coords, k / math.sqrt(2), atol=1e-9)
    assert np.array_equal(k, np.arange(k[0], k[-1] + 1))


def test_polynomial_family_matches_linear(linear_curve):
    spec = CurveSpec(family="polynomial", params=(1.0, -1.0), theta=math.sqrt(2) - 1)
    window = Ball.around_origin(20)
    poly = materialize(kronecker_source(spec), window)
    linear = materialize(linear_curve, window)
    assert np.allclose(poly.coords, linear.coords, atol=1e-10)


def test_phase_shift_by_integers_is_invisible():
    window = Ball.around_origin(50)
    x, y = 3 / 2**20, 77 / 2**20
    base = materialize(kronecker_source(cosine2_spec((x, y))), window)
    shifted = materialize(kronecker_source(cosine2_spec((x + 1, y + 1))), window)
    assert np.array_equal(base.points, shifted.points)


def test_source_from_spec_dispatch():
    src = source_from_spec(SturmianSpec(theta=GOLDEN))
    assert src.dim == 1
    with pytest.raises(SpecError):
        source_from_spec({"type": "lattice"})
