import numpy as np
import pytest

from delone_diagnostics.almostperiod import (
    CONSISTENT,
    INCONCLUSIVE,
    BumpSpec,
    bohr_diagnostic,
    default_ladder,
    delone_distance,
    eps_almost_periods,
    find_bijection,
    return_vectors,
    uap_diagnostic,
)
from delone_diagnostics.errors import (
    DimensionError,
    InputError,
    NotAlmostPeriodError,
    ScaleError,
)
from delone_diagnostics.geometry import Ball, nearest_distances
from delone_diagnostics.sources import delone_check, materialize, translate


def _is_symmetric(coords: np.ndarray) -> bool:
    return set(coords.tolist()) == set((-coords).tolist())


def _contains_all(big: np.ndarray, small: np.ndarray, tol: float = 1e-9) -> bool:
    return small.size == 0 or bool(np.all(nearest_distances(big, small) <= tol))


def test_delone_distance_identical(integers):
    assert delone_distance(integers, integers, 100) == 0.0


def test_delone_distance_half_shift(integers, half_integers):
    distance = delone_distance(integers, half_integers, 100)
    assert distance == pytest.approx(0.5, abs=1e-5)


def test_delone_distance_translate_by_period(linear_curve):
    period = 1 / np.sqrt(2)
    assert delone_distance(linear_curve, translate(linear_curve, period), 50) == 0.0


def test_delone_distance_is_symmetric(sturmian):
    shift = materialize(sturmian, Ball.around_origin(3)).coords[-1]
    other = translate(sturmian, shift)
    assert delone_distance(sturmian, other, 30) == delone_distance(other, sturmian, 30)


def test_delone_distance_checks_inputs(integers, square_lattice):
    with pytest.raises(InputError, match="r_cap"):
        delone_distance(integers, integers, 0.5)
    with pytest.raises(DimensionError):
        delone_distance(integers, square_lattice, 10)


def test_return_vectors_integers(integers):
    report = return_vectors(integers, 10, Ball.around_origin(50))
    assert _contains_all(report.vectors.coords, np.arange(-50.0, 51.0))
    assert 0.0 in report.vectors.coords
    assert report.max_gap <= 1.0


@pytest.mark.parametrize("source", ["integers", "sturmian", "cosine2"])
def test_return_vectors_lie_near_the_set(source, request):
    src = request.getfixturevalue(source)
    r = 10
    window = Ball.around_origin(40)
    vectors = return_vectors(src, r, window).vectors.coords
    pts = materialize(src, window.grown(1)).coords
    assert np.all(nearest_distances(pts, vectors) <= 1 / r)


def test_return_vectors_need_origin(half_integers):
    with pytest.raises(InputError, match="normalize"):
        return_vectors(half_integers, 5, Ball.around_origin(10))


def test_return_vectors_thin_out_with_r(sturmian):
    window = Ball.around_origin(150)
    counts = [len(return_vectors(sturmian, r, window).vectors) for r in (5, 20)]
    assert counts[1] < counts[0]


def test_eps_almost_periods_integers(integers):
    report = eps_almost_periods(integers, 0.1, Ball.around_origin(50))
    periods = report.periods.coords
    assert _contains_all(periods, np.arange(-50.0, 51.0))
    assert 0.0 in periods
    assert _is_symmetric(periods)
    assert report.max_gap <= 1.0
    assert report.relatively_dense_at_scale


def test_eps_almost_periods_identity_is_only_zero(integers):
    epsilon = 0.1
    periods = eps_almost_periods(integers, epsilon, Ball.around_origin(10)).periods
    near_zero = periods.coords[np.abs(periods.coords) <= epsilon]
    assert near_zero.tolist() == [0.0]
    assert 1.0 in periods.coords


def test_eps_almost_periods_off_center_window(integers):
    window = Ball(np.array([5.0]), 3.0)
    periods = eps_almost_periods(integers, 0.1, window).periods.coords
    assert np.all(window.contains(periods.reshape(-1, 1)))
    assert _contains_all(periods, np.arange(2.0, 9.0))
    assert 0.0 not in periods


def test_eps_almost_periods_epsilon_too_coarse(integers):
    with pytest.raises(InputError, match="epsilon too coarse for unique matching"):
        eps_almost_periods(integers, 0.4, Ball.around_origin(10))


def test_eps_almost_periods_sturmian_small_window(sturmian):
    r_min = delone_check(sturmian, Ball.around_origin(100)).r_min
    report = eps_almost_periods(sturmian, 0.05 * r_min, Ball.around_origin(60))
    assert _is_symmetric(report.periods.coords)
    assert 0.0 in report.periods.coords


def test_eps_almost_periods_nest(cosine2):
    window = Ball.around_origin(40)
    fine = eps_almost_periods(cosine2, 0.02, window, pitch=0.005).periods.coords
    coarse = eps_almost_periods(cosine2, 0.05, window, pitch=0.005).periods.coords
    assert fine.size <= coarse.size
    assert _contains_all(coarse, fine)


def test_every_almost_period_has_a_witness(cosine2):
    epsilon = 0.05
    report = eps_almost_periods(cosine2, epsilon, Ball.around_origin(40))
    periods = report.periods.coords
    for a in periods[np.linspace(0, periods.size - 1, 12).astype(int)]:
        witness = find_bijection(cosine2, a, epsilon, report.check_window)
        assert witness.max_displacement <= epsilon
        targets = witness.pairs[:, 1]
        assert np.unique(targets).size == targets.size
        assert np.all(np.abs(targets - (witness.pairs[:, 0] + a)) <= epsilon)


def test_find_bijection_integers(integers):
    witness = find_bijection(integers, 1, 0.1, Ball.around_origin(50))
    assert witness.max_displacement == 0.0
    assert np.array_equal(witness.pairs[:, 1], witness.pairs[:, 0] + 1)


def test_find_bijection_sturmian_fails(sturmian):
    window = Ball.around_origin(100)
    r_min = delone_check(sturmian, window).r_min
    pts = materialize(sturmian, window).coords
    a = pts[pts > 0][0]
    with pytest.raises(NotAlmostPeriodError, match="not an ε-almost period") as e:
        find_bijection(sturmian, a, 0.05 * r_min, window)
    assert np.min(np.abs(pts - e.value.x)) < 1e-9


def test_bump_spec():
    phi = BumpSpec(half_width=0.4, height=2.0)
    assert phi.lipschitz == pytest.approx(5.0)
    assert phi(0.0) == pytest.approx(2.0)
    assert phi(0.4) == pytest.approx(0.0)
    assert phi(-0.2) == pytest.approx(1.0)
    with pytest.raises(InputError):
        BumpSpec(half_width=0.4, shape="gaussian")


def test_bohr_diagnostic_integers(integers):
    report = bohr_diagnostic(
        integers, BumpSpec(half_width=0.4), 0.01, 0.01, Ball.around_origin(50)
    )
    assert _contains_all(report.periods.coords, np.arange(-50.0, 51.0))
    assert _is_symmetric(np.round(report.periods.coords, 9))


def test_bohr_diagnostic_pitch_too_coarse(integers):
    with pytest.raises(ScaleError):
        bohr_diagnostic(
            integers, BumpSpec(half_width=0.4), 0.01, 0.05, Ball.around_origin(10)
        )


def test_bohr_diagnostic_follows_geometric_periods(cosine2):
    """A geometric ε-period moves f by at most 2Lε, plus the grid pitch."""
    phi = BumpSpec(half_width=0.2)
    pitch = 0.01
    epsilon = 0.02
    window = Ball.around_origin(20)
    geometric = eps_almost_periods(cosine2, epsilon, window, check_radius=61)
    functional = bohr_diagnostic(
        cosine2, phi, phi.lipschitz * (2 * epsilon + pitch), pitch, window
    )
    assert np.all(
        nearest_distances(functional.periods.coords, geometric.periods.coords)
        <= pitch / 2 + 1e-9
    )


def test_default_ladder():
    assert default_ladder(0.5) == pytest.approx([0.2, 0.1, 0.05])


def test_uap_diagnostic_integers(integers):
    windows = [Ball.around_origin(25), Ball.around_origin(50)]
    verdict = uap_diagnostic(integers, windows=windows)
    assert verdict.verdict == CONSISTENT
    assert len(verdict.steps) == 3
    assert not verdict.skipped
    assert all(step.witnesses and not step.failures for step in verdict.steps)


def test_uap_diagnostic_skips_coarse_epsilon(integers):
    windows = [Ball.around_origin(10), Ball.around_origin(20)]
    verdict = uap_diagnostic(integers, ladder=[0.4, 0.1], windows=windows)
    assert verdict.skipped == [0.4]
    assert [step.epsilon for step in verdict.steps] == [0.1]

    verdict = uap_diagnostic(integers, ladder=[0.4], windows=windows)
    assert verdict.verdict == INCONCLUSIVE


def test_uap_diagnostic_needs_a_ladder(integers):
    with pytest.raises(InputError):
        uap_diagnostic(integers, ladder=[])
