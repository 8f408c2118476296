import itertools

import numpy as np
import pytest

from delone_diagnostics.almostperiod import delone_distance
from delone_diagnostics.dynamics import (
    find_separating_anchor,
    hull_transversal_sample,
    patch_forcing_probe,
    proximality_probe,
    separation_radius,
)
from delone_diagnostics.errors import InputError
from delone_diagnostics.geometry import Ball, FinitePointSet
from delone_diagnostics.sources import (
    FiniteSource,
    materialize,
    patch_array,
    patch_arrays_equivalent,
    translate,
)


def _integers_with_extra_point() -> FiniteSource:
    coords = np.append(np.arange(-60.0, 61.0), 0.5)
    pts = FinitePointSet.from_coords(coords)
    return FiniteSource(pts, extent=Ball.around_origin(60), label="Z+{0.5}")


def test_hull_sample_integers(integers):
    sample = hull_transversal_sample(integers, Ball.around_origin(10), 5)
    assert sample.offsets[:, 0].tolist() == [0.0, -1.0, 1.0, -2.0, 2.0]
    assert len(sample) == 5


def test_hull_sample_translates_contain_origin(sturmian):
    sample = hull_transversal_sample(sturmian, Ball.around_origin(50), 20)
    translates = sample.translates()
    assert len(translates) == 20
    for e in translates:
        assert 0.0 in materialize(e, Ball.around_origin(0.5)).coords


def test_hull_sample_cosine2_translates_distinct(cosine2):
    sample = hull_transversal_sample(cosine2, Ball.around_origin(50), 6)
    translates = sample.translates()
    for e1, e2 in itertools.combinations(translates, 2):
        assert delone_distance(e1, e2, 20) > 0


def test_hull_sample_too_many(integers):
    with pytest.raises(InputError):
        hull_transversal_sample(integers, Ball.around_origin(2), 6)


def test_proximality_half_shift(integers, half_integers):
    report = proximality_probe(integers, half_integers, Ball.around_origin(100), 5)
    assert report.inf_estimate == pytest.approx(0.5, abs=1e-12)
    assert -100 <= report.argmin_t <= 100


def test_proximality_of_a_set_with_itself(sturmian):
    report = proximality_probe(sturmian, sturmian, Ball.around_origin(20), 5)
    assert report.inf_estimate == 0.0
    assert report.argmin_t == -20.0


def test_proximality_is_symmetric(sturmian):
    shift = materialize(sturmian, Ball.around_origin(2)).coords[-1]
    other = translate(sturmian, shift)
    window = Ball.around_origin(30)
    forward = proximality_probe(sturmian, other, window, 5)
    backward = proximality_probe(other, sturmian, window, 5)
    assert forward.inf_estimate == pytest.approx(backward.inf_estimate, abs=1e-12)


def test_proximality_warns_without_origin(integers, half_integers, caplog):
    proximality_probe(integers, half_integers, Ball.around_origin(5), 2)
    assert "does not contain 0" in caplog.text


@pytest.mark.parametrize(
    "R, f, expected", [(1.0, 0, 3.0), (1.0, 1, 4.0), (0.5, 0, 2.0), (2.0, 4, 7.0)]
)
def test_separation_radius(R, f, expected):
    assert separation_radius(R, f) == expected


def test_separation_radius_is_monotone():
    assert separation_radius(1.5) > separation_radius(1.0)
    assert separation_radius(1.0, 2) > separation_radius(1.0, 1)
    with pytest.raises(InputError):
        separation_radius(0.0)
    with pytest.raises(InputError):
        separation_radius(1.0, -1)


def test_separating_anchor_at_extra_point(integers):
    extra = _integers_with_extra_point()
    report = find_separating_anchor(extra, integers, 3.0, Ball.around_origin(50))
    assert report.found
    assert report.anchor == 0.0
    assert report.examined == 1


def test_separating_anchor_patches_differ(sturmian):
    sample = hull_transversal_sample(sturmian, Ball.around_origin(20), 4)
    e1, e2 = sample.translates()[1:3]
    C = separation_radius(sturmian.r_max_upper)
    report = find_separating_anchor(e1, e2, C, Ball.around_origin(200))
    assert report.found
    v = np.array([report.anchor])
    reach = Ball.around_origin(200 + C + 1)
    p1 = patch_array(materialize(e1, reach).points, v, C)
    p2 = patch_array(materialize(e2, reach).points, v, C)
    assert not patch_arrays_equivalent(p1, p2, 1e-9)


def test_separating_anchor_equal_sets(integers):
    with pytest.raises(InputError, match="sets not distinct at this scale"):
        find_separating_anchor(integers, integers, 3.0, Ball.around_origin(20))


def test_separating_anchor_needs_origin(integers, half_integers):
    with pytest.raises(InputError, match="must contain 0"):
        find_separating_anchor(integers, half_integers, 3.0, Ball.around_origin(20))


def test_forcing_integers(integers):
    sample = hull_transversal_sample(integers, Ball.around_origin(10), 5)
    report = patch_forcing_probe(integers, 0.0, 2.0, 10.0, sample)
    assert report.forced
    assert report.counterexample is None
    assert report.matches == 5


def test_forcing_linear_curve(linear_curve):
    sample = hull_transversal_sample(linear_curve, Ball.around_origin(50), 50)
    report = patch_forcing_probe(linear_curve, 0.0, 2.0, 20.0, sample)
    assert report.forced
    assert report.matches == 50


def test_forcing_patch_not_in_sample(integers, sturmian):
    sample = hull_transversal_sample(integers, Ball.around_origin(10), 5)
    with pytest.raises(InputError, match="patch not found in sample"):
        patch_forcing_probe(sturmian, 0.0, 2.0, 10.0, sample)


def test_forcing_extension_must_exceed_r(integers):
    sample = hull_transversal_sample(integers, Ball.around_origin(10), 5)
    with pytest.raises(InputError, match="must exceed"):
        patch_forcing_probe(integers, 0.0, 2.0, 2.0, sample)
