import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phimax.errors import DimensionError
from phimax.geometry import (
    PointSet,
    canonicalize,
    directed_distance,
    distance,
    hausdorff,
    points_from_csv,
    within_expansion,
)

coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
point_lists = st.lists(st.tuples(coords, coords), min_size=1, max_size=12)


def brute_hausdorff(a, b):
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def test_distance_examples():
    assert distance([0], [1]) == 1
    assert distance([0, 0], [3, 4]) == 5
    assert distance([0.3, -2.0], [0.3, -2.0]) == 0


def test_distance_dimension_mismatch():
    with pytest.raises(DimensionError):
        distance([0], [0, 1])


def test_directed_distance_examples():
    assert directed_distance(PointSet([0, 1]), PointSet([0])) == 1
    assert directed_distance(PointSet([0]), PointSet([0, 1])) == 0
    a = PointSet([0, 2 / 3])
    b = PointSet([0, 2 / 9, 2 / 3, 8 / 9])
    assert directed_distance(a, b) == 0


def test_hausdorff_examples():
    assert hausdorff(PointSet([0]), PointSet([1])) == 1
    a = PointSet([0, 2 / 3])
    assert hausdorff(a, a) == 0
    b = PointSet([0, 2 / 9, 2 / 3, 8 / 9])
    # oracle: 8/9 is 2/9 away from 2/3, every other point of b is closer
    assert hausdorff(a, b) == pytest.approx(2 / 9, abs=1e-15)


def test_within_expansion_examples():
    assert within_expansion(PointSet([0]), PointSet([0.5]), 1)
    assert not within_expansion(PointSet([0]), PointSet([2]), 1)
    assert within_expansion(PointSet([0, 2 / 3]), PointSet([0, 2 / 9, 2 / 3, 8 / 9]), 0.01)


def test_within_expansion_is_strict():
    assert not within_expansion(PointSet([0]), PointSet([1]), 1)


@pytest.mark.parametrize("eps", [0, -1])
def test_within_expansion_rejects_nonpositive(eps):
    with pytest.raises(ValueError):
        within_expansion(PointSet([0]), PointSet([0]), eps)


def test_empty_and_nonfinite_sets_rejected():
    with pytest.raises(ValueError):
        PointSet(np.empty((0, 2)))
    with pytest.raises(ValueError):
        PointSet([[0.0, np.nan]])


def test_dimension_mismatch_between_sets():
    with pytest.raises(DimensionError):
        hausdorff(PointSet([[0.0]]), PointSet([[0.0, 0.0]]))


def test_canonical_order_and_snap():
    s = PointSet([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0 + 1e-12], [0.0, 0.5]])
    assert s.points.tolist() == [[0.0, 0.5], [0.0, 1.0], [1.0, 0.0]]


def test_snap_keeps_lexicographically_smallest():
    pts = canonicalize(np.array([[0.3 + 5e-10], [0.3], [0.3 - 5e-10]]), 1e-9)
    assert pts.tolist() == [[0.3 - 5e-10]]


def test_snap_result_is_separated(rng):
    pts = rng.random((5000, 2)) * 1e-6
    kept = canonicalize(pts, 1e-8)
    d = np.sqrt(((kept[:, None] - kept[None]) ** 2).sum(axis=2))
    np.fill_diagonal(d, np.inf)
    assert d.min() > 1e-8
    # every input point is represented within the snap
    near = np.sqrt(((pts[:, None] - kept[None]) ** 2).sum(axis=2)).min(axis=1)
    assert near.max() <= 1e-8


def test_directed_zero_iff_within_snap():
    a = PointSet([0.0, 0.5])
    assert directed_distance(a, PointSet([0.0, 0.5, 1.0])) == 0
    assert directed_distance(a, PointSet([0.0, 0.5 + 1e-6])) > 0


def test_kdtree_path_matches_brute_force(rng):
    a = rng.random((3000, 2))
    b = rng.random((2500, 2))
    sa, sb = PointSet(a), PointSet(b)
    assert abs(hausdorff(sa, sb) - brute_hausdorff(sa.points, sb.points)) <= 1e-12


def test_csv_round_trip(rng):
    s = PointSet(rng.random((50, 3)))
    text = s.to_csv()
    assert PointSet.from_csv(text) == s
    assert PointSet.from_csv(text).to_csv() == text


def test_csv_skips_comments_and_blank_lines():
    pts = points_from_csv("# header\n0.5,1\n\n0.25,2\n")
    assert pts.tolist() == [[0.5, 1.0], [0.25, 2.0]]


def test_csv_ragged_rows_rejected():
    with pytest.raises(DimensionError):
        points_from_csv("0,1\n2\n")


@settings(max_examples=60, deadline=None)
@given(point_lists, point_lists)
def test_hausdorff_symmetric_and_matches_brute_force(a, b):
    sa, sb = PointSet(a), PointSet(b)
    h = hausdorff(sa, sb)
    assert h == hausdorff(sb, sa)
    assert abs(h - brute_hausdorff(sa.points, sb.points)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(point_lists, point_lists, point_lists)
def test_hausdorff_triangle(a, b, c):
    sa, sb, sc = PointSet(a), PointSet(b), PointSet(c)
    assert hausdorff(sa, sc) <= hausdorff(sa, sb) + hausdorff(sb, sc) + 1e-12


@settings(max_examples=60, deadline=None)
@given(point_lists, point_lists, st.floats(0.01, 1.0))
def test_hausdorff_below_eps_iff_mutual_expansion(a, b, frac):
    sa, sb = PointSet(a), PointSet(b)
    h = hausdorff(sa, sb)
    above = h + frac
    assert within_expansion(sa, sb, above) and within_expansion(sb, sa, above)
    if h > 0:
        below = h * (1 - frac / 2)
        assert not (within_expansion(sa, sb, below) and within_expansion(sb, sa, below))
