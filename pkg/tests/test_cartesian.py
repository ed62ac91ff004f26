# -*- coding: utf-8 -*-
"""
Test cho join, slice, cạnh p-Cartesian và đánh dấu tự nhiên.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.cartesian.cartesian_edges import (
    cartesian_edges,
    cartesian_edges_first_column,
    comparison_map,
    is_cartesian_fibration,
    is_p_cartesian,
    join,
    natural_marking,
    slice_object,
)
from core.category.finite_category import chaotic, nerve, poset
from core.lifting.lifting import to_point
from core.presheaf.shape import IndexShape
from core.standard.objects import spine, standard_simplex, vertex_map
from core.types.errors import (
    BoundExceededError,
    IllegalSpecError,
    NotCartesianFibrationError,
    ShapeMismatchError,
)

BOUND = 4


def test_join_of_points_is_interval():
    j = join(standard_simplex(0, 2), standard_simplex(0, 2))
    assert j.counts() == standard_simplex(1, 2).counts()
    assert j.dimension == (1,)


def test_slice_over_last_vertex():
    sl = slice_object(standard_simplex(2, BOUND), (2,), bound=2)
    assert sl.presheaf.nondegenerate_counts() == {(0,): 3, (1,): 3, (2,): 1}
    assert sl.presheaf.cosk == 2


def test_slice_rejects_bad_input():
    with pytest.raises(IllegalSpecError):
        slice_object(standard_simplex(2, BOUND), (2,), k=2)
    with pytest.raises(IllegalSpecError):
        slice_object(standard_simplex(2, BOUND), (1, 0), k=1)
    with pytest.raises(BoundExceededError):
        comparison_map(to_point(standard_simplex(1, 1)), (0, 1))


def test_cartesian_edges_over_point():
    p = to_point(nerve(poset(1), BOUND))
    found, flags = cartesian_edges(p)
    # trên điểm, cạnh Cartesian đúng là các tương đương
    assert found == frozenset({("0->0",), ("1->1",)})
    assert "some-edges-inconclusive" not in flags
    report = is_p_cartesian(p, ("0->1",))
    assert report.fails
    assert report.witness["edge"] == ("0->1",)


def test_groupoid_edges_are_all_cartesian():
    p = to_point(nerve(chaotic(1), BOUND))
    assert len(cartesian_edges(p)[0]) == 4


def test_is_cartesian_fibration_over_point():
    assert is_cartesian_fibration(to_point(nerve(poset(1), BOUND))).holds


def test_natural_marking():
    marked = natural_marking(to_point(nerve(chaotic(1), BOUND)))
    assert marked.source.shape is IndexShape.MARKED_SIMPLEX
    assert len(marked.source.markings((1,))) == 4
    assert marked.target.markings((1,)) == frozenset({"*"})
    with pytest.raises(NotCartesianFibrationError):
        natural_marking(to_point(spine(2, BOUND)))


def test_first_column_needs_bisimplicial_map():
    with pytest.raises(ShapeMismatchError):
        cartesian_edges_first_column(to_point(standard_simplex(1, 2)))


def test_upper_vertex_is_not_cartesian_fibration():
    # cạnh (0, 1) kết thúc tại ảnh của điểm nhưng không có nâng nào
    report = is_cartesian_fibration(vertex_map(standard_simplex(0, BOUND), standard_simplex(1, BOUND), 1))
    assert report.fails
    assert report.witness["edge"] == (0, 1)
    assert report.witness["lifts"] == []
