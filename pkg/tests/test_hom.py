# -*- coding: utf-8 -*-
"""
Test cho liệt kê Hom, cờ chính xác, không gian ánh xạ và đối tượng khớp.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.hom.hom_engine import (
    count_hom,
    dependency_order,
    enumerate_hom,
    find_isomorphism,
    is_coskeletal,
    is_isomorphic,
    mapping_space,
    matching_object,
    relative_matching_map,
)
from core.marked.marked_objects import flat, sharp
from core.bisimplicial.checkers import point_map
from core.presheaf.ops import inclusion, product, prolong_first
from core.presheaf.presheaf import shift
from core.standard.objects import boundary, groupoid_nerve, spine, standard_simplex
from core.types.errors import BoundExceededError, ShapeMismatchError


def test_hom_between_simplices():
    hs = enumerate_hom(standard_simplex(1, 2), standard_simplex(1, 2))
    assert len(hs) == 3
    assert hs.exactness == "exact"
    assert hs.exact
    hs.validate_all()


def test_hom_from_spine():
    # cặp cạnh nối tiếp a <= b <= c trong [2]
    assert count_hom(spine(2, 2), standard_simplex(2, 2)) == 10


def test_exactness_by_coskeletality():
    hs = enumerate_hom(groupoid_nerve(1, 2), standard_simplex(1, 2))
    # J[1] chỉ đi vào Δ[1] qua ánh xạ hằng
    assert len(hs) == 2
    assert hs.exactness == "exact-by-coskeletality-1"


def test_bounded_exactness():
    hs = enumerate_hom(groupoid_nerve(1, 1), standard_simplex(2, 1))
    assert hs.exactness.startswith("bounded-at-")
    assert not hs.exact


def test_parallel_enumeration_matches_sequential():
    x, y = spine(2, 2), standard_simplex(2, 2)
    assert enumerate_hom(x, y, workers=3).keys() == enumerate_hom(x, y).keys()


def test_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        enumerate_hom(standard_simplex(1, 2), prolong_first(standard_simplex(1, 2), 2))
    with pytest.raises(ShapeMismatchError):
        enumerate_hom(flat(standard_simplex(1, 2)), standard_simplex(1, 2))


def test_isomorphism():
    assert is_isomorphic(standard_simplex(1, 2), standard_simplex(1, 2))
    assert not is_isomorphic(standard_simplex(1, 2), groupoid_nerve(1, 2))
    assert find_isomorphism(standard_simplex(1, 2), standard_simplex(1, 3)) is None
    assert not is_isomorphic(flat(standard_simplex(1, 2)), sharp(standard_simplex(1, 2)))


def test_mapping_space_of_point():
    space = mapping_space(standard_simplex(0, 2), standard_simplex(1, 2), n_max=1)
    assert space.counts() == {(0,): 2, (1,): 3}
    assert space.exact
    space.presheaf.validate()


def test_marked_mapping_space():
    space = mapping_space(flat(standard_simplex(1, 2)), sharp(standard_simplex(1, 2)), n_max=1)
    assert space.counts()[(0,)] == 3


def test_matching_object():
    x = prolong_first(standard_simplex(1, 2), 2)
    m = matching_object(x, 2)
    # ánh xạ đơn điệu ∂Δ[2] -> Δ[1]
    assert m.presheaf.count((0,)) == 4
    m.matching_map.validate()
    with pytest.raises(BoundExceededError):
        matching_object(x, 3)
    with pytest.raises(ShapeMismatchError):
        matching_object(standard_simplex(1, 2), 1)


def test_is_coskeletal():
    assert is_coskeletal(standard_simplex(1, 3), 1).holds
    report = is_coskeletal(boundary(2, 3), 1)
    assert report.fails
    assert report.witness is not None
    assert is_coskeletal(standard_simplex(1, 1), 1).inconclusive


def test_dependency_order_assigns_faces_first():
    x = product(standard_simplex(1, 2), standard_simplex(1, 2))
    slots = dependency_order(x)
    assert len(slots) == sum(x.count(level) for level in x.levels())
    seen = set()
    for level, cell, source in slots:
        if source is None:
            for d, i in x.face_keys(level):
                assert (shift(level, d, -1), x.face(level, d, i, cell)) in seen
        else:
            assert (shift(level, source[0], -1), source[2]) in seen
        seen.add((level, cell))


def test_dependency_order_closes_edges_before_new_vertex():
    order = [(level, cell) for level, cell, _ in dependency_order(standard_simplex(2, 2))]
    assert order[0] == ((0,), (0,))
    assert order.index(((1,), (0, 1))) < order.index(((0,), (2,)))


def test_relative_matching_map_of_identity_is_bijective():
    y = prolong_first(standard_simplex(1, 2), 2)
    rel = relative_matching_map(inclusion(y, y), 1)
    rel.matching_map.validate()
    for level in rel.matching_map.source.levels():
        images = [rel.matching_map(level, u) for u in rel.matching_map.source.cells(level)]
        assert len(set(images)) == len(images) == rel.fiber_product.count(level)


def test_relative_matching_map_over_point():
    y = prolong_first(standard_simplex(1, 2), 2)
    rel = relative_matching_map(point_map(y), 1)
    assert rel.n == 1
    # M_1 trên điểm là Y_0 × Y_0: bốn cặp đỉnh, chỉ ba cặp là biên của một cạnh
    assert rel.fiber_product.count((0,)) == 4
    assert len({rel.matching_map((0,), u) for u in rel.matching_map.source.cells((0,))}) == 3
    with pytest.raises(BoundExceededError):
        relative_matching_map(point_map(y), 3)
