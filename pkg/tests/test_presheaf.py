# -*- coding: utf-8 -*-
"""
Test cho presheaf cắt cụt: ô, ánh xạ, phép dựng sơ cấp và định dạng JSON.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.hom.hom_engine import is_isomorphic
from core.lifting.lifting import to_point
from core.marked.marked_objects import flat, sharp
from core.presheaf.ops import (
    column,
    coproduct,
    generated_subpresheaf,
    is_separated,
    product,
    prolong_first,
    prolong_second,
    pullback,
    pushout,
    require_constant,
    row,
    subpresheaf,
    truncate,
)
from core.presheaf.presheaf import PresheafMap, describe
from core.presheaf.serialize import presheaf_from_json, presheaf_to_json, load_presheaf, save_presheaf
from core.presheaf.shape import IndexShape, normalize_bound
from core.standard.objects import spine, standard_simplex, vertex_map
from core.types.errors import (
    BoundExceededError,
    InvalidMapError,
    InvalidPresheafError,
    NotConstantError,
    ShapeMismatchError,
)


def test_simplex_counts():
    x = standard_simplex(1, 2)
    assert x.counts() == {(0,): 2, (1,): 3, (2,): 4}
    assert x.nondegenerate_counts() == {(0,): 2, (1,): 1, (2,): 0}
    assert x.degenerate_edges() == frozenset({(0, 0), (1, 1)})
    assert x.face((1,), 0, 0, (0, 1)) == (1,)
    x.validate()


def test_normalize_bound():
    assert normalize_bound(IndexShape.BISIMPLEX, 2) == (2, 2)
    assert normalize_bound(IndexShape.SIMPLEX, (3,)) == (3,)
    with pytest.raises(ValueError):
        normalize_bound(IndexShape.SIMPLEX, (1, 2))


def test_index_shape_parse():
    assert IndexShape.parse("bisimplex") is IndexShape.BISIMPLEX
    assert IndexShape.MARKED_BISIMPLEX.directions == 2
    assert IndexShape.MARKED_SIMPLEX.unmarked is IndexShape.SIMPLEX
    with pytest.raises(ValueError):
        IndexShape.parse("cubical")


def test_product_of_intervals():
    square = product(standard_simplex(1, 2), standard_simplex(1, 2))
    assert square.count((0,)) == 4
    assert square.count((1,)) == 9
    assert square.nondegenerate_counts()[(1,)] == 5
    assert square.nondegenerate_counts()[(2,)] == 2
    square.validate()


def test_product_with_mismatched_shapes():
    with pytest.raises(ShapeMismatchError):
        product(standard_simplex(1, 2), prolong_first(standard_simplex(1, 2), 2))


def test_coproduct_and_pushout():
    points = coproduct([standard_simplex(0, 2), standard_simplex(0, 2)])
    assert points.count((0,)) == 2
    assert points.count((2,)) == 2
    point, left, right = standard_simplex(0, 2), standard_simplex(1, 2), standard_simplex(1, 2)
    glued = pushout(vertex_map(point, left, 1), vertex_map(point, right, 0))
    assert glued.counts() == spine(2, 2).counts()
    assert is_isomorphic(glued, spine(2, 2))


def test_pullback_over_point_is_product():
    a, b = standard_simplex(1, 2), standard_simplex(1, 2)
    p, pa, pb = pullback(to_point(a), to_point(b))
    assert p.counts() == product(a, b).counts()
    pa.validate()
    pb.validate()


def test_truncate():
    x = truncate(standard_simplex(2, 3), 1)
    assert x.bound == (1,)
    assert x.counts() == {(0,): 3, (1,): 6}
    with pytest.raises(BoundExceededError):
        truncate(standard_simplex(2, 1), 2)


def test_generated_subpresheaf():
    x = generated_subpresheaf(standard_simplex(2, 2), {(1,): [(0, 2)]})
    assert x.nondegenerate_counts() == {(0,): 2, (1,): 1, (2,): 0}
    assert x.dimension == (1,)
    with pytest.raises(InvalidPresheafError):
        generated_subpresheaf(standard_simplex(1, 2), {(1,): [(1, 0)]})


def test_subpresheaf_must_be_closed():
    with pytest.raises(InvalidPresheafError):
        subpresheaf(standard_simplex(1, 2), lambda level, c: level != (0,))


def test_prolongations_rows_and_columns():
    s = standard_simplex(1, 2)
    first = prolong_first(s, 2)
    assert first.count((1, 2)) == 3
    assert row(first, 1).counts() == {(0,): 3, (1,): 3, (2,): 3}
    assert column(first, 0).counts() == s.counts()
    second = prolong_second(s, 2)
    assert second.count((2, 1)) == 3
    require_constant(second, 0)
    with pytest.raises(NotConstantError):
        require_constant(first, 0)
    with pytest.raises(ShapeMismatchError):
        prolong_first(first, 2)
    with pytest.raises(BoundExceededError):
        row(first, 3)


def test_map_validation():
    x = standard_simplex(1, 2)
    PresheafMap.identity(x).validate()
    comps = {level: {c: c for c in x.cells(level)} for level in x.levels()}
    comps[(0,)][(0,)] = (1,)
    with pytest.raises(InvalidMapError):
        PresheafMap(x, x, comps, validate=True)
    with pytest.raises(ShapeMismatchError):
        PresheafMap(x, prolong_first(x, 1), {})


def test_marked_maps_preserve_markings():
    x = standard_simplex(1, 2)
    comps = {level: {c: c for c in x.cells(level)} for level in x.levels()}
    PresheafMap(flat(x), sharp(x), comps, validate=True)
    with pytest.raises(InvalidMapError):
        PresheafMap(sharp(x), flat(x), comps, validate=True)


def test_separatedness():
    assert is_separated(flat(standard_simplex(2, 2))).holds
    assert is_separated(sharp(standard_simplex(2, 2))).holds
    assert is_separated(standard_simplex(1, 1)).holds


def test_json_round_trip_is_byte_identical(tmp_path):
    for x in (standard_simplex(1, 2), sharp(spine(2, 2)), prolong_first(standard_simplex(1, 1), 1)):
        text = presheaf_to_json(x)
        back = presheaf_from_json(text)
        assert back.counts() == x.counts()
        assert back.markings() == x.markings()
        assert presheaf_to_json(back) == text
    path = tmp_path / "x.json"
    save_presheaf(sharp(standard_simplex(1, 2)), path)
    assert load_presheaf(path).markings((1,)) == frozenset({(0, 0), (0, 1), (1, 1)})


def test_malformed_json_is_rejected():
    with pytest.raises(InvalidPresheafError):
        presheaf_from_json('{"shape": "Simplex", "levels": {}}')


def test_describe():
    info = describe(sharp(standard_simplex(1, 2)))
    assert info["shape"] == "MarkedSimplex"
