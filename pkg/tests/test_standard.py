# -*- coding: utf-8 -*-
"""
Test cho các đối tượng chuẩn và bao hàm chuẩn.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.presheaf.shape import PLUS, IndexShape
from core.standard.objects import (
    StandardKind,
    StandardObjectSpec,
    boundary,
    build,
    canonical_inclusion,
    groupoid_nerve,
    horn,
    obj_spec,
    spine,
    standard_simplex,
)
from core.types.errors import IllegalSpecError


def test_simplex_levels_are_monotone_tuples():
    x = standard_simplex(2, 2)
    assert x.counts() == {(0,): 3, (1,): 6, (2,): 10}
    assert x.nondegenerate_counts() == {(0,): 3, (1,): 3, (2,): 1}
    assert x.cosk == 2
    x.validate()


def test_boundary_horn_and_spine():
    assert boundary(2, 2).nondegenerate_counts() == {(0,): 3, (1,): 3, (2,): 0}
    # Λ[2]_1 thiếu cạnh (0, 2)
    h = horn(2, 1, 2)
    assert h.nondegenerate_counts() == {(0,): 3, (1,): 2, (2,): 0}
    assert not h.contains((1,), (0, 2))
    sp = spine(2, 2)
    assert sp.counts() == {(0,): 3, (1,): 5, (2,): 7}
    assert sp.dimension == (1,)


def test_groupoid_nerve():
    j = groupoid_nerve(1, 2)
    assert j.counts() == {(0,): 2, (1,): 4, (2,): 8}
    assert j.nondegenerate_counts() == {(0,): 2, (1,): 2, (2,): 2}
    j.validate()


def test_labels():
    assert obj_spec(StandardKind.HORN, 2, 1).label == "Λ[2]_1"
    assert obj_spec(StandardKind.G_GEN, 3).label == "G(3)"
    assert obj_spec(StandardKind.TAU_OBJ, PLUS).label == "τ(1+)"


def test_parse():
    spec = StandardObjectSpec.parse("horn", ["2", "1"])
    assert spec == obj_spec(StandardKind.HORN, 2, 1)
    assert StandardObjectSpec.parse("tau", ["1+"]).n == PLUS
    assert StandardObjectSpec.parse("F", ["3"]).kind is StandardKind.F_GEN
    with pytest.raises(IllegalSpecError):
        StandardObjectSpec.parse("cube", ["1"])


def test_illegal_parameters():
    with pytest.raises(IllegalSpecError):
        obj_spec(StandardKind.HORN, 2, 3)
    with pytest.raises(IllegalSpecError):
        obj_spec(StandardKind.G_GEN, 1)
    with pytest.raises(IllegalSpecError):
        obj_spec(StandardKind.SIMPLEX, -1)
    with pytest.raises(IllegalSpecError):
        obj_spec(StandardKind.SIMPLEX, 1, 2)


def test_build_bisimplicial_generators():
    f1 = build(obj_spec(StandardKind.F_GEN, 1), 2)
    assert f1.shape is IndexShape.BISIMPLEX
    assert f1.bound == (2, 2)
    assert f1.count((1, 0)) == 3
    assert f1.count((1, 2)) == 3
    e1 = build(obj_spec(StandardKind.E_GEN, 1), 2)
    assert e1.count((1, 1)) == 4
    col = build(obj_spec(StandardKind.CONST_COL, 1), 2)
    assert col.count((2, 1)) == 3
    assert col.count((0, 0)) == 2
    # bộ lọc khe giữ 4 cạnh suy biến và 3 cạnh liên tiếp của [3]
    assert build(obj_spec(StandardKind.G_GEN, 3), 2).count((1, 0)) == 7


def test_build_marked_objects():
    tau_plus = build(obj_spec(StandardKind.TAU_OBJ, PLUS), 2)
    assert tau_plus.shape is IndexShape.MARKED_SIMPLEX
    assert (0, 1) in tau_plus.markings((1,))
    tau_one = build(obj_spec(StandardKind.TAU_OBJ, 1), 2)
    assert tau_one.markings((1,)) == frozenset({(0, 0), (1, 1)})


def test_canonical_inclusions():
    i = canonical_inclusion(obj_spec(StandardKind.HORN, 2, 1), obj_spec(StandardKind.SIMPLEX, 2), 2)
    i.validate()
    assert i.is_injective()
    v = canonical_inclusion(obj_spec(StandardKind.SIMPLEX, 0), obj_spec(StandardKind.SIMPLEX, 2), 2, vertex=1)
    assert v((0,), (0,)) == (1,)
    g = canonical_inclusion(obj_spec(StandardKind.G_GEN, 2), obj_spec(StandardKind.F_GEN, 2), 2)
    g.validate()
    with pytest.raises(IllegalSpecError):
        canonical_inclusion(obj_spec(StandardKind.SIMPLEX, 1), obj_spec(StandardKind.SIMPLEX, 2), 2)
    with pytest.raises(IllegalSpecError):
        canonical_inclusion(obj_spec(StandardKind.SIMPLEX, 0), obj_spec(StandardKind.SIMPLEX, 2), 2, vertex=5)
