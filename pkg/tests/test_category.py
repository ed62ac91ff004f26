# -*- coding: utf-8 -*-
"""
Test cho phạm trù hữu hạn, nerve, dựng Grothendieck và sơ đồ phân loại.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.category.classification import classification_diagram, classification_level_count
from core.category.finite_category import (
    CatFunctor,
    FiniteCategory,
    chaotic,
    discrete_category,
    functors,
    groupoid_core,
    load_category,
    nerve,
    nerve_map,
    poset,
    product_category,
    save_category,
)
from core.category.grothendieck import (
    CatDiagram,
    classical_cartesian_edges,
    constant_diagram,
    discrete_diagram,
    grothendieck,
)
from core.hom.hom_engine import is_isomorphic
from core.standard.objects import groupoid_nerve, standard_simplex
from core.types.errors import InvalidCategoryError


def _two_point_fiber_diagram() -> CatDiagram:
    """F(0) = {*}, F(1) = {a, b} rời rạc, F(0 -> 1) gửi mọi điểm về *."""
    return discrete_diagram(poset(1), {"0": ["*"], "1": ["a", "b"]}, {"0->1": {"a": "*", "b": "*"}})


def test_poset_composition():
    c = poset(2)
    assert c.objects == ("0", "1", "2")
    assert len(c.morphisms) == 6
    assert c.compose("1->2", "0->1") == "0->2"
    assert c.compose("0->1", "0->0") == "0->1"
    with pytest.raises(InvalidCategoryError):
        c.compose("0->1", "1->2")


def test_isomorphisms_and_groupoids():
    assert chaotic(1).is_groupoid()
    assert chaotic(1).inverse("0->1") == "1->0"
    assert not poset(1).is_groupoid()
    assert sorted(poset(1).isomorphisms()) == ["0->0", "1->1"]
    core = groupoid_core(poset(2))
    assert len(core.morphisms) == 3
    assert core.is_groupoid()


def test_missing_composite_is_rejected():
    with pytest.raises(InvalidCategoryError):
        FiniteCategory(["a"], {("a", "a"): ["id", "e"]}, {}, {"a": "id"})


def test_non_associative_table_is_rejected():
    # e ∘ e = e nhưng (e ∘ f) ∘ f khác e ∘ (f ∘ f)
    homs = {("a", "a"): ["id", "e", "f"]}
    comp = {("e", "e"): "e", ("e", "f"): "e", ("f", "e"): "f", ("f", "f"): "id"}
    with pytest.raises(InvalidCategoryError):
        FiniteCategory(["a"], homs, comp, {"a": "id"})


def test_category_json_round_trip(tmp_path):
    c = product_category(poset(1), chaotic(1))
    path = tmp_path / "c.json"
    save_category(c, path)
    back = load_category(path)
    assert back.objects == c.objects
    assert back.morphisms == c.morphisms
    for g in c.morphisms:
        for f in c.morphisms:
            if c.composable(g, f):
                assert back.compose(g, f) == c.compose(g, f)


def test_names_with_commas_survive_json():
    total = grothendieck(_two_point_fiber_diagram()).category
    back = FiniteCategory.from_dict(total.to_dict())
    assert back.morphisms == total.morphisms
    assert set(back.objects) == {"(0,*)", "(1,a)", "(1,b)"}


def test_functor_enumeration():
    assert sum(1 for _ in functors(poset(1), poset(1))) == 3
    # nhóm phỏng chỉ đi vào poset qua hàm tử hằng
    assert sum(1 for _ in functors(chaotic(1), poset(1))) == 2
    assert sum(1 for _ in functors(chaotic(1), chaotic(1))) == 4


def test_functor_validation():
    c, d = poset(1), poset(1)
    with pytest.raises(InvalidCategoryError):
        CatFunctor(c, d, {"0": "1", "1": "0"}, {"0->0": "1->1", "1->1": "0->0", "0->1": "0->1"})
    same = CatFunctor(c, d, {"0": "0", "1": "1"}, {m: m for m in c.morphisms})
    assert same == CatFunctor.identity(c)


def test_nerve_of_poset_is_simplex():
    assert is_isomorphic(nerve(poset(2), 3), standard_simplex(2, 3))
    assert nerve(poset(1), 3).counts() == standard_simplex(1, 3).counts()


def test_nerve_of_chaotic_is_groupoid_nerve():
    assert is_isomorphic(nerve(chaotic(1), 3), groupoid_nerve(1, 3))


def test_nerve_faces():
    n = nerve(poset(2), 2)
    chain = ("0->1", "1->2")
    assert n.face((2,), 0, 0, chain) == ("1->2",)
    assert n.face((2,), 0, 1, chain) == ("0->2",)
    assert n.face((2,), 0, 2, chain) == ("0->1",)
    assert n.face((1,), 0, 0, ("0->1",)) == "1"
    assert n.face((1,), 0, 1, ("0->1",)) == "0"
    assert n.degeneracy((0,), 0, 0, "1") == ("1->1",)
    assert n.cosk == 2


def test_nerve_map_of_functor():
    c = discrete_category(["x", "y"])
    f = CatFunctor(c, poset(1), {"x": "0", "y": "1"}, {"id_x": "0->0", "id_y": "1->1"})
    m = nerve_map(f, 2)
    assert m((0,), "y") == "1"
    assert m((1,), ("id_x",)) == ("0->0",)
    m.validate()


def test_product_category_counts():
    c = product_category(poset(1), poset(1))
    assert len(c.objects) == 4
    assert len(c.morphisms) == 9
    assert c.compose("0->1|1->1", "0->0|0->1") == "0->1|0->1"


def test_grothendieck_of_discrete_fibers():
    construction = grothendieck(_two_point_fiber_diagram())
    total = construction.category
    assert len(total.objects) == 3
    assert len(total.morphisms) == 5
    construction.projection.validate()
    assert classical_cartesian_edges(construction) == frozenset(total.morphisms)


def test_grothendieck_of_constant_poset_fiber():
    construction = grothendieck(constant_diagram(poset(1), poset(1)))
    total = construction.category
    # ∫ hằng là tích [1] × [1]
    assert len(total.objects) == 4
    assert len(total.morphisms) == 9
    # φ khả nghịch trong [1] chỉ khi là đồng nhất: 3 cấu xạ đáy x 2 đối tượng
    assert len(classical_cartesian_edges(construction)) == 6


def test_diagram_must_be_functorial():
    sets = {o: ["p", "q"] for o in ("0", "1", "2")}
    swap = {"p": "q", "q": "p"}
    with pytest.raises(InvalidCategoryError):
        discrete_diagram(poset(2), sets, {"0->1": swap, "1->2": swap, "0->2": swap})
    ok = discrete_diagram(poset(2), sets, {"0->1": swap, "1->2": swap, "0->2": {"p": "p", "q": "q"}})
    back = CatDiagram.from_dict(ok.to_dict())
    assert len(grothendieck(back).category.morphisms) == len(grothendieck(ok).category.morphisms)


def test_classification_levels_count_functors():
    c = chaotic(1)
    assert classification_level_count(c, 0, 1) == 4
    assert classification_level_count(poset(1), 1, 0) == 3
    diagram = classification_diagram(c, 2)
    assert diagram.count((0, 1)) == 4
    assert diagram.count((0, 0)) == 2
