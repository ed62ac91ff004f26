# -*- coding: utf-8 -*-
"""
Test cho tính chất nâng phải, quasi-category và phạm trù đồng luân.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.category.finite_category import chaotic, nerve, poset
from core.lifting.homotopy import HomotopyCategory, hoequiv_edges
from core.lifting.lifting import FibrationClass, generators, has_rlp, is_quasicategory, to_point
from core.marked.marked_objects import flat
from core.report.check_report import Verdict
from core.standard.objects import spine, standard_simplex, vertex_map
from core.types.errors import BoundExceededError, NotQuasiCategoryError, ShapeMismatchError


def test_fibration_class_parse():
    assert FibrationClass.parse("Inner") is FibrationClass.INNER
    assert FibrationClass.parse("trivial") is FibrationClass.TRIVIAL_KAN
    with pytest.raises(ValueError):
        FibrationClass.parse("bogus")


def test_horn_indices():
    assert FibrationClass.INNER.horn_indices(3) == [1, 2]
    assert FibrationClass.LEFT.horn_indices(2) == [0, 1]
    assert FibrationClass.RIGHT.horn_indices(2) == [1, 2]
    assert FibrationClass.KAN.horn_indices(0) == []


def test_generator_labels():
    labels = [g.label for g in generators(FibrationClass.INNER, 3, 3)]
    assert labels == ["Λ[2]_1->Δ[2]", "Λ[3]_1->Δ[3]", "Λ[3]_2->Δ[3]"]
    assert len(generators(FibrationClass.TRIVIAL_KAN, 2, 2)) == 3


def test_simplex_is_quasicategory():
    report = is_quasicategory(standard_simplex(2, 3))
    assert report.verdict is Verdict.HOLDS
    assert report.exactness == ("exact-by-coskeletality-2",)


def test_spine_is_not_quasicategory():
    report = is_quasicategory(spine(2, 3))
    assert report.fails
    assert report.witness["generator"] == "Λ[2]_1->Δ[2]"


def test_interval_is_not_kan():
    report = has_rlp(to_point(standard_simplex(1, 2)), FibrationClass.KAN)
    assert report.fails
    assert report.details["cap"] == 2


def test_groupoid_nerve_is_kan():
    assert has_rlp(to_point(nerve(chaotic(1), 3)), FibrationClass.KAN).holds


def test_poset_nerve_is_not_right_fibration():
    assert has_rlp(to_point(nerve(poset(1), 3)), FibrationClass.RIGHT).fails


def test_cap_override_degrades_to_inconclusive(monkeypatch):
    monkeypatch.setenv("SIMPCALC_CAP", "1")
    report = has_rlp(to_point(standard_simplex(2, 3)), FibrationClass.INNER)
    assert report.inconclusive
    assert report.details["generators"] == []


def test_parallel_generators_agree():
    f = to_point(spine(2, 3))
    assert has_rlp(f, FibrationClass.INNER, workers=2).verdict is Verdict.FAILS


def test_lifting_rejects_wrong_shapes():
    with pytest.raises(ShapeMismatchError):
        has_rlp(to_point(standard_simplex(1, 2)), FibrationClass.MARKED_ANODYNE_SHADOW)
    with pytest.raises(ShapeMismatchError):
        is_quasicategory(flat(standard_simplex(1, 2)))


def test_homotopy_category_of_interval():
    ho = HomotopyCategory(standard_simplex(1, 2))
    assert ho.well_defined().holds
    assert ho.invertible_edges == frozenset({(0, 0), (1, 1)})
    assert ho.compose((1, 1), (0, 1)) == ho.cls((0, 1))
    with pytest.raises(BoundExceededError):
        HomotopyCategory(standard_simplex(1, 1))


def test_hoequiv_edges():
    assert len(hoequiv_edges(nerve(chaotic(1), 3))) == 4
    assert hoequiv_edges(nerve(poset(1), 3)) == frozenset({("0->0",), ("1->1",)})
    with pytest.raises(NotQuasiCategoryError):
        hoequiv_edges(spine(2, 3))


def test_hoequiv_edges_needs_level_three():
    with pytest.raises(BoundExceededError):
        hoequiv_edges(nerve(chaotic(1), 2))
    with pytest.raises(BoundExceededError):
        hoequiv_edges(standard_simplex(1, 2))


def test_upper_vertex_inclusion_is_not_right_fibration():
    report = has_rlp(vertex_map(standard_simplex(0, 3), standard_simplex(1, 3), 1), FibrationClass.RIGHT)
    assert report.fails
    assert report.exactness == ("exact",)
