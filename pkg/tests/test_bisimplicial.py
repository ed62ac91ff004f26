# -*- coding: utf-8 -*-
"""
Test cho các kiểm tra song đơn hình trong chế độ rời rạc.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.bisimplicial.checkers import (
    Regime,
    cylinders,
    groupoid_defect,
    hopullback_discrete,
    is_cartesian_fibration_bisimplicial,
    kan_row_defect,
    point_map,
    right_fib_rows,
    row_map,
    scan_objects,
    scan_regime,
    segal_completeness_check,
    segal_generators,
)
from core.category.classification import classification_diagram
from core.category.finite_category import chaotic, discrete_category, nerve, poset
from core.presheaf.ops import prolong_first, prolong_second
from core.standard.objects import groupoid_nerve, spine, standard_simplex
from core.types.errors import ShapeMismatchError


def test_point_map_targets_the_point():
    w = prolong_first(standard_simplex(1, 2), 2)
    p = point_map(w)
    p.validate()
    assert all(p.target.count(level) == 1 for level in p.target.levels())


def test_segal_generators_labels():
    labels = [g.label for g in segal_generators((2, 2))]
    assert labels == ["G(2)->F(2)", "F(0)->E(1)"]
    labels = [g.label for g in segal_generators((3, 2))]
    assert labels[:2] == ["G(2)->F(2)", "G(3)->F(3)"]


def test_groupoid_defect():
    assert groupoid_defect(groupoid_nerve(1, 3)) is None
    assert "not invertible" in groupoid_defect(standard_simplex(1, 3))
    assert groupoid_defect(standard_simplex(1, 1)) is not None


def test_scan_objects_needs_constant_space_direction():
    assert scan_objects(prolong_first(standard_simplex(1, 2), 2)).verified
    flag = scan_objects(prolong_second(standard_simplex(1, 2), 2))
    assert flag.regime is Regime.UNVERIFIED
    assert flag.reason


def test_scan_regime_of_discrete_rows():
    flag = scan_regime(point_map(prolong_first(spine(2, 2), 2)))
    assert flag.regime is Regime.DISCRETE
    assert flag.space_levels == 0


def test_cylinders_respect_budget():
    s = standard_simplex(2, 2)
    assert [c.m for c in cylinders(s)] == [0, 0, 0, 1, 1, 1]
    assert len(cylinders(s, budget=4)) == 4


def test_spine_violates_segal_condition():
    report = segal_completeness_check(prolong_first(spine(2, 2), 2))
    assert report.fails
    assert "G(2)->F(2)" in repr(report.witness)


def test_hopullback_discrete():
    p = point_map(prolong_first(standard_simplex(1, 2), 2))
    assert hopullback_discrete(p, 0).holds
    # hai cạnh (0, 1) và (1, 1) cùng đỉnh cuối trên điểm
    report = hopullback_discrete(p, 1)
    assert report.fails
    assert "cells" in report.witness


def test_unverified_regime_is_inconclusive():
    p = point_map(prolong_second(standard_simplex(1, 2), 2))
    assert hopullback_discrete(p, 1).inconclusive


def test_simplicial_input_is_rejected():
    with pytest.raises(ShapeMismatchError):
        segal_completeness_check(standard_simplex(1, 2))


def test_groupoid_defect_accepts_associative_groupoids():
    assert groupoid_defect(nerve(chaotic(2), 3)) is None
    assert groupoid_defect(nerve(discrete_category(["a", "b"]), 2)) is None


def test_kan_row_defect():
    p = point_map(classification_diagram(chaotic(1), 2))
    assert kan_row_defect(row_map(p, 1)) is None
    interval = point_map(prolong_second(standard_simplex(1, 2), 2))
    assert "not invertible" in kan_row_defect(row_map(interval, 0))


def test_right_fib_rows_of_classification_diagram_are_exact():
    report = right_fib_rows(point_map(classification_diagram(chaotic(1), 2)))
    assert report.holds
    assert "exact-by-groupoid-nerve" in report.exactness


def test_right_fib_rows_reject_interval_rows():
    report = right_fib_rows(point_map(prolong_second(standard_simplex(1, 2), 2)))
    assert report.fails
    assert report.witness["part"] == "right_fib_row[0]"


def test_classification_diagram_is_cartesian_over_point():
    for c in (poset(1), discrete_category(["a", "b"])):
        report = is_cartesian_fibration_bisimplicial(point_map(classification_diagram(c, 2)))
        assert report.holds, report.witness


def test_spine_rows_are_not_cartesian_over_point():
    report = is_cartesian_fibration_bisimplicial(point_map(prolong_first(spine(2, 2), 2)))
    assert report.fails
    assert "G(2)->F(2)" in repr(report.witness)


def test_constant_groupoid_nerve_is_not_complete():
    # p1*J[1]: Segal nhưng hướng không gian rời rạc, nên F(0) -> E(1) không là song ánh
    report = segal_completeness_check(prolong_first(groupoid_nerve(1, 2), 2))
    assert report.fails
    assert "F(0)->E(1)" in repr(report.witness)
