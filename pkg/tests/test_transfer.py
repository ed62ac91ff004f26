# -*- coding: utf-8 -*-
"""
Test cho các hàm tử chuyển, kiểm tra phép kề và đồng nhất hợp thành.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.marked.marked_objects import flat, sharp
from core.presheaf.ops import prolong_first
from core.presheaf.shape import IndexShape
from core.standard.objects import standard_simplex
from core.transfer.transfer_functors import (
    ADJUNCTIONS,
    TransferTag,
    apply,
    composite_identities,
    enriched_spot_check,
    marked_composite_identity,
    t_upper,
    tau_plus_upper,
    tcompare,
    verify_adjunction,
)
from core.types.errors import MissingCertificateError, ShapeMismatchError


def test_transfer_tag_parse():
    assert TransferTag.parse("t^!") is TransferTag.T_UPPER
    assert TransferTag.parse("T_LOWER") is TransferTag.T_LOWER
    assert TransferTag.TAU_PLUS_LOWER.source_shape is IndexShape.MARKED_BISIMPLEX
    with pytest.raises(ValueError):
        TransferTag.parse("t?")


def test_apply_prolong_and_restrict():
    s = standard_simplex(1, 2)
    lifted = apply(TransferTag.P1_STAR, s, 1)
    assert lifted.shape is IndexShape.BISIMPLEX
    assert lifted.count((1, 1)) == 3
    assert apply(TransferTag.I1_STAR, lifted).counts() == s.counts()
    assert apply(TransferTag.FLAT_PROLONG, lifted).shape is IndexShape.MARKED_BISIMPLEX
    with pytest.raises(ShapeMismatchError):
        apply(TransferTag.T_LOWER, s)


def test_t_upper_levels_count_maps():
    up = t_upper(standard_simplex(1, 2)).presheaf
    assert up.count((0, 0)) == 2
    # J[1] chỉ đi vào Δ[1] qua ánh xạ hằng
    assert up.count((0, 1)) == 2
    assert up.count((1, 0)) == 3


def test_t_upper_needs_certificate():
    with pytest.raises(MissingCertificateError):
        t_upper(standard_simplex(1, 2).with_cosk(None))


def test_t_lower_t_upper_adjunction():
    report = verify_adjunction("t!/t^!", prolong_first(standard_simplex(1, 2), 2), standard_simplex(2, 2))
    assert not report.fails
    assert report.details["left"] == report.details["right"] == 6


def test_flat_forget_sharp_adjunctions():
    x = standard_simplex(1, 2)
    report = verify_adjunction("flat/forget", x, sharp(x))
    assert report.holds
    assert report.details["left"] == 3
    assert verify_adjunction("forget/sharp", flat(x), x).holds


def test_prolong_restrict_adjunction():
    s = standard_simplex(1, 2)
    report = verify_adjunction("p1*/i1*", s, prolong_first(standard_simplex(1, 2), 2))
    assert not report.fails
    assert report.details["left"] == report.details["right"]
    with pytest.raises(ShapeMismatchError):
        verify_adjunction("p+*/i+*", s, prolong_first(s, 2))


def test_unknown_adjunction():
    assert "t!/t^!" in ADJUNCTIONS
    with pytest.raises(ValueError):
        verify_adjunction("left/right", standard_simplex(0, 1), standard_simplex(0, 1))


def test_composite_identities():
    assert composite_identities(standard_simplex(1, 2)).holds
    assert marked_composite_identity(sharp(standard_simplex(1, 2))).holds
    with pytest.raises(ShapeMismatchError):
        marked_composite_identity(standard_simplex(1, 2))


def test_enriched_spot_check():
    report = enriched_spot_check(standard_simplex(0, 2), standard_simplex(1, 2))
    assert report.holds
    assert report.details == {"hom": 2, "transferred_hom": 2}


def test_adjunction_with_prebuilt_upper():
    x, y = prolong_first(standard_simplex(1, 2), 2), standard_simplex(2, 2)
    fresh = verify_adjunction("t!/t^!", x, y)
    reused = verify_adjunction("t!/t^!", x, y, upper=t_upper(y))
    assert reused.verdict is fresh.verdict
    assert reused.details["left"] == reused.details["right"] == fresh.details["left"]


def test_tau_plus_upper_counts_marked_edges():
    # mức (0, 1) là Hom⁺(Δ[1]♯, M): các cạnh đánh dấu của M
    assert tau_plus_upper(sharp(standard_simplex(1, 2))).presheaf.count((0, 1)) == 3
    assert tau_plus_upper(flat(standard_simplex(1, 2))).presheaf.count((0, 1)) == 2
    assert tau_plus_upper(flat(standard_simplex(1, 2))).presheaf.count((1, 0)) == 3
    with pytest.raises(ShapeMismatchError):
        tau_plus_upper(standard_simplex(1, 2))


def test_marked_kan_adjunction():
    x = flat(prolong_first(standard_simplex(1, 2), 2))
    report = verify_adjunction("t+!/t+^!", x, sharp(standard_simplex(2, 2)))
    assert not report.fails
    assert report.details["left"] == report.details["right"] == 6


def test_tcompare_on_prolonged_interval():
    result = tcompare(prolong_first(standard_simplex(1, 2), 2))
    assert result["isomorphic"]
    assert result["t+!(X♭)"] == result["(t!X)♭"]
    assert result["t+!(X♭) marked"] == result["(t!X)♭ marked"] == 2
