# -*- coding: utf-8 -*-
"""
Test cho đối tượng có đánh dấu: flat, sharp, forget, chính sách và Hom có đánh dấu.
"""

import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.marked.marked_objects import (
    MarkingMask,
    MarkingPolicy,
    SHARP,
    degenerate_mask,
    flat,
    flat_forget_counit,
    flat_forget_unit,
    forget,
    forget_sharp_counit,
    forget_sharp_unit,
    marked_hom,
    marking_summary,
    sharp,
    with_policy,
)
from core.presheaf.shape import IndexShape
from core.standard.objects import standard_simplex
from core.types.errors import InvalidPresheafError, ShapeMismatchError


def test_flat_and_sharp():
    x = standard_simplex(1, 2)
    assert flat(x).markings((1,)) == frozenset({(0, 0), (1, 1)})
    assert sharp(x).markings((1,)) == frozenset({(0, 0), (0, 1), (1, 1)})
    assert flat(x).shape is IndexShape.MARKED_SIMPLEX
    assert marking_summary(sharp(x)) == {"1": 3}


def test_forget():
    x = standard_simplex(2, 2)
    assert forget(sharp(x)).shape is IndexShape.SIMPLEX
    assert forget(flat(x)).counts() == x.counts()
    with pytest.raises(ShapeMismatchError):
        forget(x)


def test_explicit_policy_needs_degenerate_edges():
    x = standard_simplex(1, 2)
    with pytest.raises(InvalidPresheafError):
        with_policy(x, MarkingPolicy.explicit([(0, 1)]))
    marked = with_policy(x, MarkingPolicy.explicit([(0, 0), (1, 1), (0, 1)]))
    assert marked.markings((1,)) == sharp(x).markings((1,))
    with pytest.raises(InvalidPresheafError):
        with_policy(x, MarkingPolicy.explicit([(0, 0), (1, 1), (1, 0)]))
    assert with_policy(x, SHARP).markings((1,)) == sharp(x).markings((1,))


def test_marking_masks():
    x = standard_simplex(1, 2)
    degenerate = degenerate_mask(x, (1,))
    full = MarkingMask(x, (1,), x.cells((1,)))
    assert degenerate.count() == 2
    assert full.missing_from(degenerate) == [(0, 1)]
    assert degenerate.missing_from(full) == []
    assert (0, 1) not in degenerate


def test_marked_hom_preserves_markings():
    x = standard_simplex(1, 2)
    assert len(marked_hom(flat(x), sharp(x))) == 3
    # chỉ ánh xạ hằng gửi cạnh đánh dấu (0, 1) vào cạnh suy biến
    assert len(marked_hom(sharp(x), flat(x))) == 2
    with pytest.raises(ShapeMismatchError):
        marked_hom(x, sharp(x))


def test_adjunction_units_are_maps():
    x = standard_simplex(1, 2)
    flat_forget_unit(x).validate()
    forget_sharp_counit(x).validate()
    flat_forget_counit(sharp(x)).validate()
    forget_sharp_unit(flat(x)).validate()
