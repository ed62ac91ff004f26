# -*- coding: utf-8 -*-
"""
Kiểm tra tính chất (hypothesis): đếm Hom, tích, hàm tử giữa poset, currying, đối giới hạn, phép kề flat ⊣ forget và corpus theo seed.
"""

import os
import sys
from math import comb

from hypothesis import given, settings, strategies as st

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.category.finite_category import functors, poset
from core.hom.hom_engine import count_hom, enumerate_hom, exponential, is_isomorphic
from core.marked.marked_objects import sharp
from core.presheaf.ops import inclusion, product, prolong_first, pushout
from core.standard.objects import standard_simplex
from core.suite.corpus import CorpusSpec, generate_corpus
from core.transfer.transfer_functors import verify_adjunction

small = st.integers(min_value=0, max_value=2)
# tìm đẳng cấu tăng nhanh theo số đỉnh nên giữ đối tượng nhỏ
tiny = st.integers(min_value=0, max_value=1)


# Hom(Δ[m], Δ[n]) là ánh xạ đơn điệu [m] -> [n]
@given(small, small)
@settings(max_examples=9, deadline=None)
def test_hom_between_simplices_counts_monotone_maps(m, n):
    hs = enumerate_hom(standard_simplex(m, 2), standard_simplex(n, 2))
    assert len(hs) == comb(m + n + 1, m + 1)
    assert hs.exactness == "exact"


@given(small, small)
@settings(max_examples=9, deadline=None)
def test_functors_between_posets_match_nerve_maps(m, n):
    assert sum(1 for _ in functors(poset(m), poset(n))) == comb(m + n + 1, m + 1)


@given(small, small)
@settings(max_examples=9, deadline=None)
def test_product_counts_multiply(m, n):
    a, b = standard_simplex(m, 2), standard_simplex(n, 2)
    p = product(a, b)
    for level in p.levels():
        assert p.count(level) == a.count(level) * b.count(level)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=5, deadline=None)
def test_corpus_is_deterministic(seed):
    spec = CorpusSpec(seed=seed, objects=2, max_nondegenerate=6, categories=2, diagrams=1)
    first, second = generate_corpus(spec), generate_corpus(spec)
    assert first.summary() == second.summary()
    assert [x.counts() for x in first.simplicial] == [x.counts() for x in second.simplicial]
    assert [c.morphisms for c in first.categories] == [c.morphisms for c in second.categories]


@given(tiny, tiny)
@settings(max_examples=9, deadline=None)
def test_product_is_symmetric_up_to_isomorphism(m, n):
    a, b = standard_simplex(m, 2), standard_simplex(n, 2)
    assert is_isomorphic(product(a, b), product(b, a))


@given(small, small)
@settings(max_examples=9, deadline=None)
def test_flat_forget_adjunction_counts(m, n):
    x, y = standard_simplex(m, 2), sharp(standard_simplex(n, 2))
    report = verify_adjunction("flat/forget", x, y)
    assert report.holds
    assert report.details["left"] == report.details["right"] == comb(m + n + 1, m + 1)


# Hom(Z × X, Y) ≅ Hom(Z, Y^X) ở cận (1, 1)
@given(tiny, tiny, tiny)
@settings(max_examples=8, deadline=None)
def test_exponential_currying_bijection(m, k, n):
    z, x, y = (prolong_first(standard_simplex(d, 1), 1) for d in (m, k, n))
    assert count_hom(product(z, x), y) == count_hom(z, exponential(x, y).presheaf)


@given(small)
@settings(max_examples=3, deadline=None)
def test_pushout_along_identities_is_idempotent(n):
    x = standard_simplex(n, 2)
    glued = pushout(inclusion(x, x), inclusion(x, x))
    assert glued.counts() == x.counts()
    assert is_isomorphic(glued, x)
