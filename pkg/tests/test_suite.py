# -*- coding: utf-8 -*-
"""
Test cho sinh corpus theo seed và bộ chạy suite tính chất.
"""

import json
import os
import sys
import time

import numpy as np
import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))
from core.category.finite_category import chaotic, discrete_category, load_category, poset, thin_category
from core.category.grothendieck import constant_diagram, discrete_diagram
from core.marked.marked_objects import flat, sharp
from core.presheaf.ops import is_separated
from core.presheaf.serialize import load_presheaf
from core.report.check_report import Verdict
from core.standard.objects import spine, standard_simplex
from core.suite.corpus import Corpus, CorpusSpec, generate_corpus, nonidentity_isos, random_diagram, write_corpus
from core.suite.suite_runner import (
    SUITES,
    UpperCache,
    describe_suites,
    format_summary,
    non_separated_sample,
    run_suite,
    suite_names,
    summary_frame,
)
from core.types.errors import UnknownSuiteError

SMALL = CorpusSpec(seed=3, objects=4, max_nondegenerate=8, categories=4, diagrams=2)


def _corpus(**groups) -> Corpus:
    return Corpus(CorpusSpec.empty(), **groups)


def test_corpus_spec_validation():
    with pytest.raises(ValueError):
        CorpusSpec(shape_mix=("simplex", "cubical"))
    with pytest.raises(ValueError):
        CorpusSpec(objects=-1)
    assert CorpusSpec.empty().objects == 0


def test_corpus_is_deterministic_per_seed():
    first, second = generate_corpus(SMALL), generate_corpus(SMALL)
    assert first.summary() == second.summary()
    objects = lambda c: c.simplicial + c.bisimplicial + c.marked  # noqa: E731
    for a, b in zip(objects(first), objects(second)):
        assert a.name == b.name
        assert a.counts() == b.counts()
        assert a.markings() == b.markings()
    assert [c.morphisms for c in first.categories] == [c.morphisms for c in second.categories]


def test_corpus_objects_are_valid_and_small():
    corpus = generate_corpus(SMALL)
    assert corpus.summary()["simplicial"] == 4
    assert corpus.summary()["categories"] == 4
    assert len(corpus.diagrams) == 2
    for x in corpus.simplicial + corpus.bisimplicial + corpus.marked:
        x.validate()
        assert x.total_nondegenerate() <= SMALL.max_nondegenerate
    for c in corpus.categories:
        assert 1 <= len(c.objects) <= SMALL.max_category_objects
        c.validate()
    for d in corpus.diagrams:
        d.validate()


def test_empty_corpus():
    corpus = generate_corpus(CorpusSpec.empty())
    assert corpus.is_empty


def test_write_corpus(tmp_path):
    corpus = generate_corpus(SMALL)
    written = write_corpus(corpus, tmp_path)
    assert len(written) == 3 * SMALL.objects + SMALL.categories + SMALL.diagrams + 1
    x = corpus.simplicial[0]
    back = load_presheaf(tmp_path / "simplicial" / f"{x.name}.json")
    assert back.counts() == x.counts()
    c = corpus.categories[0]
    assert load_category(tmp_path / "categories" / f"{c.name}.json").morphisms == c.morphisms
    manifest = json.loads((tmp_path / "corpus.json").read_text(encoding="utf-8"))
    assert manifest["summary"] == corpus.summary()
    assert manifest["spec"]["seed"] == 3


def test_suite_registry():
    names = suite_names()
    for expected in (
        "adjunctions",
        "composites",
        "cartesian-oracle",
        "right-fibration",
        "hoequiv",
        "standard-counts",
        "marked-yoneda",
        "cso",
        "separatedness",
    ):
        assert expected in names
    assert list(describe_suites()) == names


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        run_suite("no-such-suite", _corpus())
    with pytest.raises(ValueError):
        run_suite("no-such-suite", _corpus())


def test_empty_corpus_is_vacuous_holds():
    result = run_suite("hoequiv", generate_corpus(CorpusSpec.empty()))
    assert result.vacuous
    assert result.verdict is Verdict.HOLDS
    assert result.to_dict()["vacuous"] is True
    assert "vacuous" in format_summary(result)


def test_standard_counts_suite():
    result = run_suite("standard-counts", _corpus())
    assert not result.vacuous
    assert result.verdict is Verdict.HOLDS
    assert result.counts()["holds"] == 6
    parallel = run_suite("standard-counts", _corpus(), workers=2)
    assert parallel.to_json() == result.to_json()


def test_suite_json_omits_timing_by_default():
    result = run_suite("standard-counts", _corpus())
    data = json.loads(result.to_json())
    assert "elapsed_us" not in data
    assert all("elapsed_us" not in case for case in data["cases"])
    assert "elapsed_us" in result.to_dict(include_timing=True)


def test_summary_frame():
    result = run_suite("standard-counts", _corpus())
    frame = summary_frame(result)
    assert list(frame.columns) == ["case", "check", "verdict", "exactness"]
    assert len(frame) == 6
    assert set(frame["verdict"]) == {"holds"}
    assert "Kết luận: holds" in format_summary(result)


def test_separatedness_suite():
    corpus = _corpus(simplicial=[standard_simplex(1, 2), spine(2, 2)])
    result = run_suite("separatedness", corpus)
    # hai đối tượng x (♭, ♯) cộng một ca bác bỏ
    assert len(result.cases) == 5
    assert result.verdict is Verdict.HOLDS


def test_non_separated_sample_is_rejected():
    assert is_separated(non_separated_sample()).fails


def test_right_fibration_suite():
    corpus = _corpus(categories=[poset(1), chaotic(1), discrete_category(["a", "b"])])
    result = run_suite("right-fibration", corpus)
    assert result.verdict is Verdict.HOLDS
    assert len(result.cases) == 3


def test_hoequiv_suite():
    result = run_suite("hoequiv", _corpus(categories=[poset(1), chaotic(1)]))
    assert result.verdict is Verdict.HOLDS


def test_marked_yoneda_suite():
    corpus = _corpus(marked=[sharp(standard_simplex(1, 2)), flat(standard_simplex(2, 2))])
    result = run_suite("marked-yoneda", corpus)
    assert result.verdict is Verdict.HOLDS


def test_cartesian_oracle_suite():
    two_points = discrete_diagram(poset(1), {"0": ["*"], "1": ["a", "b"]}, {"0->1": {"a": "*", "b": "*"}})
    corpus = _corpus(diagrams=[two_points, constant_diagram(poset(1), poset(1))])
    result = run_suite("cartesian-oracle", corpus)
    assert result.verdict is Verdict.HOLDS
    assert len(result.cases) == 2


def test_cartesian_oracle_on_cospan_base():
    cospan = thin_category(3, lambda i, j: i == j or j == 2, "cospan")
    diagram = discrete_diagram(
        cospan,
        {"0": ["a"], "1": ["b", "c"], "2": ["x", "y"]},
        {"0->2": {"x": "a", "y": "a"}, "1->2": {"x": "b", "y": "c"}},
    )
    result = run_suite("cartesian-oracle", _corpus(diagrams=[diagram]))
    assert result.verdict is Verdict.HOLDS
    assert len(result.cases) == 1


def _is_linear(c) -> bool:
    return all(c.hom(a, b) or c.hom(b, a) for a in c.objects for b in c.objects)


def test_random_diagrams_include_non_linear_bases():
    rng = np.random.default_rng(7)
    bases = [random_diagram(rng, 3, 2, f"F{k:03d}")[0].base for k in range(40)]
    assert any(not _is_linear(b) for b in bases)


def test_corpus_categories_respect_iso_cap():
    spec = CorpusSpec(objects=0, diagrams=0)
    corpus = generate_corpus(spec)
    assert len(corpus.categories) == spec.categories == 10
    assert all(nonidentity_isos(c) <= spec.max_category_isos for c in corpus.categories)
    assert len(SUITES["cso"].cases(corpus)) == 10
    assert len(SUITES["right-fibration"].cases(corpus)) == 10


def test_cso_suite_holds_on_small_categories():
    result = run_suite("cso", _corpus(categories=[poset(1), discrete_category(["a", "b"])]))
    assert result.verdict is Verdict.HOLDS
    assert len(result.cases) == 2
    for _, report in result.cases:
        assert report.details["original"] == "holds"
        assert report.details["mutated"] == "fails"


def test_adjunctions_suite_builds_upper_once_per_category():
    x = generate_corpus(SMALL).bisimplicial
    cache, c = UpperCache(2), poset(1)
    first, _ = cache.get(c)
    again, _ = cache.get(c)
    assert first is again
    assert cache.builds == 1
    result = run_suite("adjunctions", _corpus(bisimplicial=x, categories=[poset(1), discrete_category(["a"])]))
    assert len(result.cases) == len(x)
    assert result.verdict is not Verdict.FAILS


def test_default_corpus_adjunctions_finish_within_two_minutes():
    corpus = generate_corpus(CorpusSpec())
    started = time.perf_counter()
    result = run_suite("adjunctions", corpus)
    assert time.perf_counter() - started < 120
    assert len(result.cases) == len(corpus.bisimplicial) == 50
    assert result.verdict is not Verdict.FAILS


def test_standard_counts_check_j1_through_default_bound():
    result = run_suite("standard-counts", _corpus())
    j1 = dict(result.cases)["J[1]"]
    assert j1.holds
    assert sorted(j1.details["counts"]) == [1, 2, 3, 4]
