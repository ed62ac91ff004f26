"""Bộ kiểm tra chấp nhận: mỗi suite biến corpus thành danh sách ca, mỗi ca trả về CheckReport.

Kết quả JSON không chứa thời gian nên hai lần chạy cùng seed cho ra cùng một byte.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from threading import RLock
from typing import Any, Callable

import pandas as pd

from core.bisimplicial.checkers import is_cartesian_fibration_bisimplicial, point_map
from core.cartesian.cartesian_edges import cartesian_edges, is_cartesian_fibration, natural_marking
from core.category.classification import classification_diagram
from core.category.finite_category import FiniteCategory, nerve, nerve_map
from core.category.grothendieck import CatDiagram, classical_cartesian_edges, grothendieck
from core.config.defaults import DEFAULT_DIM_BOUND, PROGRESS_EVERY
from core.hom.hom_engine import HomPresheaf
from core.lifting.homotopy import hoequiv_edges
from core.lifting.lifting import FibrationClass, has_rlp, to_point
from core.marked.marked_objects import flat, marked_hom, sharp
from core.metrics.metrics import GLOBAL_METRICS
from core.presheaf.ops import coproduct, is_separated, product, prolong_first
from core.presheaf.presheaf import TruncatedPresheaf
from core.presheaf.shape import IndexShape
from core.report.check_report import CheckReport, Verdict, conjunction, fails, holds, inconclusive
from core.standard.objects import groupoid_nerve, spine, standard_simplex
from core.suite.corpus import Corpus
from core.transfer.transfer_functors import composite_identities, t_upper, tau_plus_lower, verify_adjunction
from core.types.errors import UnknownSuiteError

logger = logging.getLogger(__name__)

# Các kiểm tra theo nerve cần level 3 để chứng chỉ 2-coskeletal cho kết quả chính xác.
NERVE_BOUND = 3
# Slice mất hai level; kiểm tra p-Cartesian chỉ chính xác khi slice có tới level 2.
SLICE_NERVE_BOUND = NERVE_BOUND + 1

Case = tuple[str, Callable[[], CheckReport]]


@dataclass(frozen=True)
class SuiteDefinition:
    name: str
    definition: str
    cases: Callable[[Corpus], list[Case]]


SUITES: dict[str, SuiteDefinition] = {}


def register(name: str, definition: str):
    def wrap(fn: Callable[[Corpus], list[Case]]) -> Callable[[Corpus], list[Case]]:
        SUITES[name] = SuiteDefinition(name, definition, fn)
        return fn

    return wrap


def suite_names() -> list[str]:
    return sorted(SUITES)


@dataclass
class SuiteResult:
    name: str
    definition: str
    seed: int
    cases: list[tuple[str, CheckReport]] = field(default_factory=list)
    elapsed_us: int = 0
    metrics: dict[str, int] = field(default_factory=dict)

    @property
    def verdict(self) -> Verdict:
        if any(r.fails for _, r in self.cases):
            return Verdict.FAILS
        if any(r.inconclusive for _, r in self.cases):
            return Verdict.INCONCLUSIVE
        return Verdict.HOLDS

    @property
    def vacuous(self) -> bool:
        return not self.cases

    def counts(self) -> dict[str, int]:
        return {v.value: sum(1 for _, r in self.cases if r.verdict is v) for v in Verdict}

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "suite": self.name,
            "definition": self.definition,
            "seed": self.seed,
            "verdict": self.verdict.value,
            "vacuous": self.vacuous,
            "counts": self.counts(),
            "cases": [{"case": case, **report.to_dict(include_timing)} for case, report in self.cases],
        }
        if include_timing:
            out["elapsed_us"] = self.elapsed_us
            out["metrics"] = dict(self.metrics)
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), ensure_ascii=False, sort_keys=True, indent=2)


def summary_frame(result: SuiteResult) -> pd.DataFrame:
    rows = [
        {
            "case": case,
            "check": report.check,
            "verdict": report.verdict.value,
            "exactness": ",".join(report.exactness),
        }
        for case, report in result.cases
    ]
    return pd.DataFrame(rows, columns=["case", "check", "verdict", "exactness"])


def format_summary(result: SuiteResult) -> str:
    """Tóm tắt cho người đọc: đếm theo phán quyết và liệt kê các ca không holds."""
    frame = summary_frame(result)
    lines = [f"=== Suite {result.name} (seed={result.seed}) ===", f"Định nghĩa: {result.definition}"]
    if frame.empty:
        lines.append("Corpus rỗng: holds (vacuous).")
    else:
        by_verdict = frame.groupby("verdict").size()
        lines.append("Số ca: " + ", ".join(f"{v}={int(n)}" for v, n in by_verdict.items()))
        flagged = frame[frame["verdict"] != Verdict.HOLDS.value]
        if not flagged.empty:
            lines.append(flagged.to_string(index=False))
    lines.append(f"Kết luận: {result.verdict.value}")
    if result.metrics:
        lines.append("Metrics: " + " ".join(f"{k}={v}" for k, v in result.metrics.items()))
    return "\n".join(lines)


def _run_case(case: Case) -> CheckReport:
    _, check = case
    started = time.perf_counter_ns()
    report = check()
    return CheckReport(
        report.verdict, report.check, report.witness, report.exactness, report.details,
        (time.perf_counter_ns() - started) // 1000,
    )


def run_suite(name: str, corpus: Corpus, workers: int = 1) -> SuiteResult:
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; known: {', '.join(suite_names())}")
    suite = SUITES[name]
    started = time.perf_counter_ns()
    before = GLOBAL_METRICS.snapshot()
    cases = suite.cases(corpus)
    if not cases:
        logger.warning("[Suite] name=%s corpus has no cases; verdict is vacuous", name)
    reports: list[CheckReport] = []
    if workers > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_case, cases))
    else:
        for idx, case in enumerate(cases, start=1):
            reports.append(_run_case(case))
            if idx % PROGRESS_EVERY == 0:
                logger.info("[Suite] name=%s progress=%d/%d", name, idx, len(cases))
    after = GLOBAL_METRICS.snapshot()
    result = SuiteResult(
        name,
        suite.definition,
        corpus.spec.seed,
        [(label, report) for (label, _), report in zip(cases, reports)],
        (time.perf_counter_ns() - started) // 1000,
        {k: after[k] - before.get(k, 0) for k in after},
    )
    counts = result.counts()
    logger.info(
        "[Suite] name=%s cases=%d holds=%d fails=%d inconclusive=%d elapsed_us=%d",
        name, len(cases), counts["holds"], counts["fails"], counts["inconclusive-at-bound"], result.elapsed_us,
    )
    return result


def run_suites(names: list[str], corpus: Corpus, workers: int = 1) -> list[SuiteResult]:
    return [run_suite(name, corpus, workers) for name in names]


# Tiện ích so sánh tập
def _set_report(check: str, found: frozenset, expected: frozenset, flags: tuple[str, ...], **details) -> CheckReport:
    if found == expected:
        if any(not f.startswith("exact") for f in flags):
            return inconclusive(check, flags, **details)
        return holds(check, flags, **details)
    witness = {"unexpected": sorted(map(repr, found - expected)), "missing": sorted(map(repr, expected - found))}
    if "some-edges-inconclusive" in flags and not (found - expected):
        return inconclusive(check, flags, witness=witness, **details)
    return fails(check, witness, flags, **details)


def _count_report(check: str, got: int, expected: int, exactness: tuple[str, ...] = ("exact",), **details) -> CheckReport:
    if got == expected:
        return holds(check, exactness, got=got, **details)
    return fails(check, {"got": got, "expected": expected}, exactness, **details)


def _edges(names) -> frozenset:
    return frozenset((m,) for m in names)


# 1. Song ánh liên hợp t_! ⊣ t^!
class UpperCache:
    """N(C) và t^!N(C) dựng một lần cho mỗi phạm trù, dùng chung giữa các ca (kể cả khi chạy song song)."""

    def __init__(self, bound: int) -> None:
        self.bound = bound
        self._lock = RLock()
        self._entries: dict[int, tuple[TruncatedPresheaf, HomPresheaf]] = {}
        self.builds = 0

    def get(self, c: FiniteCategory) -> tuple[TruncatedPresheaf, HomPresheaf]:
        with self._lock:
            if id(c) not in self._entries:
                y = nerve(c, self.bound)
                self._entries[id(c)] = (y, t_upper(y))
                self.builds += 1
                logger.debug("[Suite] t^! cached category=%s bound=%d", c.name, self.bound)
            return self._entries[id(c)]


def _adjunction(x: TruncatedPresheaf, c: FiniteCategory, cache: UpperCache) -> CheckReport:
    y, upper = cache.get(c)
    return verify_adjunction("t!/t^!", x, y, upper=upper)


@register("adjunctions", "t_! ⊣ t^!: Hom(t_!X, S) ≅ Hom(X, t^!S) with mutually inverse transposes")
def _adjunction_cases(corpus: Corpus) -> list[Case]:
    cats = corpus.categories
    if not cats:
        return []
    cache = UpperCache(max(corpus.spec.bound, 2))
    return [
        (f"{x.name}/{cats[idx % len(cats)].name}", lambda x=x, c=cats[idx % len(cats)]: _adjunction(x, c, cache))
        for idx, x in enumerate(corpus.bisimplicial)
    ]


# 2. Đồng nhất hợp thành
@register("composites", "t_!p₁* ≅ id and (t⁺)_!(p⁺)* ≅ id, levelwise isomorphisms")
def _composite_cases(corpus: Corpus) -> list[Case]:
    bound = corpus.spec.bound
    return [(s.name, lambda s=s: composite_identities(s, bound)) for s in corpus.simplicial + corpus.marked]


# 3. Oracle cạnh Cartesian
def _cartesian_oracle(diagram: CatDiagram) -> CheckReport:
    construction = grothendieck(diagram)
    p = nerve_map(construction.projection, SLICE_NERVE_BOUND)
    found, flags = cartesian_edges(p)
    expected = _edges(classical_cartesian_edges(construction))
    edges = _set_report("cartesian_edges_vs_classical", found, expected, flags, edges=len(expected))
    return conjunction(f"cartesian_oracle[{construction.category.name}]", [edges, is_cartesian_fibration(p)])


@register("cartesian-oracle", "slice-detected p-Cartesian edges of N(∫F) -> N(C) equal the fiberwise isomorphisms")
def _cartesian_cases(corpus: Corpus) -> list[Case]:
    return [(f"F{idx:03d}", lambda d=d: _cartesian_oracle(d)) for idx, d in enumerate(corpus.diagrams)]


# 4. Phân thớ phải trên điểm
def _right_fibration(c: FiniteCategory) -> CheckReport:
    check = f"right_fibration_iff_groupoid[{c.name}]"
    report = has_rlp(to_point(nerve(c, NERVE_BOUND)), FibrationClass.RIGHT)
    expected = c.is_groupoid()
    if report.inconclusive:
        return inconclusive(check, report.exactness, groupoid=expected)
    if report.holds == expected:
        return holds(check, report.exactness, groupoid=expected)
    return fails(check, {"groupoid": expected, "rlp": report.verdict.value, "square": report.witness}, report.exactness)


@register("right-fibration", "N(C) -> Δ[0] has the right lifting property against right horns iff C is a groupoid")
def _right_cases(corpus: Corpus) -> list[Case]:
    return [(c.name, lambda c=c: _right_fibration(c)) for c in corpus.categories]


# 5. Cạnh tương đương
def _hoequiv(c: FiniteCategory) -> CheckReport:
    n = nerve(c, NERVE_BOUND)
    expected = _edges(c.isomorphisms())
    found = hoequiv_edges(n)
    first = _set_report(f"hoequiv_vs_isomorphisms[{c.name}]", found, expected, ("exact-by-coskeletality-2",))
    natural = natural_marking(to_point(nerve(c, SLICE_NERVE_BOUND))).source.markings((1,))
    second = _set_report(f"natural_marking_vs_hoequiv[{c.name}]", natural, found, ("exact-by-coskeletality-2",))
    return conjunction(f"equivalence_edges[{c.name}]", [first, second])


@register("hoequiv", "equivalence edges of N(C) are the isomorphisms of C and the natural marking over the point")
def _hoequiv_cases(corpus: Corpus) -> list[Case]:
    return [(c.name, lambda c=c: _hoequiv(c)) for c in corpus.categories]


# 6. Đếm đối tượng chuẩn
def _standard_counts(bound: int) -> list[Case]:
    def j1() -> CheckReport:
        j = groupoid_nerve(1, bound)
        counts = {k: j.nondegenerate_counts()[(k,)] for k in range(1, bound + 1)}
        bad = {k: v for k, v in counts.items() if v != 2}
        return fails("J[1]", {"counts": bad}, ("exact",)) if bad else holds("J[1]", ("exact",), counts=counts)

    def square() -> CheckReport:
        sq = product(standard_simplex(1, 2), standard_simplex(1, 2))
        return _count_report("Δ[1]×Δ[1]", sq.nondegenerate_counts()[(2,)], 2)

    cases: list[Case] = [("J[1]", j1), ("Δ[1]×Δ[1]", square)]
    for n in range(1, 5):
        cases.append((f"Sp[{n}]", lambda n=n: _count_report(f"Sp[{n}]", spine(n, 1).nondegenerate_counts()[(1,)], n)))
    return cases


@register("standard-counts", "nondegenerate cell counts of J[1], Δ[1]×Δ[1] and the spines Sp[n]")
def _standard_cases(corpus: Corpus) -> list[Case]:
    return _standard_counts(max(corpus.spec.bound, DEFAULT_DIM_BOUND))


# 7. Yoneda có đánh dấu
def _marked_yoneda(m: TruncatedPresheaf) -> CheckReport:
    b = m.bound[0]
    reports = [
        _count_report(f"Hom(Δ[{n}]♭,{m.name})", len(marked_hom(flat(standard_simplex(n, b)), m)), m.count((n,)))
        for n in range(b + 1)
    ]
    if b >= 1:
        reports.append(
            _count_report(
                f"Hom(Δ[1]♯,{m.name})", len(marked_hom(sharp(standard_simplex(1, b)), m)), len(m.markings((1,)))
            )
        )
    return conjunction(f"marked_yoneda[{m.name}]", reports)


@register("marked-yoneda", "|Hom(Δ[n]♭, (S,A))| = |S_n| and |Hom(Δ[1]♯, (S,A))| = |A|")
def _yoneda_cases(corpus: Corpus) -> list[Case]:
    return [(m.name, lambda m=m: _marked_yoneda(m)) for m in corpus.marked]


# 8. Sơ đồ phân loại là đối tượng Segal đầy đủ; đối tượng đột biến bị bác bỏ
def _cso(c: FiniteCategory, bound: int) -> CheckReport:
    check = f"cso[{c.name}]"
    w = classification_diagram(c, bound)
    original = is_cartesian_fibration_bisimplicial(point_map(w))
    mutated = coproduct([w, prolong_first(spine(2, w.bound[0]), w.bound[1], "p1*Sp[2]")], name=f"{w.name}+Sp[2]")
    rejected = is_cartesian_fibration_bisimplicial(point_map(mutated))
    details = {"original": original.verdict.value, "mutated": rejected.verdict.value}
    if not rejected.fails or "G(2)->F(2)" not in repr(rejected.witness):
        return fails(check, {"mutation_not_rejected": rejected.to_dict()}, rejected.exactness, **details)
    if not original.holds:
        return fails(check, {"original": original.witness}, original.exactness, **details)
    return holds(check, original.exactness, **details)


@register("cso", "classification diagrams are Cartesian fibrations over the point; a Segal-violating mutation is rejected")
def _cso_cases(corpus: Corpus) -> list[Case]:
    bound = corpus.spec.bound
    return [(c.name, lambda c=c: _cso(c, bound)) for c in corpus.categories]


# 9. Tính tách
def non_separated_sample() -> TruncatedPresheaf:
    """Δ[1] với hai plus-cell cùng trỏ tới cạnh (0, 1); chỉ dựng được khi tắt kiểm tra."""
    base = standard_simplex(1, 1)
    cells, faces, degens, _ = base.raw_tables()
    plus = {e: e for e in base.cells((1,))}
    plus[("+", 0, 1)] = (0, 1)
    return TruncatedPresheaf(
        IndexShape.MARKED_SIMPLEX, 1, cells, faces, degens, plus={(1,): plus}, name="Δ[1]⁺⁺", validate=False
    )


def _separated(x: TruncatedPresheaf, label: str) -> CheckReport:
    r = is_separated(x)
    return CheckReport(r.verdict, f"is_separated[{label}]", r.witness, r.exactness, r.details)


@register("separatedness", "flat, sharp and transfer-functor outputs are separated; a non-separated presheaf is rejected")
def _separated_cases(corpus: Corpus) -> list[Case]:
    bound = corpus.spec.bound
    cases: list[Case] = []
    for s in corpus.simplicial:
        cases.append((f"{s.name}♭", lambda s=s: _separated(flat(s), f"{s.name}♭")))
        cases.append((f"{s.name}♯", lambda s=s: _separated(sharp(s), f"{s.name}♯")))
    for m in corpus.marked:
        cases.append((m.name, lambda m=m: _separated(m, m.name)))
    for x in corpus.bisimplicial:
        cases.append(
            (f"t+!({x.name}♭)", lambda x=x: _separated(tau_plus_lower(flat(x), bound).presheaf, f"t+!({x.name}♭)"))
        )
    if cases:
        cases.append(("non-separated", _rejects_non_separated))
    return cases


def _rejects_non_separated() -> CheckReport:
    r = is_separated(non_separated_sample())
    if r.fails:
        return holds("rejects_non_separated", ("exact",), witness=r.witness)
    return fails("rejects_non_separated", {"accepted": r.to_dict()}, ("exact",))


def describe_suites() -> dict[str, str]:
    return {name: SUITES[name].definition for name in suite_names()}
