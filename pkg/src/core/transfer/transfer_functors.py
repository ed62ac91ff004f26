"""Các hàm tử chuyển giữa đối tượng đơn hình và song đơn hình (có/không đánh dấu).

p₁*/i₁* là kéo dài hằng và hạn chế về cột 0; t_! là mở rộng Kan trái của
t(n, m) = Δ[n] × J[m] (bản có đánh dấu dùng τ(n) × Δ[m]♯), tính theo từng level
bằng thương của tập phần tử; t^! là Hom(t(n, m), S) dựng bằng hom_presheaf.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import Enum
from itertools import product as cartesian
from typing import Callable, Hashable, Optional, Sequence

from core.config.defaults import TRANSFER_BOUND
from core.hom.hom_engine import HomPresheaf, HomSet, enumerate_hom, find_isomorphism, hom_presheaf
from core.marked.marked_objects import flat, forget, sharp
from core.presheaf.operators import Operator, act, codegeneracy, coface, compose, identity, monotone_maps
from core.presheaf.ops import column, common_bound, product, prolong_first, quotient_presheaf, truncate
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, components_key, shift
from core.presheaf.shape import IndexShape
from core.report.check_report import CheckReport, conjunction, fails, holds, inconclusive
from core.standard.objects import groupoid_nerve, standard_simplex
from core.types.cell_types import CellId, Level, level_key
from core.types.errors import MissingCertificateError, ShapeMismatchError

logger = logging.getLogger(__name__)


class TransferTag(Enum):
    P1_STAR = "p1*"
    I1_STAR = "i1*"
    T_LOWER = "t!"
    T_UPPER = "t^!"
    P_PLUS_STAR = "p+*"
    I_PLUS_STAR = "i+*"
    TAU_PLUS_LOWER = "t+!"
    TAU_PLUS_UPPER = "t+^!"
    FLAT_PROLONG = "flat"
    FORGET_PROLONG = "forget"

    @staticmethod
    def parse(text: str) -> "TransferTag":
        for tag in TransferTag:
            if tag.value == text.strip() or tag.name.lower() == text.strip().lower():
                return tag
        raise ValueError(f"unknown transfer functor: {text!r}")

    @property
    def source_shape(self) -> IndexShape:
        return {
            TransferTag.P1_STAR: IndexShape.SIMPLEX,
            TransferTag.I1_STAR: IndexShape.BISIMPLEX,
            TransferTag.T_LOWER: IndexShape.BISIMPLEX,
            TransferTag.T_UPPER: IndexShape.SIMPLEX,
            TransferTag.P_PLUS_STAR: IndexShape.MARKED_SIMPLEX,
            TransferTag.I_PLUS_STAR: IndexShape.MARKED_BISIMPLEX,
            TransferTag.TAU_PLUS_LOWER: IndexShape.MARKED_BISIMPLEX,
            TransferTag.TAU_PLUS_UPPER: IndexShape.MARKED_SIMPLEX,
            TransferTag.FLAT_PROLONG: IndexShape.BISIMPLEX,
            TransferTag.FORGET_PROLONG: IndexShape.MARKED_BISIMPLEX,
        }[self]


# Mở rộng Kan trái
Element = tuple[Level, CellId, tuple[Operator, Operator]]


@dataclass
class LeftKanExtension:
    """t_!X cùng bảng phần tử ((n, m), u, (a, b)) -> ô đại diện ở từng level (k,)."""

    presheaf: TruncatedPresheaf
    reps: dict[Level, dict[Hashable, Hashable]]
    source: TruncatedPresheaf

    def cell(self, k: int, level: Level, u: CellId, a: Operator, b: Operator) -> CellId:
        return self.reps[(k,)][(tuple(level), u, (a, b))]


def _second_factor(marked: bool) -> Callable[[int, int], Sequence[Operator]]:
    """Ô level k của J[m] (mọi bộ) hoặc của Δ[m] (bộ đơn điệu)."""
    if marked:
        return lambda k, m: monotone_maps(k, m)
    return lambda k, m: list(cartesian(range(m + 1), repeat=k + 1))


def _left_kan(x: TruncatedPresheaf, bound: int, marked: bool) -> LeftKanExtension:
    second = _second_factor(marked)
    elements: dict[Level, list[Element]] = {}
    relations: dict[Level, list[tuple[Element, Element]]] = {}
    for k in range(bound + 1):
        elems: list[Element] = []
        rels: list[tuple[Element, Element]] = []
        for level in x.levels():
            n, m = level
            for u in x.cells(level):
                elems.extend((level, u, (a, b)) for a in monotone_maps(k, n) for b in second(k, m))
            # (X(θ)u, c) ~ (u, t(θ)c) cho θ chạy qua coface và codegeneracy
            for d, i in x.face_keys(level):
                lower = shift(level, d, -1)
                theta = coface(level[d], i)
                for u in x.cells(level):
                    du = x.face(level, d, i, u)
                    for a in monotone_maps(k, lower[0]):
                        for b in second(k, lower[1]):
                            image = (compose(theta, a), b) if d == 0 else (a, compose(theta, b))
                            rels.append(((lower, du, (a, b)), (level, u, image)))
            for d, i in x.degeneracy_keys(level):
                upper = shift(level, d, +1)
                theta = codegeneracy(level[d], i)
                for u in x.cells(level):
                    su = x.degeneracy(level, d, i, u)
                    for a in monotone_maps(k, upper[0]):
                        for b in second(k, upper[1]):
                            image = (compose(theta, a), b) if d == 0 else (a, compose(theta, b))
                            rels.append(((upper, su, (a, b)), (level, u, image)))
        elements[(k,)] = elems
        relations[(k,)] = rels

    def face_fn(lv: Level, d: int, i: int, e: Element) -> Element:
        level, u, (a, b) = e
        return level, u, (a[:i] + a[i + 1:], b[:i] + b[i + 1:])

    def degeneracy_fn(lv: Level, d: int, i: int, e: Element) -> Element:
        level, u, (a, b) = e
        return level, u, (a[: i + 1] + a[i:], b[: i + 1] + b[i:])

    marks = None
    if marked and bound >= 1:
        plus = {level for level in x.plus_levels()}
        marks = {
            (1,): [
                e
                for e in elements[(1,)]
                if e[2][0][0] == e[2][0][1] or (e[0] in plus and x.is_marked(e[0], e[1]))
            ]
        }
    shape = IndexShape.MARKED_SIMPLEX if marked else IndexShape.SIMPLEX
    label = "t+!" if marked else "t!"
    presheaf, reps = quotient_presheaf(
        shape, (bound,), elements, relations, face_fn, degeneracy_fn, marked=marks, name=f"{label}{x.name}"
    )
    return LeftKanExtension(presheaf, reps, x)


def t_lower(x: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> LeftKanExtension:
    """t_!X: phần tử ((n, m), u ∈ X_{n,m}, (a, b) ∈ Δ[n]_k × J[m]_k) modulo quan hệ coend."""
    if x.shape is not IndexShape.BISIMPLEX:
        raise ShapeMismatchError(f"t_! expects an unmarked bisimplicial object, got {x.shape.value}")
    return _left_kan(x, bound, marked=False)


def tau_plus_lower(x: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> LeftKanExtension:
    """(t⁺)_!X với τ(n) × Δ[m]♯; cạnh đánh dấu đến từ a suy biến hoặc từ ô đánh dấu ở (1, m)."""
    if x.shape is not IndexShape.MARKED_BISIMPLEX:
        raise ShapeMismatchError(f"(t+)_! expects a marked bisimplicial object, got {x.shape.value}")
    return _left_kan(x, bound, marked=True)


# Hàm tử phải
def _require_certificate(y: TruncatedPresheaf, label: str) -> int:
    if y.cosk is None:
        raise MissingCertificateError(f"{label} needs a coskeletality certificate on {y.name}")
    return y.cosk


def source_bound(y: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> int:
    """Cận dựng Δ[n] × J[m]: đủ chứng chỉ của y và không vượt cận của y."""
    return min(y.bound[0], max(bound, y.cosk or 0))


def _transport(theta: Sequence[Operator], level: Level, cell: CellId) -> CellId:
    a, b = cell
    return compose(theta[0], a), compose(theta[1], b)


def t_upper(y: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> HomPresheaf:
    """(t^!S)_{n,m} = Hom(Δ[n] × J[m], S), cấu trúc bởi tiền hợp thành."""
    if y.shape is not IndexShape.SIMPLEX:
        raise ShapeMismatchError(f"t^! expects an unmarked simplicial set, got {y.shape.value}")
    cert = _require_certificate(y, "t^!")
    w = source_bound(y, bound)
    sources = {
        (n, m): product(standard_simplex(n, w), groupoid_nerve(m, w))
        for n in range(bound + 1)
        for m in range(bound + 1)
    }
    return hom_presheaf(
        IndexShape.BISIMPLEX, (bound, bound), lambda level: sources[tuple(level)], _transport, y,
        name=f"t^!{y.name}", cosk=cert,
    )


def tau_plus_upper(y: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> HomPresheaf:
    """((t⁺)^!M)_{n,m} = Hom⁺(Δ[n]♭ × Δ[m]♯, M); đánh dấu ở (1, m) là Hom⁺(Δ[1]♯ × Δ[m]♯, M)."""
    if y.shape is not IndexShape.MARKED_SIMPLEX:
        raise ShapeMismatchError(f"(t+)^! expects a marked simplicial set, got {y.shape.value}")
    cert = _require_certificate(y, "(t+)^!")
    w = source_bound(y, bound)
    sources = {
        (n, m): product(flat(standard_simplex(n, w)), sharp(standard_simplex(m, w)))
        for n in range(bound + 1)
        for m in range(bound + 1)
    }
    plus_sources = {
        (1, m): product(sharp(standard_simplex(1, w)), sharp(standard_simplex(m, w))) for m in range(bound + 1)
    }
    return hom_presheaf(
        IndexShape.MARKED_BISIMPLEX, (bound, bound), lambda level: sources[tuple(level)], _transport, y,
        name=f"t+^!{y.name}", plus_source_at=lambda level: plus_sources[tuple(level)], cosk=cert,
    )


def apply(tag: TransferTag, x: TruncatedPresheaf, bound: Optional[int] = None) -> TruncatedPresheaf:
    """Áp dụng hàm tử chuyển; bound là cận hướng mới (p*) hoặc cận đầu ra (t_!, t^!)."""
    if x.shape is not tag.source_shape:
        raise ShapeMismatchError(f"{tag.value} expects {tag.source_shape.value}, got {x.shape.value}")
    started = time.perf_counter_ns()
    if tag in (TransferTag.P1_STAR, TransferTag.P_PLUS_STAR):
        out = prolong_first(x, x.bound[0] if bound is None else bound)
    elif tag in (TransferTag.I1_STAR, TransferTag.I_PLUS_STAR):
        out = column(x, 0, name=f"i1*{x.name}")
    elif tag is TransferTag.T_LOWER:
        out = t_lower(x, TRANSFER_BOUND if bound is None else bound).presheaf
    elif tag is TransferTag.TAU_PLUS_LOWER:
        out = tau_plus_lower(x, TRANSFER_BOUND if bound is None else bound).presheaf
    elif tag is TransferTag.T_UPPER:
        out = t_upper(x, TRANSFER_BOUND if bound is None else bound).presheaf
    elif tag is TransferTag.TAU_PLUS_UPPER:
        out = tau_plus_upper(x, TRANSFER_BOUND if bound is None else bound).presheaf
    elif tag is TransferTag.FLAT_PROLONG:
        out = flat(x)
    else:
        out = forget(x)
    logger.info(
        "[Transfer] tag=%s input=%s counts=%s elapsed_us=%d",
        tag.value, x.name, {level_key(lv): c for lv, c in out.counts().items()},
        (time.perf_counter_ns() - started) // 1000,
    )
    return out


# Kiểm tra phép kề
ADJUNCTIONS = ("t!/t^!", "p1*/i1*", "flat/forget", "forget/sharp", "t+!/t+^!", "p+*/i+*")

Transpose = Callable[[PresheafMap], Optional[PresheafMap]]


def _bijection_report(
    check: str, left: HomSet, right: HomSet, down: Transpose, up: Transpose, **details
) -> CheckReport:
    """left = Hom(L x, y), right = Hom(x, R y); down: right -> left, up: left -> right."""
    left_keys, right_keys = set(left.keys()), set(right.keys())
    flags = tuple(sorted({left.exactness, right.exactness}))
    counts = {"left": len(left), "right": len(right), **details}
    for phi in right:
        psi = down(phi)
        if psi is None or psi.defect() is not None or psi.key() not in left_keys:
            return fails(check, {"direction": "right->left", "map": repr(phi)}, flags, **counts)
        back = up(psi)
        if back is None or back.key() != phi.key():
            return fails(check, {"direction": "round-trip right", "map": repr(phi)}, flags, **counts)
    for psi in left:
        phi = up(psi)
        if phi is None or phi.defect() is not None or phi.key() not in right_keys:
            return fails(check, {"direction": "left->right", "map": repr(psi)}, flags, **counts)
        back = down(phi)
        if back is None or back.key() != psi.key():
            return fails(check, {"direction": "round-trip left", "map": repr(psi)}, flags, **counts)
    if all(flag.startswith("exact") for flag in flags):
        return holds(check, flags, **counts)
    return inconclusive(check, flags, reason="bijection between truncated hom sets", **counts)


def _kan_transposes(ext: LeftKanExtension, hom: HomPresheaf, x: TruncatedPresheaf, y: TruncatedPresheaf):
    def down(phi: PresheafMap) -> Optional[PresheafMap]:
        comps: dict[Level, dict] = {}
        for level, table in ext.reps.items():
            comp = comps.setdefault(level, {})
            for (lv, u, cell), rep in table.items():
                value = hom.element(lv, phi(lv, u))(level, cell)
                if comp.setdefault(rep, value) != value:
                    return None
        return PresheafMap(ext.presheaf, y, comps)

    def up(psi: PresheafMap) -> Optional[PresheafMap]:
        comps: dict[Level, dict] = {}
        for level in x.levels():
            src = hom.sources[level]
            comps[level] = {}
            for u in x.cells(level):
                restricted = {
                    lv: {cell: psi(lv, ext.reps[lv][(level, u, cell)]) for cell in src.cells(lv)}
                    for lv in src.levels()
                }
                k = hom.index_of(level, components_key(restricted))
                if k is None:
                    return None
                comps[level][u] = k
        return PresheafMap(x, hom.presheaf, comps)

    return down, up


def _verify_kan(
    check: str, x: TruncatedPresheaf, y: TruncatedPresheaf, marked: bool, upper: Optional[HomPresheaf] = None
) -> CheckReport:
    hom = upper if upper is not None else (tau_plus_upper(y) if marked else t_upper(y))
    b = tuple(min(a, c) for a, c in zip(x.bound, hom.presheaf.bound))
    xt = truncate(x, b)
    w = source_bound(y)
    ext = tau_plus_lower(xt, w) if marked else t_lower(xt, w)
    left = enumerate_hom(ext.presheaf, y)
    right = enumerate_hom(xt, hom.presheaf)
    down, up = _kan_transposes(ext, hom, xt, y)
    return _bijection_report(check, left, right, down, up, source_bound=w)


def _verify_prolong(check: str, s: TruncatedPresheaf, x: TruncatedPresheaf) -> CheckReport:
    st = truncate(s, min(s.bound[0], x.bound[0]))
    lifted = prolong_first(st, x.bound[1])
    col = column(x, 0)
    left = enumerate_hom(lifted, x)
    right = enumerate_hom(st, col)

    def down(psi: PresheafMap) -> PresheafMap:
        comps = {
            (k, l): {c: act(x, (k, 0), psi((k,), c), (identity(k), (0,) * (l + 1)))[1] for c in st.cells((k,))}
            for (k, l) in lifted.levels()
        }
        return PresheafMap(lifted, x, comps)

    def up(phi: PresheafMap) -> PresheafMap:
        comps = {(k,): {c: phi((k, 0), c) for c in st.cells((k,))} for (k,) in st.levels()}
        return PresheafMap(st, col, comps)

    return _bijection_report(check, left, right, down, up)


def _verify_same_cells(check: str, left: HomSet, right: HomSet, left_source, left_target, right_source, right_target):
    """flat ⊣ forget ⊣ sharp: chuyển vị là đồng nhất trên thành phần."""

    def down(phi: PresheafMap) -> PresheafMap:
        return PresheafMap(left_source, left_target, phi.components())

    def up(psi: PresheafMap) -> PresheafMap:
        return PresheafMap(right_source, right_target, psi.components())

    return _bijection_report(check, left, right, down, up)


def _verify_marking(check: str, pair: str, x: TruncatedPresheaf, y: TruncatedPresheaf) -> CheckReport:
    if pair == "flat/forget":
        fx, uy = flat(x), forget(y)
        return _verify_same_cells(check, enumerate_hom(fx, y), enumerate_hom(x, uy), fx, y, x, uy)
    ux, sy = forget(x), sharp(y)
    return _verify_same_cells(check, enumerate_hom(ux, y), enumerate_hom(x, sy), ux, y, x, sy)


def verify_adjunction(
    pair: str, x: TruncatedPresheaf, y: TruncatedPresheaf, upper: Optional[HomPresheaf] = None
) -> CheckReport:
    """Hom(Lx, y) ≅ Hom(x, Ry) bằng chuyển vị hai chiều, kiểm tra là song ánh nghịch đảo nhau.

    upper: t^!y (hoặc t⁺^!y) đã dựng sẵn ở cận mặc định, dùng lại khi kiểm tra nhiều x với cùng y.
    """
    started = time.perf_counter_ns()
    check = f"adjunction[{pair}]"
    if pair == "t!/t^!":
        report = _verify_kan(check, x, y, marked=False, upper=upper)
    elif pair == "t+!/t+^!":
        report = _verify_kan(check, x, y, marked=True, upper=upper)
    elif pair in ("p1*/i1*", "p+*/i+*"):
        if (pair == "p+*/i+*") != x.shape.marked:
            raise ShapeMismatchError(f"{pair} expects {'marked' if pair == 'p+*/i+*' else 'unmarked'} objects")
        report = _verify_prolong(check, x, y)
    elif pair in ("flat/forget", "forget/sharp"):
        b = common_bound(x, y)
        x, y = truncate(x, b), truncate(y, b)
        report = _verify_marking(check, pair, x, y)
    else:
        raise ValueError(f"unknown adjunction {pair!r}; expected one of {', '.join(ADJUNCTIONS)}")
    logger.info(
        "[Adjunction] pair=%s x=%s y=%s left=%s right=%s verdict=%s elapsed_us=%d",
        pair, x.name, y.name, report.details.get("left"), report.details.get("right"), report.verdict.value,
        (time.perf_counter_ns() - started) // 1000,
    )
    return report


# Đồng nhất hợp thành
def _iso_report(check: str, a: TruncatedPresheaf, b: TruncatedPresheaf) -> CheckReport:
    if find_isomorphism(a, b) is not None:
        return holds(check, ("exact",), left=a.name, right=b.name)
    return fails(check, {"left": a.name, "right": b.name, "left_counts": a.nondegenerate_counts(),
                         "right_counts": b.nondegenerate_counts()}, ("exact",))


def composite_identities(s: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> CheckReport:
    """t_!p₁* ≅ id, (t⁺)_!(p⁺)* ≅ id và p₁*(S)♭ ≅ (p⁺)*(S♭) cho một đối tượng đơn hình."""
    k = min(bound, s.bound[0])
    st = truncate(forget(s) if s.shape.marked else s, k)
    marked = truncate(s, k) if s.shape.marked else flat(st)
    reports = [
        _iso_report(f"t!p1*[{s.name}]", t_lower(prolong_first(st, 1), k).presheaf, st),
        _iso_report(f"t+!p+*[{s.name}]", tau_plus_lower(prolong_first(marked, 1), k).presheaf, marked),
        _iso_report(f"flat-square[{s.name}]", flat(prolong_first(st, 1)), prolong_first(flat(st), 1)),
    ]
    return conjunction(f"composite_identities[{s.name}]", reports)


def composite_identity_suite(corpus: Sequence[TruncatedPresheaf], bound: int = TRANSFER_BOUND) -> CheckReport:
    reports = [composite_identities(s, bound) for s in corpus]
    report = conjunction("composite_identity_suite", reports, objects=len(reports))
    logger.info("[Composite] objects=%d verdict=%s", len(reports), report.verdict.value)
    return report


def marked_composite_identity(m: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> CheckReport:
    """(t⁺)_!(p⁺)*M ≅ M cho M có đánh dấu tùy ý (kể cả Δ[1]♯)."""
    if not m.shape.marked or m.shape.directions != 1:
        raise ShapeMismatchError("marked_composite_identity expects a marked simplicial set")
    mt = truncate(m, min(bound, m.bound[0]))
    return _iso_report(f"t+!p+*[{m.name}]", tau_plus_lower(prolong_first(mt, 1), mt.bound[0]).presheaf, mt)


# So sánh và kiểm tra điểm
def tcompare(x: TruncatedPresheaf, bound: int = TRANSFER_BOUND) -> dict:
    """Số ô của (t⁺)_!(X♭) và (t_!X)♭; không khẳng định đồng nhất nào."""
    plus_side = tau_plus_lower(flat(x), bound).presheaf
    plain_side = flat(t_lower(x, bound).presheaf)
    return {
        "t+!(X♭)": {level_key(lv): c for lv, c in plus_side.nondegenerate_counts().items()},
        "(t!X)♭": {level_key(lv): c for lv, c in plain_side.nondegenerate_counts().items()},
        "t+!(X♭) marked": len(plus_side.markings((1,))) if bound >= 1 else 0,
        "(t!X)♭ marked": len(plain_side.markings((1,))) if bound >= 1 else 0,
        "isomorphic": find_isomorphism(plus_side, plain_side) is not None,
    }


def enriched_spot_check(s: TruncatedPresheaf, t: TruncatedPresheaf) -> CheckReport:
    """|Hom(S, T)| = |t^!(T^S)_{0,0}| so với |Hom(t^!S, t^!T)| = |((t^!T)^{t^!S})_{0,0}|."""
    check = "enriched_spot_check"
    direct = enumerate_hom(s, t)
    transferred = enumerate_hom(t_upper(s).presheaf, t_upper(t).presheaf)
    details = {"hom": len(direct), "transferred_hom": len(transferred)}
    flags = tuple(sorted({direct.exactness, transferred.exactness}))
    if len(direct) == len(transferred):
        return holds(check, flags, **details)
    return inconclusive(check, flags, reason="cardinalities differ at level (0,0)", **details)
