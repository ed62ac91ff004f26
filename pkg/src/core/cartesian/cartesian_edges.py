"""Join, slice, cạnh p-Cartesian, phân thớ Cartesian và đánh dấu tự nhiên.

T_{/y} (K = Δ[0]) có n-ô là các (n+1)-ô của T với đỉnh cuối y; T_{/f} (K = Δ[1]) có
n-ô là các (n+2)-ô với cạnh cuối f. Cạnh f: x -> y là p-Cartesian khi ánh xạ so sánh
T_{/f} -> S_{/p(f)} ×_{S_{/p(y)}} T_{/y} là phân thớ Kan tầm thường.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from core.config.defaults import lift_cap, trivial_cap
from core.lifting.lifting import FibrationClass, has_rlp
from core.marked.marked_objects import sharp
from core.presheaf.operators import act
from core.presheaf.ops import column, pullback
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, presheaf_from_function
from core.presheaf.shape import IndexShape
from core.report.check_report import CheckReport, conjunction, fails, holds, inconclusive
from core.types.cell_types import CellId, sorted_cells
from core.types.errors import (
    BoundExceededError,
    IllegalSpecError,
    NotCartesianFibrationError,
    NotInnerFibrationError,
    ShapeMismatchError,
)

logger = logging.getLogger(__name__)


def _require_simplicial(*xs: TruncatedPresheaf) -> None:
    for x in xs:
        if x.shape is not IndexShape.SIMPLEX:
            raise ShapeMismatchError(f"{x.name} must be a simplicial set, got {x.shape.value}")


def join(a: TruncatedPresheaf, b: TruncatedPresheaf, bound: Optional[int] = None) -> TruncatedPresheaf:
    """a ⋆ b: ô ("L", x), ("R", y) và ("J", i, x, y) với x ∈ a_i, y ∈ b_j, i + j = n - 1."""
    _require_simplicial(a, b)
    top = min(a.bound[0], b.bound[0])
    bound = top if bound is None else bound
    if bound > top:
        raise BoundExceededError(f"join needs both factors through level {bound}")
    cells: dict = {}
    for n in range(bound + 1):
        level = [("L", x) for x in a.cells((n,))] + [("R", y) for y in b.cells((n,))]
        for i in range(n):
            level.extend(("J", i, x, y) for x in a.cells((i,)) for y in b.cells((n - 1 - i,)))
        cells[(n,)] = level

    def face(lv, d, k, c):
        n = lv[0]
        if c[0] == "L":
            return "L", a.face(lv, 0, k, c[1])
        if c[0] == "R":
            return "R", b.face(lv, 0, k, c[1])
        _, i, x, y = c
        j = n - 1 - i
        if k <= i:
            return ("R", y) if i == 0 else ("J", i - 1, a.face((i,), 0, k, x), y)
        return ("L", x) if j == 0 else ("J", i, x, b.face((j,), 0, k - i - 1, y))

    def degeneracy(lv, d, k, c):
        n = lv[0]
        if c[0] == "L":
            return "L", a.degeneracy(lv, 0, k, c[1])
        if c[0] == "R":
            return "R", b.degeneracy(lv, 0, k, c[1])
        _, i, x, y = c
        if k <= i:
            return "J", i + 1, a.degeneracy((i,), 0, k, x), y
        return "J", i, x, b.degeneracy((n - 1 - i,), 0, k - i - 1, y)

    dimension = None
    if a.dimension is not None and b.dimension is not None:
        dimension = (a.dimension[0] + b.dimension[0] + 1,)
    return presheaf_from_function(
        IndexShape.SIMPLEX, bound, cells, face, degeneracy, name=f"({a.name}⋆{b.name})", dimension=dimension
    )


@dataclass
class SliceObject:
    """T_{/q} với q là đỉnh (k = 0) hoặc cạnh (k = 1) của T."""

    base: TruncatedPresheaf
    q: CellId
    k: int
    presheaf: TruncatedPresheaf

    def ambient_level(self, n: int) -> tuple[int]:
        return (n + self.k + 1,)

    def restriction(self, n: int, cell: CellId) -> CellId:
        """Hạn chế của n-ô về K (phải bằng q)."""
        top = n + self.k + 1
        return act(self.base, (top,), cell, (tuple(range(n + 1, top + 1)),))[1]


def slice_object(t: TruncatedPresheaf, q: CellId, k: int = 0, bound: Optional[int] = None) -> SliceObject:
    """Slice T_{/q} tính tới cận t.bound - k - 1 (hoặc bound nhỏ hơn)."""
    _require_simplicial(t)
    if k not in (0, 1):
        raise IllegalSpecError(f"slices are built over Δ[0] or Δ[1], not Δ[{k}]")
    if not t.contains((k,), q):
        raise IllegalSpecError(f"{q!r} is not a {k}-cell of {t.name}")
    top = t.bound[0] - k - 1
    bound = top if bound is None else min(bound, top)
    if bound < 0:
        raise BoundExceededError(f"{t.name} (bound {t.bound}) is too short for a slice over a {k}-cell")
    tail = lambda n: (tuple(range(n + 1, n + k + 2)),)  # noqa: E731
    cells = {
        (n,): [s for s in t.cells((n + k + 1,)) if act(t, (n + k + 1,), s, tail(n))[1] == q]
        for n in range(bound + 1)
    }
    presheaf = presheaf_from_function(
        IndexShape.SIMPLEX,
        bound,
        cells,
        lambda lv, d, i, s: t.face((lv[0] + k + 1,), 0, i, s),
        lambda lv, d, i, s: t.degeneracy((lv[0] + k + 1,), 0, i, s),
        cosk=t.cosk,
        name=f"{t.name}/{q!r}",
    )
    return SliceObject(t, q, k, presheaf)


def slice_map(p: PresheafMap, upper: SliceObject, lower: SliceObject) -> PresheafMap:
    """p_*: T_{/q} -> S_{/p(q)}."""
    comps = {
        (n,): {s: p(upper.ambient_level(n), s) for s in upper.presheaf.cells((n,))}
        for (n,) in upper.presheaf.levels()
    }
    return PresheafMap(upper.presheaf, lower.presheaf, comps)


def _edge_target(t: TruncatedPresheaf, f: CellId) -> CellId:
    return t.face((1,), 0, 0, f)


@dataclass
class Comparison:
    """Ánh xạ so sánh T_{/f} -> S_{/p(f)} ×_{S_{/p(y)}} T_{/y}."""

    edge: CellId
    map: PresheafMap
    over_edge: SliceObject
    over_target: SliceObject


def comparison_map(p: PresheafMap, f: CellId) -> Comparison:
    t, s = p.source, p.target
    y = _edge_target(t, f)
    bound = min(t.bound[0], s.bound[0]) - 2
    if bound < 0:
        raise BoundExceededError(f"p-Cartesian checks need bound >= 2, got {t.bound} and {s.bound}")
    t_f = slice_object(t, f, 1, bound)
    t_y = slice_object(t, y, 0, bound)
    s_f = slice_object(s, p((1,), f), 1, bound)
    s_y = slice_object(s, p((0,), y), 0, bound)
    # đỉnh n+1 là nguồn của f: bỏ nó để đi từ T_{/f} về T_{/y}
    forget_source = lambda sl, target: PresheafMap(  # noqa: E731
        sl.presheaf,
        target.presheaf,
        {(n,): {c: sl.base.face((n + 2,), 0, n + 1, c) for c in sl.presheaf.cells((n,))} for (n,) in sl.presheaf.levels()},
    )
    s_f_to_s_y = forget_source(s_f, s_y)
    p_y = slice_map(p, t_y, s_y)
    fiber, _, _ = pullback(s_f_to_s_y, p_y, name="S/p(f)×T/y")
    comps = {
        (n,): {c: (p((n + 2,), c), t.face((n + 2,), 0, n + 1, c)) for c in t_f.presheaf.cells((n,))}
        for (n,) in t_f.presheaf.levels()
    }
    return Comparison(f, PresheafMap(t_f.presheaf, fiber, comps), t_f, t_y)


def require_inner_fibration(p: PresheafMap, cap: Optional[int] = None) -> CheckReport:
    report = has_rlp(p, FibrationClass.INNER, cap)
    if report.fails:
        raise NotInnerFibrationError(f"{p.source.name} -> {p.target.name} is not an inner fibration: {report.witness}")
    return report


def is_p_cartesian(
    p: PresheafMap, f: CellId, cap: Optional[int] = None, check_inner: bool = True
) -> CheckReport:
    """Cạnh f của T là p-Cartesian khi ánh xạ so sánh có RLP với ∂Δ[n] -> Δ[n], n <= cap."""
    _require_simplicial(p.source, p.target)
    check = "is_p_cartesian"
    if check_inner:
        require_inner_fibration(p)
    comparison = comparison_map(p, f)
    cap = trivial_cap() if cap is None else cap
    report = has_rlp(comparison.map, FibrationClass.TRIVIAL_KAN, cap)
    details = {"edge": f, "slice_cells": comparison.over_edge.presheaf.total_nondegenerate(), **report.details}
    if report.fails:
        return fails(check, {"edge": f, "square": report.witness}, report.exactness, **details)
    if report.inconclusive:
        return inconclusive(check, report.exactness, witness={"edge": f}, **details)
    return holds(check, report.exactness, **details)


def cartesian_edges(
    p: PresheafMap, cap: Optional[int] = None, workers: int = 1, check_inner: bool = True
) -> tuple[frozenset, tuple[str, ...]]:
    """Các cạnh p-Cartesian cùng các cờ chính xác gộp lại (cạnh inconclusive không được tính)."""
    if check_inner:
        require_inner_fibration(p)
    edges = p.source.cells((1,))
    check = lambda e: is_p_cartesian(p, e, cap, check_inner=False)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(check, edges))
    else:
        reports = [check(e) for e in edges]
    flags = tuple(sorted({flag for r in reports for flag in r.exactness}))
    found = frozenset(e for e, r in zip(edges, reports) if r.holds)
    if any(r.inconclusive for r in reports):
        flags = flags + ("some-edges-inconclusive",)
    logger.debug("[Cartesian] total=%s edges=%d cartesian=%d", p.source.name, len(edges), len(found))
    return found, flags


def _cartesian_fibration(
    p: PresheafMap, cap: Optional[int], trivial: Optional[int], workers: int
) -> tuple[CheckReport, frozenset]:
    _require_simplicial(p.source, p.target)
    check = "is_cartesian_fibration"
    t, s = p.source, p.target
    inner = has_rlp(p, FibrationClass.INNER, lift_cap() if cap is None else cap)
    if inner.fails:
        return fails(check, {"part": "inner", "witness": inner.witness}, inner.exactness), frozenset()
    marked, flags = cartesian_edges(p, trivial, workers, check_inner=False)
    lifts: list[CheckReport] = [inner]
    for e in s.cells((1,)):
        b = _edge_target(s, e)
        for y in t.cells((0,)):
            if p((0,), y) != b:
                continue
            over = [f for f in t.cells((1,)) if p((1,), f) == e and _edge_target(t, f) == y]
            if not any(f in marked for f in over):
                witness = {"edge": e, "vertex": y, "lifts": sorted_cells(over)}
                if "some-edges-inconclusive" in flags and over:
                    lifts.append(inconclusive("cartesian_lift", flags, witness=witness))
                    continue
                return fails(check, witness, flags, cartesian_edges=len(marked)), marked
    lifts.append(holds("cartesian_lifts", flags))
    return conjunction(check, lifts, cartesian_edges=len(marked)), marked


def is_cartesian_fibration(
    p: PresheafMap, cap: Optional[int] = None, trivial: Optional[int] = None, workers: int = 1
) -> CheckReport:
    """Phân thớ trong và mọi cạnh e: a -> b của S, mọi đỉnh ỹ trên b có nâng p-Cartesian kết thúc tại ỹ."""
    return _cartesian_fibration(p, cap, trivial, workers)[0]


def natural_marking(p: PresheafMap, cap: Optional[int] = None, trivial: Optional[int] = None) -> PresheafMap:
    """(T, cạnh Cartesian) -> S♯; ném lỗi nếu p không là phân thớ Cartesian."""
    report, edges = _cartesian_fibration(p, cap, trivial, 1)
    if report.fails:
        raise NotCartesianFibrationError(f"{p.source.name} -> {p.target.name}: {report.witness}")
    if report.inconclusive:
        logger.warning("[Cartesian] natural marking of %s built on an inconclusive check", p.source.name)
    marked = p.source.with_markings({(1,): edges | p.source.degenerate_edges()}).renamed(f"{p.source.name}♮")
    return PresheafMap(marked, sharp(p.target), p.components(), validate=True)


def cartesian_edges_first_column(p: PresheafMap, cap: Optional[int] = None) -> frozenset:
    """Cạnh p-Cartesian của ánh xạ song đơn hình, đọc qua hạn chế về cột thứ 0 (i₁*)."""
    if p.source.shape is not IndexShape.BISIMPLEX:
        raise ShapeMismatchError("expects a map of bisimplicial sets")
    src, tgt = column(p.source, 0), column(p.target, 0)
    restricted = PresheafMap(
        src, tgt, {(k,): {c: p((k, 0), c) for c in src.cells((k,))} for (k,) in src.levels()}
    )
    return cartesian_edges(restricted, cap)[0]
