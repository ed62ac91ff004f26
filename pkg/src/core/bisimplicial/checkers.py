"""Kiểm tra phân thớ song đơn hình trong chế độ rời rạc (và chế độ nhóm phỏng).

Hướng 0 là hướng Segal, hướng 1 là hướng "không gian". Các điều kiện tương đương yếu
của không gian được thay bằng song ánh khi mọi thớ liên quan rời rạc, hoặc bằng tương
đương nhóm phỏng (π₀ song ánh và song ánh trên tập cạnh) khi thớ là nerve của nhóm phỏng.
Khi không xác nhận được chế độ nào, mọi kiểm tra trả inconclusive.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from core.config.defaults import CYLINDER_BUDGET
from core.hom.hom_engine import HomPresheaf, hom_presheaf
from core.lifting.homotopy import HomotopyCategory
from core.lifting.lifting import FibrationClass, has_rlp
from core.presheaf.operators import Operator, act, compose
from core.presheaf.ops import (
    common_bound,
    coskeletal_defect,
    inclusion,
    is_constant_in,
    product,
    prolong_first,
    prolong_second,
    require_constant,
    row,
    subpresheaf,
)
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, components_key
from core.presheaf.shape import IndexShape
from core.presheaf.union_find import UnionFind
from core.report.check_report import CheckReport, conjunction, fails, holds, inconclusive
from core.standard.objects import StandardKind, canonical_inclusion, groupoid_nerve, obj_spec, standard_simplex
from core.types.cell_types import CellId, Level, sorted_cells
from core.types.errors import InvalidMapError, ShapeMismatchError

logger = logging.getLogger(__name__)


class Regime(Enum):
    DISCRETE = "discrete"
    GROUPOID = "groupoid"
    UNVERIFIED = "unverified"


@dataclass(frozen=True)
class DiscreteRegimeFlag:
    """Kết quả quét thớ; verified chỉ đặt sau khi quét tường minh."""

    regime: Regime
    reason: Optional[str] = None

    @property
    def verified(self) -> bool:
        return self.regime is not Regime.UNVERIFIED

    @property
    def space_levels(self) -> int:
        """Số level của không gian ánh xạ cần so sánh: 0 (tập) hoặc 1 (nhóm phỏng)."""
        return 0 if self.regime is Regime.DISCRETE else 1

    def to_dict(self) -> dict:
        return {"regime": self.regime.value, "reason": self.reason}


def _require_bisimplicial(*xs: TruncatedPresheaf) -> None:
    for x in xs:
        if x.shape is not IndexShape.BISIMPLEX:
            raise ShapeMismatchError(f"expected an unmarked bisimplicial object, got {x.shape.value} for {x.name}")


def groupoid_defect(r: TruncatedPresheaf) -> Optional[str]:
    """None nếu r (đơn hình) là nerve của một nhóm phỏng hữu hạn trong cận.

    Kiểm tra lấp duy nhất cho mọi cặp khả hợp, tính kết hợp trên mọi bộ ba và tính khả nghịch.
    """
    if r.bound[0] < 2:
        return f"{r.name} needs 2-cells to be recognised as a groupoid nerve"
    if r.bound[0] >= 3:
        defect = coskeletal_defect(r, 2)
        if defect is not None:
            return defect
    ho = HomotopyCategory(r)
    outgoing: dict[CellId, list[CellId]] = {}
    for e in ho.edges:
        outgoing.setdefault(ho.source(e), []).append(e)
    for f in ho.edges:
        for g in outgoing.get(ho.target(f), []):
            if len(ho.fillers(f, g)) != 1:
                return f"composable pair ({f!r}, {g!r}) has {len(ho.fillers(f, g))} fillers"
    for f in ho.edges:
        for g in outgoing.get(ho.target(f), []):
            gf = ho.compose(g, f)
            for h in outgoing.get(ho.target(g), []):
                if ho.compose(h, gf) != ho.compose(ho.compose(h, g), f):
                    return f"composition is not associative at ({f!r}, {g!r}, {h!r})"
    for e in ho.edges:
        if not ho.is_invertible(e):
            return f"edge {e!r} is not invertible"
    return None


def kan_row_defect(rm: PresheafMap) -> Optional[str]:
    """None khi hàng rm chắc chắn là phân thớ Kan (do đó phân thớ phải) ở mọi chiều.

    Điều kiện: đích rời rạc, nguồn mang chứng chỉ 2-coskeletal và mỗi thớ là nerve nhóm phỏng.
    """
    source, target = rm.source, rm.target
    if source.cosk is None or source.cosk > 2:
        return f"{source.name} carries no 2-coskeletal certificate"
    for level in target.levels():
        if level[0] >= 1 and any(not target.is_degenerate(level, c) for c in target.cells(level)):
            return f"{target.name} is not discrete"
    for vertex in sorted_cells(target.cells((0,))):
        defect = groupoid_defect(fiber(rm, vertex))
        if defect is not None:
            return f"fiber over {vertex!r}: {defect}"
    return None


def _fiber_regime(fiber: TruncatedPresheaf) -> tuple[Regime, Optional[str]]:
    if all(fiber.is_degenerate(level, c) for level in fiber.levels() if level[0] >= 1 for c in fiber.cells(level)):
        return Regime.DISCRETE, None
    defect = groupoid_defect(fiber)
    return (Regime.GROUPOID, None) if defect is None else (Regime.UNVERIFIED, defect)


def row_map(p: PresheafMap, k: int) -> PresheafMap:
    """Hạn chế p về hàng k: T_{k,•} -> S_{k,•}."""
    source, target = row(p.source, k), row(p.target, k)
    comps = {(l,): {c: p((k, l), c) for c in source.cells((l,))} for (l,) in source.levels()}
    return PresheafMap(source, target, comps)


def fiber(f: PresheafMap, vertex: CellId) -> TruncatedPresheaf:
    """Thớ của ánh xạ đơn hình f trên một đỉnh của đích."""
    over = {level: act(f.target, (0,), vertex, ((0,) * (level[0] + 1),))[1] for level in f.target.levels()}
    return subpresheaf(f.source, lambda lv, c: f(lv, c) == over[lv], name=f"{f.source.name}|{vertex!r}")


def scan_regime(p: PresheafMap) -> DiscreteRegimeFlag:
    """Quét mọi thớ của mọi hàng T_{k,•} -> S_{k,•} trên các đỉnh của S."""
    seen: set[Regime] = set()
    for k in range(common_bound(p.source, p.target)[0] + 1):
        rm = row_map(p, k)
        for vertex in rm.target.cells((0,)):
            regime, reason = _fiber_regime(fiber(rm, vertex))
            if regime is Regime.UNVERIFIED:
                return DiscreteRegimeFlag(regime, f"row {k} over {vertex!r}: {reason}")
            seen.add(regime)
    return DiscreteRegimeFlag(Regime.GROUPOID if Regime.GROUPOID in seen else Regime.DISCRETE)


def scan_objects(*xs: TruncatedPresheaf) -> DiscreteRegimeFlag:
    """Chế độ rời rạc cho đối tượng đứng riêng: hằng theo hướng không gian."""
    for x in xs:
        defect = is_constant_in(x, 1)
        if defect is not None:
            return DiscreteRegimeFlag(Regime.UNVERIFIED, f"{x.name}: {defect}")
    return DiscreteRegimeFlag(Regime.DISCRETE)


# Điều kiện theo hàng
def right_fib_rows(p: PresheafMap, cap: Optional[int] = None) -> CheckReport:
    """Mỗi hàng Y_{k,•} -> X_{k,•} là phân thớ phải (X hằng theo hướng thứ nhất).

    Horn được kiểm tra tới trần; hàng còn inconclusive được chứng nhận chính xác khi là
    phân thớ Kan giữa nerve nhóm phỏng và đích rời rạc.
    """
    _require_bisimplicial(p.source, p.target)
    require_constant(p.target, 0)
    reports = []
    for k in range(common_bound(p.source, p.target)[0] + 1):
        rm = row_map(p, k)
        r = has_rlp(rm, FibrationClass.RIGHT, cap)
        check = f"right_fib_row[{k}]"
        if r.inconclusive:
            defect = kan_row_defect(rm)
            if defect is None:
                reports.append(holds(check, ("exact-by-groupoid-nerve",), **r.details))
                continue
            logger.debug("[CSO] row=%d stays inconclusive: %s", k, defect)
        reports.append(CheckReport(r.verdict, check, r.witness, r.exactness, r.details))
    return conjunction("right_fib_rows", reports)


def hopullback_discrete(p: PresheafMap, n: int) -> CheckReport:
    """R_n -> X_n ×_{X_0} R_0 (dọc theo đỉnh cuối ⟨n⟩) là song ánh, trong chế độ rời rạc."""
    _require_bisimplicial(p.source, p.target)
    check = f"hopullback_discrete[{n}]"
    flag = scan_objects(p.source, p.target)
    if not flag.verified:
        return inconclusive(check, ("discreteness-unverified",), reason=flag.reason)
    r, x = p.source, p.target
    last: Operator = (n,)
    comparison: dict[tuple, CellId] = {}
    for cell in r.cells((n, 0)):
        image = (p((n, 0), cell), act(r, (n, 0), cell, (last, (0,)))[1])
        if image in comparison:
            return fails(check, {"cells": [comparison[image], cell], "image": image}, ("exact",), regime=flag.to_dict())
        comparison[image] = cell
    for xc in x.cells((n, 0)):
        base = act(x, (n, 0), xc, (last, (0,)))[1]
        for r0 in r.cells((0, 0)):
            if p((0, 0), r0) == base and (xc, r0) not in comparison:
                return fails(check, {"missing": (xc, r0)}, ("exact",), regime=flag.to_dict())
    return holds(check, ("exact",), cells=len(comparison), regime=flag.to_dict())


# Không gian ánh xạ tương đối
@dataclass
class Cylinder:
    """σ: Δ[m] -> S, dùng như K = Δ[m]ᵛ với ánh xạ cấu trúc về S."""

    m: int
    cell: CellId

    @property
    def label(self) -> str:
        return f"Δ[{self.m}]->{self.cell!r}"


def cylinders(s: TruncatedPresheaf, budget: int = CYLINDER_BUDGET) -> list[Cylinder]:
    """Đỉnh rồi cạnh không suy biến của S theo thứ tự chuẩn tắc, tối đa budget."""
    out = [Cylinder(0, c) for c in sorted_cells(s.cells((0,)))]
    if s.bound[0] >= 1:
        out += [Cylinder(1, c) for c in sorted_cells(s.nondegenerate((1,)))]
    return out[:budget]


def relative_mapping_space(
    b: TruncatedPresheaf, p: PresheafMap, sigma: Cylinder, levels: int
) -> HomPresheaf:
    """Map_{/S}(B × Δ[m]ᵛ, T)_j = Hom_{/S}(B × Δ[m]ᵛ × Δ[j]ᵛ, T), j <= levels."""
    t, base = p.source, p.target
    b0, b1 = common_bound(b, t)
    k_m = prolong_second(standard_simplex(sigma.m, b1), b0)
    sources = {
        j: product(product(b, k_m), prolong_second(standard_simplex(j, b1), b0)) for j in range(levels + 1)
    }

    def structure(j: int) -> PresheafMap:
        src = sources[j]
        comps = {
            (k, l): {
                cell: act(base, (0, sigma.m), sigma.cell, ((0,) * (k + 1), cell[0][1]))[1] for cell in src.cells((k, l))
            }
            for (k, l) in src.levels()
        }
        return PresheafMap(src, base, comps)

    structures = {j: structure(j) for j in sources}

    def transport(theta: Sequence[Operator], level: Level, cell: CellId) -> CellId:
        return cell[0], compose(theta[0], cell[1])

    return hom_presheaf(
        IndexShape.SIMPLEX,
        levels,
        lambda level: sources[level[0]],
        transport,
        t,
        name=f"Map/S({b.name}×{sigma.label},{t.name})",
        cosk=t.cosk,
        over_at=lambda level: (p, structures[level[0]]),
    )


def restriction_map(i: PresheafMap, big: HomPresheaf, small: HomPresheaf) -> PresheafMap:
    """Map(B × K, T) -> Map(A × K, T) bởi tiền hợp thành với i × id."""
    comps: dict[Level, dict] = {}
    for level in small.presheaf.levels():
        src = small.sources[level]
        comps[level] = {}
        for idx in big.presheaf.cells(level):
            f = big.element(level, idx)
            restricted = {
                lv: {cell: f(lv, ((i(lv, cell[0][0]), cell[0][1]), cell[1])) for cell in src.cells(lv)}
                for lv in src.levels()
            }
            k = small.index_of(level, components_key(restricted))
            if k is None:
                raise InvalidMapError(f"restriction along {i.source.name} -> {i.target.name} left the mapping space")
            comps[level][idx] = k
    return PresheafMap(big.presheaf, small.presheaf, comps)


def _source_target(x: TruncatedPresheaf, edge: CellId) -> tuple[CellId, CellId]:
    return x.face((1,), 0, 1, edge), x.face((1,), 0, 0, edge)


def equivalence_report(check: str, r: PresheafMap, flag: DiscreteRegimeFlag, **details) -> CheckReport:
    """Song ánh trên đỉnh (rời rạc) hoặc tương đương nhóm phỏng (π₀ và tập cạnh giữa các đỉnh)."""
    src, tgt = r.source, r.target
    vertices, targets = src.cells((0,)), tgt.cells((0,))
    if flag.regime is Regime.DISCRETE:
        images: dict[CellId, CellId] = {}
        for v in vertices:
            w = r((0,), v)
            if w in images:
                return fails(check, {"collision": [images[w], v]}, **details)
            images[w] = v
        missing = [w for w in targets if w not in images]
        if missing:
            return fails(check, {"not_hit": missing[0]}, **details)
        return holds(check, count=len(vertices), **details)
    components = {}
    for x in (src, tgt):
        uf = UnionFind(x.cells((0,)))
        for e in x.cells((1,)):
            uf.union(*_source_target(x, e))
        components[id(x)] = uf
    cs, ct = components[id(src)], components[id(tgt)]
    pi0: dict[CellId, CellId] = {}
    for v in vertices:
        image = ct.find(r((0,), v))
        root = cs.find(v)
        if pi0.setdefault(root, image) != image:
            return fails(check, {"pi0_not_well_defined": v}, **details)
    if len(set(pi0.values())) != len(pi0):
        return fails(check, {"pi0_not_injective": sorted_cells(pi0)}, **details)
    if {ct.find(w) for w in targets} != set(pi0.values()):
        return fails(check, {"pi0_not_surjective": True}, **details)
    edges_between: dict[tuple, list[CellId]] = {}
    for e in tgt.cells((1,)):
        edges_between.setdefault(_source_target(tgt, e), []).append(e)
    by_pair: dict[tuple, list[CellId]] = {}
    for e in src.cells((1,)):
        by_pair.setdefault(_source_target(src, e), []).append(e)
    for u in vertices:
        for v in vertices:
            mapped = {r((1,), e) for e in by_pair.get((u, v), [])}
            wanted = set(edges_between.get((r((0,), u), r((0,), v)), []))
            if len(mapped) != len(by_pair.get((u, v), [])) or mapped != wanted:
                return fails(check, {"edges_not_bijective": (u, v)}, **details)
    return holds(check, components=len(pi0), **details)


# Điều kiện Segal và đầy đủ
@dataclass(frozen=True)
class SegalGenerator:
    label: str
    map: PresheafMap


def segal_generators(bound: Level) -> list[SegalGenerator]:
    """G(n) -> F(n) với 2 <= n <= cận, và F(0) -> E(1)."""
    b0, b1 = bound
    out = [
        SegalGenerator(
            f"G({n})->F({n})",
            canonical_inclusion(obj_spec(StandardKind.G_GEN, n), obj_spec(StandardKind.F_GEN, n), (b0, b1)),
        )
        for n in range(2, b0 + 1)
    ]
    point = prolong_first(standard_simplex(0, b0), b1, "F(0)")
    e1 = prolong_first(groupoid_nerve(1, b0), b1, "E(1)")
    out.append(SegalGenerator("F(0)->E(1)", inclusion(point, e1)))
    return out


def _generator_report(
    gen: SegalGenerator, p: PresheafMap, sigma: Cylinder, flag: DiscreteRegimeFlag
) -> CheckReport:
    levels = flag.space_levels
    big = relative_mapping_space(gen.map.target, p, sigma, levels)
    small = relative_mapping_space(gen.map.source, p, sigma, levels)
    r = restriction_map(gen.map, big, small)
    flags = tuple(sorted(set(big.exactness) | set(small.exactness)))
    report = equivalence_report(
        f"{gen.label}@{sigma.label}", r, flag, big=len(big.presheaf.cells((0,))), small=len(small.presheaf.cells((0,)))
    )
    exact = all(f.startswith("exact") for f in flags)
    if report.holds and not exact:
        return inconclusive(report.check, flags, reason="mapping spaces computed at the truncation", **report.details)
    return CheckReport(report.verdict, report.check, report.witness, flags, report.details)


def point_map(w: TruncatedPresheaf) -> PresheafMap:
    b0, b1 = w.bound
    pt = prolong_second(standard_simplex(0, b1), b0, "pt")
    comps = {(k, l): {c: (0,) * (l + 1) for c in w.cells((k, l))} for (k, l) in w.levels()}
    return PresheafMap(w, pt, comps)


def _cso_conditions(p: PresheafMap, cyls: list[Cylinder], flag: DiscreteRegimeFlag) -> list[CheckReport]:
    gens = segal_generators(common_bound(p.source, p.target))
    return [_generator_report(g, p, sigma, flag) for sigma in cyls for g in gens]


def segal_completeness_check(w: TruncatedPresheaf) -> CheckReport:
    """Ánh xạ hạn chế Map(B, W) -> Map(A, W) là song ánh (hoặc tương đương nhóm phỏng) cho mọi tập sinh."""
    _require_bisimplicial(w)
    started = time.perf_counter_ns()
    check = "segal_completeness"
    p = point_map(w)
    flag = scan_regime(p)
    if not flag.verified:
        return inconclusive(check, ("discreteness-unverified",), reason=flag.reason)
    report = conjunction(check, _cso_conditions(p, [Cylinder(0, (0,))], flag), regime=flag.to_dict())
    logger.info(
        "[Segal] name=%s regime=%s verdict=%s elapsed_us=%d",
        w.name, flag.regime.value, report.verdict.value, (time.perf_counter_ns() - started) // 1000,
    )
    return report


def is_cartesian_fibration_bisimplicial(
    p: PresheafMap, cap: Optional[int] = None, budget: int = CYLINDER_BUDGET
) -> CheckReport:
    """Phân thớ Cartesian song đơn hình T -> S (S hằng theo hướng 0).

    (a) các hàng là phân thớ phải; (b) song ánh Segal tương đối và (c) đầy đủ tương đối,
    với K chạy qua các trụ σ: Δ[m] -> S (m <= 1) trong ngân sách.
    """
    _require_bisimplicial(p.source, p.target)
    require_constant(p.target, 0)
    started = time.perf_counter_ns()
    check = "is_cartesian_fibration_bisimplicial"
    rows = right_fib_rows(p, cap)
    flag = scan_regime(p)
    cyls = cylinders(row(p.target, 0), budget)
    details = {"regime": flag.to_dict(), "cylinders": [c.label for c in cyls], "cylinder_budget": budget}
    if not flag.verified:
        relative = inconclusive("relative_segal_completeness", ("discreteness-unverified",), reason=flag.reason)
    else:
        relative = conjunction("relative_segal_completeness", _cso_conditions(p, cyls, flag))
    report = conjunction(check, [rows, relative], **details)
    logger.info(
        "[CSO] source=%s target=%s regime=%s cylinders=%d verdict=%s elapsed_us=%d",
        p.source.name, p.target.name, flag.regime.value, len(cyls), report.verdict.value,
        (time.perf_counter_ns() - started) // 1000,
    )
    return report
