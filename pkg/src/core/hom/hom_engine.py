"""Liệt kê ánh xạ presheaf, không gian ánh xạ, lũy thừa và đối tượng khớp (matching object).

Tìm kiếm quay lui: mỗi ô được gán ngay khi mọi face (hoặc nguồn suy biến) của nó đã gán;
đỉnh mới chỉ được mở khi không còn ô nào sẵn sàng, theo thứ tự ô chuẩn tắc.
Ô không suy biến lấy ứng viên từ chỉ mục bộ-face của đích (cắt tỉa ngay theo mọi ràng buộc
face); ô suy biến được suy ra từ nguồn suy biến của nó.
"""
from __future__ import annotations

import heapq
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional, Sequence

from core.metrics.metrics import GLOBAL_METRICS, SearchMetrics
from core.marked.marked_objects import sharp
from core.presheaf.operators import Operator, act, codegeneracy, coface, compose, identity
from core.presheaf.ops import (
    common_bound,
    coskeletal_counts,
    product,
    prolong_first,
    prolong_second,
    pullback,
    row,
    truncate,
)
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, components_key, presheaf_from_function, shift
from core.presheaf.shape import IndexShape, normalize_bound
from core.standard.objects import boundary, standard_simplex
from core.report.check_report import CheckReport, fails, holds, inconclusive
from core.types.cell_types import CellId, Level, MapKey, level_key
from core.types.errors import BoundExceededError, InvalidMapError, ShapeMismatchError

logger = logging.getLogger(__name__)

Components = dict[Level, dict[CellId, CellId]]


@dataclass
class HomSet:
    source: TruncatedPresheaf
    target: TruncatedPresheaf
    maps: list[PresheafMap]
    exactness: str
    bound: Level
    nodes: int = 0

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self) -> Iterator[PresheafMap]:
        return iter(self.maps)

    def keys(self) -> list[MapKey]:
        return [f.key() for f in self.maps]

    @property
    def exact(self) -> bool:
        return self.exactness.startswith("exact")

    def validate_all(self) -> "HomSet":
        keys = set()
        for f in self.maps:
            f.validate()
            keys.add(f.key())
        if len(keys) != len(self.maps):
            raise InvalidMapError(f"hom set {self.source.name} -> {self.target.name} contains duplicates")
        return self


def hom_exactness(
    x: TruncatedPresheaf, y: TruncatedPresheaf, bound: Level, source_skeletal: bool = False
) -> str:
    """Cờ chính xác của Hom(x, y) tính ở cận bound.

    exact: x hữu hạn chiều trong cận (hoặc đọc như mở rộng skeletal của phần cắt cụt);
    exact-by-coskeletality-c: y là c-coskeletal và cả hai có sẵn tới level c;
    còn lại bounded-at-<cận>.
    """
    if x.dimension is not None and all(dm <= b for dm, b in zip(x.dimension, bound)):
        return "exact"
    if source_skeletal and all(xb <= b for xb, b in zip(x.bound, bound)):
        return "exact-skeletal-source"
    c = y.cosk
    if c is not None and all(b >= c for b in bound):
        return f"exact-by-coskeletality-{c}"
    return f"bounded-at-{level_key(bound)}"


Slot = tuple[Level, CellId, Optional[tuple[int, int, CellId]]]


def dependency_order(x: TruncatedPresheaf) -> list[Slot]:
    """Thứ tự gán ô cho tìm kiếm: ô sẵn sàng (mọi phụ thuộc đã gán) đi trước đỉnh mới.

    Phụ thuộc của ô không suy biến là các face; của ô suy biến là nguồn suy biến.
    Nhờ vậy cạnh giữa hai đỉnh đã gán cắt tỉa trước khi mở đỉnh tiếp theo.
    """
    canonical: list[tuple[Level, CellId]] = [(level, cell) for level in x.levels() for cell in x.cells(level)]
    index = {key: k for k, key in enumerate(canonical)}
    sources: dict[tuple[Level, CellId], Optional[tuple[int, int, CellId]]] = {}
    waiting: dict[tuple[Level, CellId], int] = {}
    dependents: dict[tuple[Level, CellId], list[tuple[Level, CellId]]] = {}
    heap: list[tuple[int, int]] = []
    for key in canonical:
        level, cell = key
        source = x.degenerate_source(level, cell)
        sources[key] = source
        if source is not None:
            d, _, lower = source
            deps = {(shift(level, d, -1), lower)}
        else:
            deps = {(shift(level, d, -1), x.face(level, d, i, cell)) for d, i in x.face_keys(level)}
        waiting[key] = len(deps)
        for dep in deps:
            dependents.setdefault(dep, []).append(key)
        if not deps:
            heapq.heappush(heap, (1, index[key]))
    slots: list[Slot] = []
    while heap:
        _, k = heapq.heappop(heap)
        key = canonical[k]
        slots.append((key[0], key[1], sources[key]))
        for nxt in dependents.get(key, []):
            waiting[nxt] -= 1
            if waiting[nxt] == 0:
                heapq.heappush(heap, (0, index[nxt]))
    if len(slots) != len(canonical):
        raise InvalidMapError(f"{x.name} has cells whose faces never become available")
    return slots


class _Search:
    """Trạng thái của một lần tìm kiếm quay lui (không chia sẻ giữa các luồng)."""

    def __init__(
        self,
        x: TruncatedPresheaf,
        y: TruncatedPresheaf,
        fixed: Optional[Mapping[Level, Mapping[CellId, CellId]]] = None,
        over: Optional[tuple[PresheafMap, PresheafMap]] = None,
        injective: bool = False,
    ) -> None:
        self.x, self.y = x, y
        self.fixed = {tuple(lv): dict(v) for lv, v in (fixed or {}).items()}
        self.over = over
        self.injective = injective
        self.levels = list(x.levels())
        self.slots = dependency_order(x)
        self.marks = {lv: x.markings(lv) for lv in x.plus_levels()} if x.shape.marked else {}
        self.target_marks = {lv: y.markings(lv) for lv in y.plus_levels()} if y.shape.marked else {}
        self.comp: Components = {level: {} for level in self.levels}
        self.used: dict[Level, set] = {level: set() for level in self.levels}
        self.nodes = 0
        self.pruned = 0

    def candidates(self, k: int) -> list[CellId]:
        level, cell, source = self.slots[k]
        x, y = self.x, self.y
        if source is not None:
            d, i, lower = source
            pool = [y.degeneracy(shift(level, d, -1), d, i, self.comp[shift(level, d, -1)][lower])]
        else:
            required = tuple(self.comp[shift(level, d, -1)][x.face(level, d, i, cell)] for d, i in x.face_keys(level))
            pool = y.cells_with_faces(level, required)
            if level in self.marks and cell in self.marks[level]:
                marked = self.target_marks.get(level, frozenset())
                pool = [c for c in pool if c in marked]
        fixed = self.fixed.get(level)
        if fixed is not None and cell in fixed:
            pool = [c for c in pool if c == fixed[cell]]
        if self.over is not None:
            g, bottom = self.over
            want = bottom(level, cell)
            pool = [c for c in pool if g(level, c) == want]
        if self.injective:
            used = self.used[level]
            pool = [c for c in pool if c not in used]
        if not pool:
            self.pruned += 1
        return pool

    def run(self, limit: Optional[int] = None, root: Optional[list[CellId]] = None) -> Iterator[Components]:
        slots = self.slots
        n = len(slots)
        if n == 0:
            yield {level: {} for level in self.levels}
            return
        cand: list[list[CellId]] = [[] for _ in range(n)]
        ptr = [0] * n
        current: list[Optional[CellId]] = [None] * n
        found = 0
        cand[0] = self.candidates(0) if root is None else root
        k = 0
        while k >= 0:
            level, cell, _ = slots[k]
            if current[k] is not None:
                self.used[level].discard(current[k])
                del self.comp[level][cell]
                current[k] = None
            if ptr[k] >= len(cand[k]):
                k -= 1
                continue
            image = cand[k][ptr[k]]
            ptr[k] += 1
            self.nodes += 1
            self.comp[level][cell] = image
            self.used[level].add(image)
            current[k] = image
            if k == n - 1:
                yield {lv: dict(c) for lv, c in self.comp.items()}
                found += 1
                if limit is not None and found >= limit:
                    return
                continue
            k += 1
            cand[k] = self.candidates(k)
            ptr[k] = 0


def _prepare(x: TruncatedPresheaf, y: TruncatedPresheaf) -> tuple[TruncatedPresheaf, Level]:
    if x.shape.directions != y.shape.directions or x.shape.marked != y.shape.marked:
        raise ShapeMismatchError(f"hom between {x.shape.value} and {y.shape.value}")
    bound = common_bound(x, y)
    if bound != x.bound:
        x = truncate(x, bound)
    return x, bound


def search_maps(
    x: TruncatedPresheaf,
    y: TruncatedPresheaf,
    fixed: Optional[Mapping[Level, Mapping[CellId, CellId]]] = None,
    over: Optional[tuple[PresheafMap, PresheafMap]] = None,
    injective: bool = False,
    limit: Optional[int] = None,
    metrics: Optional[SearchMetrics] = None,
) -> tuple[TruncatedPresheaf, list[PresheafMap]]:
    """Tìm ánh xạ x -> y thỏa các ràng buộc (ảnh cố định, nằm trên over=(g, bottom), đơn ánh)."""
    x, _ = _prepare(x, y)
    search = _Search(x, y, fixed, over, injective)
    found = [PresheafMap(x, y, comp) for comp in search.run(limit)]
    (metrics or GLOBAL_METRICS).record_search(search.nodes, search.pruned)
    return x, found


def enumerate_hom(
    x: TruncatedPresheaf,
    y: TruncatedPresheaf,
    source_skeletal: bool = False,
    workers: int = 1,
    metrics: Optional[SearchMetrics] = None,
    over: Optional[tuple[PresheafMap, PresheafMap]] = None,
) -> HomSet:
    """Mọi ánh xạ x -> y ở cận chung, kèm cờ chính xác (over=(g, bottom): chỉ ánh xạ nằm trên bottom).

    workers > 1 chia nhánh theo lựa chọn của ô đầu tiên; kết quả ghép lại theo thứ tự
    ứng viên nên trùng với thứ tự tuần tự.
    """
    started = time.perf_counter_ns()
    metrics = metrics or GLOBAL_METRICS
    x, bound = _prepare(x, y)
    exactness = hom_exactness(x, y, bound, source_skeletal)
    root_search = _Search(x, y, over=over)
    maps: list[PresheafMap] = []
    nodes = 0
    if workers > 1 and root_search.slots:
        roots = root_search.candidates(0)

        def branch(choice: CellId) -> tuple[list[Components], int, int]:
            s = _Search(x, y, over=over)
            comps = list(s.run(root=[choice]))
            return comps, s.nodes, s.pruned

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for comps, n_nodes, n_pruned in pool.map(branch, roots):
                maps.extend(PresheafMap(x, y, comp) for comp in comps)
                nodes += n_nodes
                metrics.record_search(n_nodes, n_pruned)
    else:
        maps = [PresheafMap(x, y, comp) for comp in root_search.run()]
        nodes = root_search.nodes
        metrics.record_search(root_search.nodes, root_search.pruned)
    micros = (time.perf_counter_ns() - started) // 1000
    metrics.record_hom_set(len(maps), micros)
    logger.debug(
        "[Hom] source=%s target=%s maps=%d nodes=%d exactness=%s", x.name, y.name, len(maps), nodes, exactness
    )
    return HomSet(x, y, maps, exactness, bound, nodes)


def count_hom(x: TruncatedPresheaf, y: TruncatedPresheaf, **kwargs) -> int:
    return len(enumerate_hom(x, y, **kwargs))


def find_isomorphism(a: TruncatedPresheaf, b: TruncatedPresheaf) -> Optional[PresheafMap]:
    """Ánh xạ song ánh a -> b (phép thử bằng nhau được phép giữa các cách dựng), hoặc None."""
    if a.shape != b.shape or a.bound != b.bound:
        return None
    if a.counts() != b.counts():
        return None
    if a.shape.marked and any(len(a.markings(lv)) != len(b.markings(lv)) for lv in a.plus_levels()):
        return None
    _, found = search_maps(a, b, injective=True, limit=1)
    return found[0] if found else None


def is_isomorphic(a: TruncatedPresheaf, b: TruncatedPresheaf) -> bool:
    return find_isomorphism(a, b) is not None


# Presheaf Hom: level L -> Hom(A(L), Y)
Transport = Callable[[Sequence[Operator], Level, CellId], CellId]


@dataclass
class HomPresheaf:
    """Presheaf có ô level L là chỉ số của ánh xạ A(L) -> Y, cấu trúc bởi tiền hợp thành."""

    presheaf: TruncatedPresheaf
    elements: dict[Level, list[PresheafMap]]
    sources: dict[Level, TruncatedPresheaf]
    exactness: tuple[str, ...]
    _index: dict[Level, dict[MapKey, int]] = field(default_factory=dict, repr=False)

    def element(self, level: Level, index: int) -> PresheafMap:
        return self.elements[tuple(level)][index]

    def index_of(self, level: Level, f: PresheafMap | MapKey) -> Optional[int]:
        key = f.key() if isinstance(f, PresheafMap) else f
        return self._index[tuple(level)].get(key)

    def counts(self) -> dict[Level, int]:
        return {level: len(maps) for level, maps in self.elements.items()}

    @property
    def exact(self) -> bool:
        return all(flag.startswith("exact") for flag in self.exactness)


def precompose(m: PresheafMap, source: TruncatedPresheaf, along: Callable[[Level, CellId], CellId]) -> Components:
    """Thành phần của m ∘ A(θ), với along(level, ô của source) là ảnh qua A(θ)."""
    return {level: {c: m(level, along(level, c)) for c in source.cells(level)} for level in source.levels()}


def hom_presheaf(
    shape: IndexShape,
    bound: int | Level,
    source_at: Callable[[Level], TruncatedPresheaf],
    transport: Transport,
    target: TruncatedPresheaf,
    name: str = "",
    plus_source_at: Optional[Callable[[Level], TruncatedPresheaf]] = None,
    cosk: Optional[int] = None,
    source_skeletal: bool = False,
    over_at: Optional[Callable[[Level], tuple[PresheafMap, PresheafMap]]] = None,
) -> HomPresheaf:
    """Dựng L -> Hom(A(L), target) với A là đối tượng đối đơn hình cho bởi source_at/transport.

    transport(θ, level, ô) là tác động của A(θ): A(L') -> A(L) trên ô của A(L'), với θ là
    bộ toán tử đơn điệu theo từng hướng. Với hình có đánh dấu, plus_source_at(L) là A(L)
    có đánh dấu (cùng tập ô); ảnh của Hom của nó đánh dấu các cạnh. over_at(L) giới hạn
    về các ánh xạ nằm trên một ánh xạ cấu trúc (Hom tương đối).
    """
    bound = normalize_bound(shape, bound)
    elements: dict[Level, list[PresheafMap]] = {}
    sources: dict[Level, TruncatedPresheaf] = {}
    index: dict[Level, dict[MapKey, int]] = {}
    flags: set[str] = set()
    for level in shape.levels(bound):
        hs = enumerate_hom(
            source_at(level), target, source_skeletal=source_skeletal, over=over_at(level) if over_at else None
        )
        elements[level] = hs.maps
        sources[level] = hs.source
        index[level] = {f.key(): k for k, f in enumerate(hs.maps)}
        flags.add(hs.exactness)

    def lookup(level: Level, comps: Components) -> int:
        k = index[level].get(components_key(comps))
        if k is None:
            raise InvalidMapError(f"precomposite at {level_key(level)} missing from {name or 'hom presheaf'}")
        return k

    def operator_tuple(level: Level, d: int, op: Operator) -> tuple[Operator, ...]:
        return tuple(op if e == d else identity(level[e]) for e in range(shape.directions))

    def face(level: Level, d: int, i: int, k: int) -> int:
        lower = shift(level, d, -1)
        theta = operator_tuple(lower, d, coface(level[d], i))
        m = elements[level][k]
        return lookup(lower, precompose(m, sources[lower], lambda lv, c: transport(theta, lv, c)))

    def degeneracy(level: Level, d: int, i: int, k: int) -> int:
        upper = shift(level, d, +1)
        theta = operator_tuple(upper, d, codegeneracy(level[d], i))
        m = elements[level][k]
        return lookup(upper, precompose(m, sources[upper], lambda lv, c: transport(theta, lv, c)))

    plus = None
    if shape.marked and plus_source_at is not None:
        plus = {}
        for level in shape.marked_levels(bound):
            marked_maps = enumerate_hom(plus_source_at(level), target).maps
            plus[level] = {}
            for f in marked_maps:
                k = index[level].get(f.key())
                if k is not None:
                    plus[level][k] = k
    cells = {level: list(range(len(maps))) for level, maps in elements.items()}
    presheaf = presheaf_from_function(shape, bound, cells, face, degeneracy, plus=plus, cosk=cosk, name=name)
    logger.debug("[HomPresheaf] name=%s counts=%s", name, {level_key(lv): len(v) for lv, v in elements.items()})
    return HomPresheaf(presheaf, elements, sources, tuple(sorted(flags)), index)


def _cylinder(x: TruncatedPresheaf, n: int) -> TruncatedPresheaf:
    """Δ[n] phù hợp với hình của x: Δ[n], Δ[n]♯, hoặc Δ[n] hằng theo hướng thứ nhất."""
    if x.shape.directions == 1:
        delta = standard_simplex(n, x.bound[0])
        return sharp(delta) if x.shape.marked else delta
    col = prolong_second(standard_simplex(n, x.bound[1]), x.bound[0])
    return sharp(col) if x.shape.marked else col


def mapping_space(
    x: TruncatedPresheaf, y: TruncatedPresheaf, n_max: int = 2, name: str = ""
) -> HomPresheaf:
    """Map(x, y)_n = Hom(x × Δ[n], y); với đối tượng có đánh dấu, trụ là Δ[n]♯."""

    def transport(theta: Sequence[Operator], level: Level, cell: CellId) -> CellId:
        return cell[0], compose(theta[0], cell[1])

    cylinders = {n: product(x, _cylinder(x, n)) for n in range(n_max + 1)}
    return hom_presheaf(
        IndexShape.SIMPLEX,
        n_max,
        lambda level: cylinders[level[0]],
        transport,
        y,
        name=name or f"Map({x.name},{y.name})",
        cosk=y.cosk,
    )


def exponential(x: TruncatedPresheaf, y: TruncatedPresheaf, bound: Optional[Level] = None) -> HomPresheaf:
    """(Y^X)_{k,n} = Hom(X × F(k) × Δ[n], Y) cho đối tượng song đơn hình."""
    if x.shape != IndexShape.BISIMPLEX or y.shape != IndexShape.BISIMPLEX:
        raise ShapeMismatchError("exponential expects unmarked bisimplicial objects")
    bound = tuple(bound or y.bound)
    b = common_bound(x, y)

    def source_at(level: Level) -> TruncatedPresheaf:
        k, n = level
        f_k = prolong_first(standard_simplex(k, b[0]), b[1])
        col = prolong_second(standard_simplex(n, b[1]), b[0])
        return product(product(x, f_k), col)

    def transport(theta: Sequence[Operator], level: Level, cell: CellId) -> CellId:
        (c, f), t = cell
        return (c, compose(theta[0], f)), compose(theta[1], t)

    return hom_presheaf(
        IndexShape.BISIMPLEX, bound, source_at, transport, y, name=f"{y.name}^{x.name}", cosk=y.cosk
    )


def evaluation_map(exp: HomPresheaf, x: TruncatedPresheaf, y: TruncatedPresheaf) -> PresheafMap:
    """ev: Y^X × X -> Y, (m, c) -> m((c, id_k, id_n))."""
    source = product(exp.presheaf, x)
    comps: Components = {}
    for level in source.levels():
        k, n = level
        comps[level] = {
            (idx, c): exp.element(level, idx)(level, ((c, identity(k)), identity(n))) for idx, c in source.cells(level)
        }
    return PresheafMap(source, y, comps)


# Đối tượng khớp
@dataclass
class MatchingObject:
    n: int
    hom: HomPresheaf
    row: TruncatedPresheaf
    matching_map: PresheafMap

    @property
    def presheaf(self) -> TruncatedPresheaf:
        return self.hom.presheaf


def matching_object(x: TruncatedPresheaf, n: int) -> MatchingObject:
    """M_n X = Map(∂F(n), X) cùng ánh xạ chuẩn X_n -> M_n X (hạn chế về biên)."""
    if x.shape != IndexShape.BISIMPLEX:
        raise ShapeMismatchError("matching_object expects an unmarked bisimplicial object")
    if n > x.bound[0]:
        raise BoundExceededError(f"matching object M_{n} needs level {n} but {x.name} stops at {x.bound}")
    b0, b1 = x.bound
    dF = prolong_first(boundary(n, b0), b1)
    sources = {m: product(dF, prolong_second(standard_simplex(m, b1), b0)) for m in range(b1 + 1)}

    def transport(theta: Sequence[Operator], level: Level, cell: CellId) -> CellId:
        return cell[0], compose(theta[0], cell[1])

    hom = hom_presheaf(
        IndexShape.SIMPLEX, b1, lambda level: sources[level[0]], transport, x, name=f"M_{n}{x.name}", cosk=x.cosk
    )
    row_n = row(x, n)
    comps: Components = {}
    for (m,) in row_n.levels():
        src = hom.sources[(m,)]
        comps[(m,)] = {}
        for u in x.cells((n, m)):
            restricted = {
                level: {cell: act(x, (n, m), u, (cell[0], cell[1]))[1] for cell in src.cells(level)}
                for level in src.levels()
            }
            k = hom.index_of((m,), components_key(restricted))
            if k is None:
                raise InvalidMapError(f"restriction of {u!r} to the boundary is not a map")
            comps[(m,)][u] = k
    return MatchingObject(n, hom, row_n, PresheafMap(row_n, hom.presheaf, comps))


@dataclass
class RelativeMatching:
    n: int
    fiber_product: TruncatedPresheaf
    matching_map: PresheafMap


def relative_matching_map(g: PresheafMap, n: int) -> RelativeMatching:
    """Ánh xạ khớp Reedy Y_n -> M_nY ×_{M_nX} X_n của g: Y -> X."""
    my, mx = matching_object(g.source, n), matching_object(g.target, n)
    comps: Components = {}
    for level in my.presheaf.levels():
        src = my.hom.sources[level]
        comps[level] = {}
        for k in my.presheaf.cells(level):
            f = my.hom.element(level, k)
            pushed = {lv: {c: g(lv, v) for c, v in f.component(lv).items()} for lv in src.levels()}
            idx = mx.hom.index_of(level, components_key(pushed))
            if idx is None:
                raise InvalidMapError("post-composite of a boundary map is missing from M_nX")
            comps[level][k] = idx
    push = PresheafMap(my.presheaf, mx.presheaf, comps)
    p, _, _ = pullback(push, mx.matching_map, name=f"M_{n}Y×M_{n}X X_{n}")
    row_g = PresheafMap(
        my.row, mx.row, {(m,): {u: g((n, m), u) for u in my.row.cells((m,))} for (m,) in my.row.levels()}
    )
    matching = PresheafMap(
        my.row,
        p,
        {
            level: {u: (my.matching_map(level, u), row_g(level, u)) for u in my.row.cells(level)}
            for level in my.row.levels()
        },
    )
    return RelativeMatching(n, p, matching)


def is_coskeletal(x: TruncatedPresheaf, c: int) -> CheckReport:
    """Ánh xạ ô -> bộ biên tương thích có song ánh ở mọi level trên c (trong cận) không."""
    check = f"is_coskeletal[{c}]"
    if all(c >= b for b in x.bound):
        return inconclusive(check, (f"bounded-at-{level_key(x.bound)}",), reason="no level above c within bound")
    counts = coskeletal_counts(x, c)
    for row_info in counts:
        if not row_info["bijective"]:
            return fails(check, row_info, (f"bounded-at-{level_key(x.bound)}",), counts=counts)
    return holds(check, (f"checked-through-{level_key(x.bound)}",), counts=counts)
