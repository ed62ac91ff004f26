"""Phạm trù đồng luân của quasi-category và tập cạnh tương đương (S_hoequiv)."""
from __future__ import annotations

import logging
from functools import cached_property
from typing import Optional

from core.lifting.lifting import is_quasicategory
from core.presheaf.presheaf import TruncatedPresheaf
from core.presheaf.shape import IndexShape
from core.presheaf.union_find import UnionFind
from core.report.check_report import CheckReport, fails, holds
from core.types.cell_types import CellId, sorted_cells
from core.types.errors import BoundExceededError, NotQuasiCategoryError, ShapeMismatchError

logger = logging.getLogger(__name__)


class HomotopyCategory:
    """Cạnh modulo đồng luân qua 2-ô (d2 = f, d1 = g, d0 suy biến); hợp thành bằng lấp horn trong.

    Lấp horn chọn 2-ô nhỏ nhất theo thứ tự chuẩn tắc; tính định nghĩa tốt được kiểm tra
    riêng bằng well_defined().
    """

    def __init__(self, s: TruncatedPresheaf) -> None:
        if s.shape is not IndexShape.SIMPLEX:
            raise ShapeMismatchError("the homotopy category is built for simplicial sets")
        if s.bound[0] < 2:
            raise BoundExceededError(f"{s.name} needs 2-cells for its homotopy category (bound {s.bound})")
        self.s = s
        self.vertices = s.cells((0,))
        self.edges = s.cells((1,))
        self._classes = UnionFind(self.edges)
        self._fillers: dict[tuple[CellId, CellId], list[CellId]] = {}
        for sigma in s.cells((2,)):
            f, g, h = s.face((2,), 0, 2, sigma), s.face((2,), 0, 0, sigma), s.face((2,), 0, 1, sigma)
            self._fillers.setdefault((f, g), []).append(sigma)
            if g == self.identity(self.target(f)):
                self._classes.union(f, h)
        self._rep = self._classes.canonical()

    def source(self, edge: CellId) -> CellId:
        return self.s.face((1,), 0, 1, edge)

    def target(self, edge: CellId) -> CellId:
        return self.s.face((1,), 0, 0, edge)

    def identity(self, vertex: CellId) -> CellId:
        return self.s.degeneracy((0,), 0, 0, vertex)

    def cls(self, edge: CellId) -> CellId:
        """Đại diện chuẩn tắc của lớp đồng luân."""
        return self._rep[edge]

    def homotopic(self, f: CellId, g: CellId) -> bool:
        return self._rep[f] == self._rep[g]

    def fillers(self, f: CellId, g: CellId) -> list[CellId]:
        return self._fillers.get((f, g), [])

    def compose(self, g: CellId, f: CellId) -> CellId:
        """Lớp của g ∘ f (f: x -> y, g: y -> z)."""
        candidates = self.fillers(f, g)
        if not candidates:
            raise NotQuasiCategoryError(f"no inner 2-horn filler for ({f!r}, {g!r}) in {self.s.name}")
        sigma = sorted_cells(candidates)[0]
        return self.cls(self.s.face((2,), 0, 1, sigma))

    def well_defined(self) -> CheckReport:
        """Mọi lấp horn cho cùng một lớp, và hợp thành chỉ phụ thuộc lớp của các nhân tử."""
        check = "homotopy_composition_well_defined"
        by_pair: dict[tuple[CellId, CellId], CellId] = {}
        for f in self.edges:
            for g in self.edges:
                if self.target(f) != self.source(g):
                    continue
                results = {self.cls(self.s.face((2,), 0, 1, sigma)) for sigma in self.fillers(f, g)}
                if len(results) > 1:
                    return fails(check, {"f": f, "g": g, "classes": sorted_cells(results)})
                if not results:
                    return fails(check, {"f": f, "g": g, "classes": []}, reason="missing filler")
                key = (self.cls(f), self.cls(g))
                value = results.pop()
                if by_pair.setdefault(key, value) != value:
                    return fails(check, {"f": f, "g": g, "classes": [by_pair[key], value]})
        return holds(check, ("exact",), classes=len(set(self._rep.values())))

    def inverse(self, f: CellId) -> Optional[CellId]:
        """Một cạnh g với g ∘ f ~ id và f ∘ g ~ id, hoặc None."""
        x, y = self.source(f), self.target(f)
        for g in self.edges:
            if self.source(g) != y or self.target(g) != x:
                continue
            if self.compose(g, f) == self.cls(self.identity(x)) and self.compose(f, g) == self.cls(self.identity(y)):
                return g
        return None

    def is_invertible(self, f: CellId) -> bool:
        return self.inverse(f) is not None

    @cached_property
    def invertible_edges(self) -> frozenset:
        return frozenset(e for e in self.edges if self.is_invertible(e))

    def classes(self) -> dict[CellId, list[CellId]]:
        return self._classes.classes()


def hoequiv_edges(s: TruncatedPresheaf, cap: Optional[int] = None) -> frozenset:
    """Các cạnh khả nghịch trong phạm trù đồng luân (ném lỗi nếu s không là quasi-category).

    Cần level 3: horn Λ[3] quyết định tính kết hợp của hợp thành đồng luân.
    """
    if s.bound[0] < 3:
        raise BoundExceededError(f"{s.name} needs level 3 for its equivalence edges (bound {s.bound})")
    report = is_quasicategory(s, cap)
    if report.fails:
        raise NotQuasiCategoryError(f"{s.name} is not a quasi-category: {report.witness}")
    if report.inconclusive:
        logger.warning("[Hoequiv] name=%s quasi-category check inconclusive flags=%s", s.name, report.exactness)
    ho = HomotopyCategory(s)
    edges = ho.invertible_edges
    logger.debug("[Hoequiv] name=%s edges=%d invertible=%d", s.name, len(ho.edges), len(edges))
    return edges
