"""Bốn hình chỉ số: Δ, Δ×Δ, Δ⁺, Δ⁺×Δ."""
from __future__ import annotations

from enum import Enum
from itertools import product as cartesian
from typing import Iterator

from core.types.cell_types import Level

PLUS = "1+"


class IndexShape(Enum):
    SIMPLEX = "Simplex"
    BISIMPLEX = "BiSimplex"
    MARKED_SIMPLEX = "MarkedSimplex"
    MARKED_BISIMPLEX = "MarkedBiSimplex"

    @property
    def directions(self) -> int:
        """Số hướng đơn hình (1 cho Δ, Δ⁺; 2 cho Δ×Δ, Δ⁺×Δ)."""
        return 1 if self in (IndexShape.SIMPLEX, IndexShape.MARKED_SIMPLEX) else 2

    @property
    def marked(self) -> bool:
        return self in (IndexShape.MARKED_SIMPLEX, IndexShape.MARKED_BISIMPLEX)

    @property
    def unmarked(self) -> "IndexShape":
        return IndexShape.SIMPLEX if self.directions == 1 else IndexShape.BISIMPLEX

    @property
    def with_marking(self) -> "IndexShape":
        return IndexShape.MARKED_SIMPLEX if self.directions == 1 else IndexShape.MARKED_BISIMPLEX

    def levels(self, bound: Level) -> Iterator[Level]:
        """Các level trong cận, theo tổng bậc tăng dần rồi thứ tự từ điển."""
        ranges = [range(b + 1) for b in bound]
        return iter(sorted(cartesian(*ranges), key=lambda lv: (sum(lv), lv)))

    def marked_levels(self, bound: Level) -> Iterator[Level]:
        """Các level [1] (hoặc ([1], l)) mang tầng [1⁺]."""
        if not self.marked or bound[0] < 1:
            return iter(())
        return (lv for lv in self.levels(bound) if lv[0] == 1)

    def objects(self, bound: Level) -> list:
        """Đối tượng chỉ số trong cận; Δ⁺ thêm [1⁺] (với Δ⁺×Δ là các cặp ([1⁺], l))."""
        objs: list = list(self.levels(bound))
        if self.marked and bound[0] >= 1:
            if self.directions == 1:
                objs.append((PLUS,))
            else:
                objs.extend((PLUS, l) for l in range(bound[1] + 1))
        return objs

    @staticmethod
    def parse(text: str) -> "IndexShape":
        for shape in IndexShape:
            if shape.value.lower() == text.strip().lower():
                return shape
        raise ValueError(f"unknown index shape: {text!r}")


def normalize_bound(shape: IndexShape, bound: int | Level) -> Level:
    """Cho phép truyền một số nguyên cho mọi hướng."""
    if isinstance(bound, int):
        return (bound,) * shape.directions
    bound = tuple(int(b) for b in bound)
    if len(bound) != shape.directions:
        raise ValueError(f"bound {bound} does not match {shape.value} ({shape.directions} directions)")
    return bound


def generating_maps(shape: IndexShape, bound: Level) -> list[tuple[str, object, object]]:
    """Các ánh xạ sinh (dạng tiền hàm tử: nguồn -> đích của tác động) trong cận.

    Face d_i và degeneracy s_i theo từng hướng, cộng thêm với hình đánh dấu cặp
    [1⁺] -> [1] (hạn chế về cạnh) và [0] -> [1⁺] (cạnh suy biến được đánh dấu),
    tức là nhịp [1] -> [1⁺] -> [0] của Δ⁺ nhìn từ phía presheaf.
    """
    maps: list[tuple[str, object, object]] = []
    for level in shape.levels(bound):
        for d in range(shape.directions):
            if level[d] >= 1:
                lower = level[:d] + (level[d] - 1,) + level[d + 1:]
                maps.extend((f"d{d}.{i}", level, lower) for i in range(level[d] + 1))
            if level[d] + 1 <= bound[d]:
                upper = level[:d] + (level[d] + 1,) + level[d + 1:]
                maps.extend((f"s{d}.{i}", level, upper) for i in range(level[d] + 1))
    for level in shape.marked_levels(bound):
        plus = (PLUS,) + level[1:]
        vertex = (0,) + level[1:]
        maps.append(("plus->edge", plus, level))
        maps.append(("vertex->plus", vertex, plus))
    return maps
