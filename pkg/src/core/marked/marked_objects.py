"""Đối tượng có đánh dấu: flat / sharp / forget, chính sách đánh dấu và Hom có đánh dấu.

Đánh dấu được lưu ở level [1] (hoặc ([1], l) với đối tượng song đơn hình) qua tầng
[1⁺] đặt tên đồng nhất. Mặt nạ bitarray trên các cạnh theo thứ tự chuẩn tắc dùng cho
các phép so sánh tập đánh dấu nhanh.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Optional

from bitarray import bitarray

from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf
from core.types.cell_types import CellId, Level, level_key
from core.types.errors import InvalidPresheafError, ShapeMismatchError

if TYPE_CHECKING:
    from core.hom.hom_engine import HomSet

logger = logging.getLogger(__name__)


class MarkingTag(Enum):
    FLAT = "flat"
    SHARP = "sharp"
    NATURAL = "natural"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class MarkingPolicy:
    tag: MarkingTag
    edges: tuple = ()

    @staticmethod
    def explicit(edges: Iterable[CellId]) -> "MarkingPolicy":
        return MarkingPolicy(MarkingTag.EXPLICIT, tuple(edges))


FLAT = MarkingPolicy(MarkingTag.FLAT)
SHARP = MarkingPolicy(MarkingTag.SHARP)
NATURAL = MarkingPolicy(MarkingTag.NATURAL)


def marked_levels(x: TruncatedPresheaf) -> list[Level]:
    return list(x.shape.with_marking.marked_levels(x.bound))


class MarkingMask:
    """Mặt nạ bit trên các cạnh của một level, theo thứ tự ô chuẩn tắc."""

    def __init__(self, x: TruncatedPresheaf, level: Level, edges: Iterable[CellId] = ()) -> None:
        self.level = tuple(level)
        self._edges = x.cells(self.level)
        self._index = {e: k for k, e in enumerate(self._edges)}
        self.bits = bitarray(len(self._edges))
        self.bits.setall(0)
        self._lock = threading.RLock()
        for e in edges:
            self.add(e)

    def add(self, edge: CellId) -> None:
        with self._lock:
            try:
                self.bits[self._index[edge]] = 1
            except KeyError:
                raise InvalidPresheafError(f"{edge!r} is not an edge at level {level_key(self.level)}") from None

    def __contains__(self, edge: CellId) -> bool:
        k = self._index.get(edge)
        return k is not None and bool(self.bits[k])

    def count(self) -> int:
        return self.bits.count(1)

    def missing_from(self, other: "MarkingMask") -> list[CellId]:
        """Cạnh có trong self nhưng vắng trong other."""
        diff = self.bits & ~other.bits
        return [self._edges[k] for k in diff.search(bitarray("1"))]

    def edges(self) -> list[CellId]:
        return [self._edges[k] for k in self.bits.search(bitarray("1"))]


def degenerate_mask(x: TruncatedPresheaf, level: Level) -> MarkingMask:
    return MarkingMask(x, level, x.degenerate_edges(level))


def _unmarked(x: TruncatedPresheaf) -> TruncatedPresheaf:
    return x.without_markings() if x.shape.marked else x


def flat(s: TruncatedPresheaf) -> TruncatedPresheaf:
    """S♭: chỉ đánh dấu các cạnh suy biến (ở mọi hàng ([1], l) với đối tượng song đơn hình)."""
    s = _unmarked(s)
    marks = {level: s.degenerate_edges(level) for level in marked_levels(s)}
    return s.with_markings(marks, validate=False).renamed(f"{s.name}♭")


def sharp(s: TruncatedPresheaf) -> TruncatedPresheaf:
    """S♯: đánh dấu mọi cạnh."""
    s = _unmarked(s)
    marks = {level: s.cells(level) for level in marked_levels(s)}
    return s.with_markings(marks, validate=False).renamed(f"{s.name}♯")


def forget(m: TruncatedPresheaf) -> TruncatedPresheaf:
    if not m.shape.marked:
        raise ShapeMismatchError(f"forget expects a marked object, got {m.shape.value}")
    return m.without_markings()


def with_policy(
    s: TruncatedPresheaf, policy: MarkingPolicy, over: Optional[PresheafMap] = None
) -> TruncatedPresheaf:
    """Đánh dấu s theo chính sách; NATURAL cần ánh xạ over: s -> S (phân thớ Cartesian)."""
    if policy.tag is MarkingTag.FLAT:
        return flat(s)
    if policy.tag is MarkingTag.SHARP:
        return sharp(s)
    if policy.tag is MarkingTag.NATURAL:
        if over is None:
            raise ValueError("natural marking needs the map p: T -> S")
        from core.cartesian.cartesian_edges import natural_marking

        return natural_marking(over).source
    s = _unmarked(s)
    if s.shape.directions != 1:
        raise ShapeMismatchError("explicit markings are given for simplicial objects only")
    wanted = MarkingMask(s, (1,), policy.edges)
    missing = degenerate_mask(s, (1,)).missing_from(wanted)
    if missing:
        raise InvalidPresheafError(f"explicit marking must include all degenerate edges; missing {missing[0]!r}")
    return s.with_markings({(1,): wanted.edges()}).renamed(f"({s.name},A)")


def identity_on_cells(a: TruncatedPresheaf, b: TruncatedPresheaf) -> PresheafMap:
    """Ánh xạ giữa hai đối tượng có cùng tập ô (đơn vị/đối đơn vị của flat ⊣ forget ⊣ sharp)."""
    return PresheafMap(a, b, {level: {c: c for c in a.cells(level)} for level in a.levels()})


def flat_forget_unit(x: TruncatedPresheaf) -> PresheafMap:
    return identity_on_cells(x, forget(flat(x)))


def flat_forget_counit(m: TruncatedPresheaf) -> PresheafMap:
    return PresheafMap(flat(forget(m)), m, identity_on_cells(m, m).components(), validate=True)


def forget_sharp_unit(m: TruncatedPresheaf) -> PresheafMap:
    return PresheafMap(m, sharp(forget(m)), identity_on_cells(m, m).components(), validate=True)


def forget_sharp_counit(x: TruncatedPresheaf) -> PresheafMap:
    return identity_on_cells(forget(sharp(x)), x)


def marked_hom(m1: TruncatedPresheaf, m2: TruncatedPresheaf, **kwargs) -> "HomSet":
    """Hom giữa đối tượng có đánh dấu: ánh xạ bảo toàn đánh dấu."""
    if not (m1.shape.marked and m2.shape.marked):
        raise ShapeMismatchError("marked_hom expects marked objects on both sides")
    from core.hom.hom_engine import enumerate_hom

    return enumerate_hom(m1, m2, **kwargs)


def marking_summary(m: TruncatedPresheaf) -> dict[str, int]:
    return {level_key(lv): len(m.markings(lv)) for lv in m.plus_levels()}
