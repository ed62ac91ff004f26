"""Presheaf hữu hạn bị chặn chiều và ánh xạ giữa chúng.

Biểu diễn tường minh: mỗi level là một tập ô hữu hạn, cùng các tác động face
d_i và degeneracy s_i giữa các level kề nhau (theo từng hướng). Với hình có đánh
dấu, tầng [1⁺] được lưu như ánh xạ plus-cell -> cạnh (tách được khi đơn ánh).
"""
from __future__ import annotations

import logging
from functools import cached_property
from typing import Any, Iterable, Iterator, Mapping, Optional

from core.presheaf.shape import IndexShape, normalize_bound
from core.types.cell_types import CellId, Level, MapKey, cell_key, level_key, sorted_cells
from core.types.errors import InvalidMapError, InvalidPresheafError, ShapeMismatchError

logger = logging.getLogger(__name__)

# (level, hướng, chỉ số) -> {ô: ô}
FaceTable = Mapping[tuple[Level, int, int], Mapping[CellId, CellId]]


def shift(level: Level, d: int, delta: int) -> Level:
    return level[:d] + (level[d] + delta,) + level[d + 1:]


class TruncatedPresheaf:
    def __init__(
        self,
        shape: IndexShape,
        bound: int | Level,
        cells: Mapping[Level, Iterable[CellId]],
        faces: FaceTable,
        degeneracies: FaceTable,
        plus: Optional[Mapping[Level, Mapping[CellId, CellId]]] = None,
        cosk: Optional[int] = None,
        name: str = "",
        validate: bool = False,
        dimension: Optional[Level] = None,
    ) -> None:
        """Khởi tạo presheaf; validate=True kiểm tra đồng nhất thức đơn hình, tính tách và chứng chỉ cosk.

        dimension (nếu biết) là chiều hữu hạn của đối tượng đầy đủ: mọi ô không suy biến
        nằm ở level <= dimension, nên Hom từ nó được xác định bởi phần cắt cụt.
        """
        self.shape = shape
        self.bound: Level = normalize_bound(shape, bound)
        self.name = name
        self.cosk = cosk
        self.dimension: Optional[Level] = None if dimension is None else normalize_bound(shape, dimension)
        self._cells: dict[Level, tuple[CellId, ...]] = {}
        self._members: dict[Level, frozenset] = {}
        for level in shape.levels(self.bound):
            level_cells = sorted_cells(set(cells.get(level, ())))
            self._cells[level] = tuple(level_cells)
            self._members[level] = frozenset(level_cells)
        self._faces: dict[tuple[Level, int, int], dict[CellId, CellId]] = {k: dict(v) for k, v in faces.items()}
        self._degens: dict[tuple[Level, int, int], dict[CellId, CellId]] = {k: dict(v) for k, v in degeneracies.items()}
        self._plus: dict[Level, dict[CellId, CellId]] = {}
        if shape.marked:
            for level in shape.marked_levels(self.bound):
                self._plus[level] = dict((plus or {}).get(level, {}))
        elif plus:
            raise ShapeMismatchError(f"unmarked shape {shape.value} cannot carry markings")
        if validate:
            self.validate()

    # Truy cập cơ bản
    def levels(self) -> Iterator[Level]:
        return self.shape.levels(self.bound)

    def cells(self, level: Level) -> tuple[CellId, ...]:
        return self._cells.get(tuple(level), ())

    def contains(self, level: Level, cell: CellId) -> bool:
        return cell in self._members.get(tuple(level), frozenset())

    def count(self, level: Level) -> int:
        return len(self.cells(level))

    def counts(self) -> dict[Level, int]:
        return {level: len(cs) for level, cs in self._cells.items()}

    def face(self, level: Level, d: int, i: int, cell: CellId) -> CellId:
        return self._faces[(tuple(level), d, i)][cell]

    def face_map(self, level: Level, d: int, i: int) -> dict[CellId, CellId]:
        return self._faces[(tuple(level), d, i)]

    def degeneracy(self, level: Level, d: int, i: int, cell: CellId) -> CellId:
        return self._degens[(tuple(level), d, i)][cell]

    def degeneracy_map(self, level: Level, d: int, i: int) -> dict[CellId, CellId]:
        return self._degens[(tuple(level), d, i)]

    def face_keys(self, level: Level) -> list[tuple[int, int]]:
        """Các (hướng, chỉ số) face xuất phát từ level."""
        return [(d, i) for d in range(self.shape.directions) if level[d] >= 1 for i in range(level[d] + 1)]

    def degeneracy_keys(self, level: Level) -> list[tuple[int, int]]:
        return [
            (d, i)
            for d in range(self.shape.directions)
            if level[d] + 1 <= self.bound[d]
            for i in range(level[d] + 1)
        ]

    def faces_of(self, level: Level, cell: CellId) -> tuple[CellId, ...]:
        return tuple(self.face(level, d, i, cell) for d, i in self.face_keys(level))

    # Đánh dấu
    def plus(self, level: Level) -> dict[CellId, CellId]:
        return self._plus.get(tuple(level), {})

    def plus_levels(self) -> list[Level]:
        return list(self._plus)

    def markings(self, level: Optional[Level] = None) -> frozenset:
        """Ảnh của tầng [1⁺] trong level [1] (mặc định level (1,) hoặc (1, 0))."""
        if level is None:
            level = (1,) + (0,) * (self.shape.directions - 1)
        return frozenset(self.plus(level).values())

    def is_marked(self, level: Level, cell: CellId) -> bool:
        return cell in self.markings(level)

    # Suy biến
    @cached_property
    def _degenerate_sources(self) -> dict[Level, dict[CellId, tuple[int, int, CellId]]]:
        sources: dict[Level, dict[CellId, tuple[int, int, CellId]]] = {level: {} for level in self.levels()}
        for level in self.levels():
            for d, i in self.degeneracy_keys(level):
                upper = shift(level, d, +1)
                for cell, image in self._degens[(level, d, i)].items():
                    sources[upper].setdefault(image, (d, i, cell))
        return sources

    def degenerate_source(self, level: Level, cell: CellId) -> Optional[tuple[int, int, CellId]]:
        """(hướng, i, ô thấp hơn) với s_i(ô thấp) = cell, hoặc None nếu cell không suy biến."""
        return self._degenerate_sources[tuple(level)].get(cell)

    def is_degenerate(self, level: Level, cell: CellId) -> bool:
        return self.degenerate_source(level, cell) is not None

    def nondegenerate(self, level: Level) -> tuple[CellId, ...]:
        level = tuple(level)
        sources = self._degenerate_sources[level]
        return tuple(c for c in self.cells(level) if c not in sources)

    def nondegenerate_counts(self) -> dict[Level, int]:
        return {level: len(self.nondegenerate(level)) for level in self.levels()}

    def total_nondegenerate(self) -> int:
        return sum(self.nondegenerate_counts().values())

    def degenerate_edges(self, level: Optional[Level] = None) -> frozenset:
        """Cạnh suy biến theo hướng thứ nhất: ảnh của s_0 từ level [0]."""
        if level is None:
            level = (1,) + (0,) * (self.shape.directions - 1)
        level = tuple(level)
        if level[0] != 1:
            return frozenset()
        return frozenset(self.degeneracy_map(shift(level, 0, -1), 0, 0).values())

    # Chỉ mục cho tìm kiếm ánh xạ
    @cached_property
    def _face_index(self) -> dict[Level, dict[tuple, list[CellId]]]:
        index: dict[Level, dict[tuple, list[CellId]]] = {}
        for level in self.levels():
            buckets: dict[tuple, list[CellId]] = {}
            for cell in self.cells(level):
                buckets.setdefault(self.faces_of(level, cell), []).append(cell)
            index[level] = buckets
        return index

    def cells_with_faces(self, level: Level, faces: tuple) -> list[CellId]:
        """Các ô ở level có đúng bộ face cho trước (theo thứ tự face_keys)."""
        return self._face_index[tuple(level)].get(faces, [])

    # Kiểm tra cấu trúc
    def validate(self) -> "TruncatedPresheaf":
        """Kiểm tra toàn bộ bất biến; ném InvalidPresheafError ở vi phạm đầu tiên."""
        defect = self.structural_defect()
        if defect is not None:
            raise InvalidPresheafError(f"{self.name or 'presheaf'}: {defect}")
        if self.shape.marked:
            defect = self.marking_defect()
            if defect is not None:
                raise InvalidPresheafError(f"{self.name or 'presheaf'}: {defect}")
        if self.cosk is not None:
            from core.presheaf.ops import coskeletal_defect

            defect = coskeletal_defect(self, self.cosk)
            if defect is not None:
                raise InvalidPresheafError(f"{self.name or 'presheaf'}: cosk certificate {self.cosk} broken: {defect}")
        logger.debug("[Presheaf] name=%s shape=%s bound=%s valid", self.name, self.shape.value, self.bound)
        return self

    def structural_defect(self) -> Optional[str]:
        """Mô tả vi phạm đầu tiên (bảng thiếu, ô lạ, đồng nhất thức đơn hình), hoặc None."""
        for level in self.levels():
            for d, i in self.face_keys(level):
                table = self._faces.get((level, d, i))
                if table is None:
                    return f"missing face d{d}.{i} at level {level_key(level)}"
                lower = shift(level, d, -1)
                for cell in self.cells(level):
                    if cell not in table or not self.contains(lower, table[cell]):
                        return f"face d{d}.{i} of {cell!r} at {level_key(level)} undefined or outside level"
            for d, i in self.degeneracy_keys(level):
                table = self._degens.get((level, d, i))
                if table is None:
                    return f"missing degeneracy s{d}.{i} at level {level_key(level)}"
                upper = shift(level, d, +1)
                for cell in self.cells(level):
                    if cell not in table or not self.contains(upper, table[cell]):
                        return f"degeneracy s{d}.{i} of {cell!r} at {level_key(level)} undefined or outside level"
        for level in self.levels():
            for cell in self.cells(level):
                defect = self._identity_defect(level, cell)
                if defect is not None:
                    return defect
        return None

    def _identity_defect(self, level: Level, cell: CellId) -> Optional[str]:
        dirs = range(self.shape.directions)
        where = f"{cell!r} at {level_key(level)}"
        for d in dirs:
            n = level[d]
            # d_i d_j = d_{j-1} d_i, i < j
            for j in range(n + 1):
                for i in range(j):
                    if n < 2:
                        continue
                    a = self.face(shift(level, d, -1), d, i, self.face(level, d, j, cell))
                    b = self.face(shift(level, d, -1), d, j - 1, self.face(level, d, i, cell))
                    if a != b:
                        return f"d{i}d{j} != d{j - 1}d{i} on {where} (direction {d})"
            if n + 1 <= self.bound[d]:
                up = shift(level, d, +1)
                for j in range(n + 1):
                    sj = self.degeneracy(level, d, j, cell)
                    for i in range(n + 2):
                        lhs = self.face(up, d, i, sj)
                        if i in (j, j + 1):
                            rhs = cell
                        elif i < j:
                            rhs = self.degeneracy(shift(level, d, -1), d, j - 1, self.face(level, d, i, cell))
                        else:
                            rhs = self.degeneracy(shift(level, d, -1), d, j, self.face(level, d, i - 1, cell))
                        if lhs != rhs:
                            return f"d{i}s{j} relation broken on {where} (direction {d})"
                if n + 2 <= self.bound[d]:
                    for j in range(n + 1):
                        for i in range(j + 1):
                            a = self.degeneracy(up, d, i, self.degeneracy(level, d, j, cell))
                            b = self.degeneracy(up, d, j + 1, self.degeneracy(level, d, i, cell))
                            if a != b:
                                return f"s{i}s{j} != s{j + 1}s{i} on {where} (direction {d})"
        if self.shape.directions == 2:
            for (d0, i0) in self._ops(level, 0):
                for (d1, i1) in self._ops(level, 1):
                    a = self._apply_op(self._apply_op((level, cell), d0, i0, 0), d1, i1, 1)
                    b = self._apply_op(self._apply_op((level, cell), d1, i1, 1), d0, i0, 0)
                    if a is not None and b is not None and a != b:
                        return f"operators of the two directions do not commute on {where}"
        return None

    def _ops(self, level: Level, d: int) -> list[tuple[str, int]]:
        ops: list[tuple[str, int]] = []
        if level[d] >= 1:
            ops.extend(("d", i) for i in range(level[d] + 1))
        if level[d] + 1 <= self.bound[d]:
            ops.extend(("s", i) for i in range(level[d] + 1))
        return ops

    def _apply_op(self, located, kind: str, i: int, d: int):
        if located is None:
            return None
        level, cell = located
        if kind == "d":
            if level[d] < 1:
                return None
            return shift(level, d, -1), self.face(level, d, i, cell)
        if level[d] + 1 > self.bound[d]:
            return None
        return shift(level, d, +1), self.degeneracy(level, d, i, cell)

    def marking_defect(self) -> Optional[str]:
        """Tính tách ([1⁺] -> [1] đơn ánh), chứa cạnh suy biến, đóng theo hướng thứ hai."""
        for level in self.shape.marked_levels(self.bound):
            plus = self.plus(level)
            seen: dict[CellId, CellId] = {}
            for pid, edge in plus.items():
                if not self.contains(level, edge):
                    return f"marking {pid!r} points outside level {level_key(level)}"
                if edge in seen:
                    return f"markings {seen[edge]!r} and {pid!r} collide on edge {edge!r}"
                seen[edge] = pid
            missing = self.degenerate_edges(level) - frozenset(seen)
            if missing:
                return f"degenerate edge {sorted_cells(missing)[0]!r} at {level_key(level)} is not marked"
            if self.shape.directions == 2:
                for d, i in self.face_keys(level):
                    if d != 1:
                        continue
                    lower_marks = self.markings(shift(level, 1, -1))
                    for edge in seen:
                        if self.face(level, 1, i, edge) not in lower_marks:
                            return f"markings at {level_key(level)} not closed under d1.{i}"
                for d, i in self.degeneracy_keys(level):
                    if d != 1:
                        continue
                    upper_marks = self.markings(shift(level, 1, +1))
                    for edge in seen:
                        if self.degeneracy(level, 1, i, edge) not in upper_marks:
                            return f"markings at {level_key(level)} not closed under s1.{i}"
        return None

    # Biến thể
    def _copy(self, **changes: Any) -> "TruncatedPresheaf":
        args: dict[str, Any] = {
            "shape": self.shape,
            "plus": self._plus if self.shape.marked else None,
            "cosk": self.cosk,
            "name": self.name,
            "validate": False,
            "dimension": self.dimension,
        }
        args.update(changes)
        shape = args.pop("shape")
        return TruncatedPresheaf(shape, self.bound, self._cells, self._faces, self._degens, **args)

    def with_markings(self, markings: Mapping[Level, Iterable[CellId]], validate: bool = True) -> "TruncatedPresheaf":
        """Bản sao hình có đánh dấu với tầng [1⁺] đặt tên đồng nhất (plus-cell = cạnh)."""
        plus = {tuple(level): {e: e for e in edges} for level, edges in markings.items()}
        return self._copy(shape=self.shape.with_marking, plus=plus, validate=validate)

    def without_markings(self) -> "TruncatedPresheaf":
        return self._copy(shape=self.shape.unmarked, plus=None)

    def with_cosk(self, cosk: Optional[int], validate: bool = True) -> "TruncatedPresheaf":
        return self._copy(cosk=cosk, validate=validate)

    def with_dimension(self, dimension: Optional[Level]) -> "TruncatedPresheaf":
        return self._copy(dimension=dimension)

    def renamed(self, name: str) -> "TruncatedPresheaf":
        return self._copy(name=name)

    def raw_tables(self) -> tuple[dict, dict, dict, dict]:
        """(cells, faces, degeneracies, plus) để các phép dựng khác tái sử dụng."""
        return dict(self._cells), dict(self._faces), dict(self._degens), dict(self._plus)

    def __repr__(self) -> str:
        counts = ",".join(f"{level_key(lv)}:{n}" for lv, n in self.counts().items())
        return f"TruncatedPresheaf({self.name or '?'}, {self.shape.value}, bound={self.bound}, cells=[{counts}])"


class PresheafMap:
    def __init__(
        self,
        source: TruncatedPresheaf,
        target: TruncatedPresheaf,
        components: Mapping[Level, Mapping[CellId, CellId]],
        validate: bool = False,
    ) -> None:
        """Ánh xạ theo level; validate=True kiểm tra giao hoán và bảo toàn đánh dấu."""
        if source.shape.directions != target.shape.directions or source.shape.marked != target.shape.marked:
            raise ShapeMismatchError(f"map between {source.shape.value} and {target.shape.value}")
        self.source = source
        self.target = target
        self._components: dict[Level, dict[CellId, CellId]] = {
            tuple(level): dict(comp) for level, comp in components.items()
        }
        if validate:
            self.validate()

    def __call__(self, level: Level, cell: CellId) -> CellId:
        return self._components[tuple(level)][cell]

    def component(self, level: Level) -> dict[CellId, CellId]:
        return self._components.get(tuple(level), {})

    def components(self) -> dict[Level, dict[CellId, CellId]]:
        return self._components

    def levels(self) -> list[Level]:
        return [lv for lv in self.source.levels() if lv in self._components]

    def key(self) -> MapKey:
        """Chuỗi hóa chuẩn tắc (dùng để khử trùng lặp và làm tên ô)."""
        return components_key(self._components)

    def validate(self) -> "PresheafMap":
        defect = self.defect()
        if defect is not None:
            raise InvalidMapError(defect)
        return self

    def defect(self) -> Optional[str]:
        src, tgt = self.source, self.target
        for level in src.levels():
            comp = self._components.get(level)
            if comp is None:
                if src.cells(level):
                    return f"missing component at level {level_key(level)}"
                continue
            for cell in src.cells(level):
                if cell not in comp or not tgt.contains(level, comp[cell]):
                    return f"{cell!r} at {level_key(level)} has no image in target"
            for d, i in src.face_keys(level):
                lower = self._components.get(shift(level, d, -1), {})
                for cell in src.cells(level):
                    if tgt.face(level, d, i, comp[cell]) != lower.get(src.face(level, d, i, cell)):
                        return f"does not commute with d{d}.{i} at {cell!r} ({level_key(level)})"
            for d, i in src.degeneracy_keys(level):
                if level[d] + 1 > tgt.bound[d]:
                    continue
                upper = self._components.get(shift(level, d, +1), {})
                for cell in src.cells(level):
                    if tgt.degeneracy(level, d, i, comp[cell]) != upper.get(src.degeneracy(level, d, i, cell)):
                        return f"does not commute with s{d}.{i} at {cell!r} ({level_key(level)})"
        if src.shape.marked:
            for level in src.plus_levels():
                marks = tgt.markings(level)
                comp = self._components.get(level, {})
                for edge in src.markings(level):
                    if comp.get(edge) not in marks:
                        return f"marked edge {edge!r} at {level_key(level)} sent to unmarked {comp.get(edge)!r}"
        return None

    def then(self, other: "PresheafMap") -> "PresheafMap":
        """Hợp thành other ∘ self."""
        comps = {
            level: {cell: other(level, image) for cell, image in comp.items()}
            for level, comp in self._components.items()
        }
        return PresheafMap(self.source, other.target, comps)

    def is_injective(self) -> bool:
        return all(len(set(comp.values())) == len(comp) for comp in self._components.values())

    def is_bijective(self) -> bool:
        for level in self.source.levels():
            comp = self.component(level)
            if len(set(comp.values())) != len(comp) or len(comp) != self.target.count(level):
                return False
        return True

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PresheafMap) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"PresheafMap({self.source.name or '?'} -> {self.target.name or '?'})"

    @staticmethod
    def identity(x: TruncatedPresheaf) -> "PresheafMap":
        return PresheafMap(x, x, {level: {c: c for c in x.cells(level)} for level in x.levels()})

    @staticmethod
    def from_key(source: TruncatedPresheaf, target: TruncatedPresheaf, key: MapKey) -> "PresheafMap":
        return PresheafMap(source, target, {level: dict(pairs) for level, pairs in key})

    @staticmethod
    def from_function(source: TruncatedPresheaf, target: TruncatedPresheaf, fn, validate: bool = True) -> "PresheafMap":
        """Ánh xạ cho bởi hàm fn(level, cell) -> ô đích."""
        comps = {level: {c: fn(level, c) for c in source.cells(level)} for level in source.levels()}
        return PresheafMap(source, target, comps, validate=validate)


def components_key(components: Mapping[Level, Mapping[CellId, CellId]]) -> MapKey:
    return MapKey(
        tuple(
            (level, tuple(sorted(comp.items(), key=lambda kv: cell_key(kv[0]))))
            for level, comp in sorted(components.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        )
    )


def presheaf_from_function(
    shape: IndexShape,
    bound: int | Level,
    cells: Mapping[Level, Iterable[CellId]],
    face_fn,
    degeneracy_fn,
    plus: Optional[Mapping[Level, Mapping[CellId, CellId]]] = None,
    cosk: Optional[int] = None,
    name: str = "",
    validate: bool = False,
    dimension: Optional[Level] = None,
) -> TruncatedPresheaf:
    """Dựng presheaf từ hàm face_fn(level, d, i, cell) và degeneracy_fn(level, d, i, cell)."""
    bound = normalize_bound(shape, bound)
    faces: dict[tuple[Level, int, int], dict[CellId, CellId]] = {}
    degens: dict[tuple[Level, int, int], dict[CellId, CellId]] = {}
    for level in shape.levels(bound):
        level_cells = list(cells.get(level, ()))
        for d in range(shape.directions):
            if level[d] >= 1:
                for i in range(level[d] + 1):
                    faces[(level, d, i)] = {c: face_fn(level, d, i, c) for c in level_cells}
            if level[d] + 1 <= bound[d]:
                for i in range(level[d] + 1):
                    degens[(level, d, i)] = {c: degeneracy_fn(level, d, i, c) for c in level_cells}
    return TruncatedPresheaf(shape, bound, cells, faces, degens, plus, cosk, name, validate, dimension)


def empty(shape: IndexShape, bound: int | Level, name: str = "∅") -> TruncatedPresheaf:
    return presheaf_from_function(shape, bound, {}, None, None, name=name, dimension=0)


def describe(x: TruncatedPresheaf) -> dict[str, Any]:
    return {
        "name": x.name,
        "shape": x.shape.value,
        "bound": list(x.bound),
        "cells": {level_key(lv): n for lv, n in x.counts().items()},
        "nondegenerate": {level_key(lv): n for lv, n in x.nondegenerate_counts().items()},
        "cosk": x.cosk,
    }
