"""Các phép dựng sơ cấp trên presheaf cắt cụt: tích, giới hạn, đối giới hạn, cắt, kéo dài.

Mọi phép đều thuần túy: không sửa đối số, kết quả có tên ô chuẩn tắc nên hai lần gọi
cùng đầu vào cho cùng đầu ra.
"""
from __future__ import annotations

import logging
from itertools import product as cartesian
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, presheaf_from_function, shift
from core.presheaf.shape import IndexShape, normalize_bound
from core.presheaf.union_find import UnionFind
from core.report.check_report import CheckReport, fails, holds
from core.types.cell_types import CellId, Level, cell_key, level_key, sorted_cells
from core.types.errors import BoundExceededError, InvalidPresheafError, NotConstantError, ShapeMismatchError

logger = logging.getLogger(__name__)


def _require_same_shape(*xs: TruncatedPresheaf) -> None:
    shapes = {x.shape for x in xs}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"shapes differ: {sorted(s.value for s in shapes)}")


def common_bound(*xs: TruncatedPresheaf) -> Level:
    return tuple(min(b) for b in zip(*(x.bound for x in xs)))


def _join_dimension(dims: Iterable[Optional[Level]], combine) -> Optional[Level]:
    dims = list(dims)
    if any(d is None for d in dims):
        return None
    return tuple(combine(parts) for parts in zip(*dims))


def _max_cosk(*xs: TruncatedPresheaf) -> Optional[int]:
    if any(x.cosk is None for x in xs):
        return None
    return max(x.cosk for x in xs)


# Hằng
def terminal(shape: IndexShape, bound: int | Level, name: str = "pt") -> TruncatedPresheaf:
    """Đối tượng cuối: một ô "*" ở mỗi level (cạnh duy nhất được đánh dấu)."""
    bound = normalize_bound(shape, bound)
    cells = {level: ["*"] for level in shape.levels(bound)}
    plus = {level: {"*": "*"} for level in shape.marked_levels(bound)} if shape.marked else None
    return presheaf_from_function(
        shape, bound, cells, lambda *_: "*", lambda *_: "*", plus=plus, cosk=0, name=name, dimension=0
    )


def discrete(shape: IndexShape, bound: int | Level, points: Sequence[CellId], name: str = "") -> TruncatedPresheaf:
    """Đối tượng rời rạc: mọi level là cùng tập điểm, mọi ánh xạ cấu trúc là đồng nhất."""
    bound = normalize_bound(shape, bound)
    cells = {level: list(points) for level in shape.levels(bound)}
    plus = {level: {p: p for p in points} for level in shape.marked_levels(bound)} if shape.marked else None
    return presheaf_from_function(
        shape, bound, cells, lambda lv, d, i, c: c, lambda lv, d, i, c: c, plus=plus, cosk=0,
        name=name or f"disc{len(points)}", dimension=0,
    )


def inclusion(sub: TruncatedPresheaf, ambient: TruncatedPresheaf, validate: bool = True) -> PresheafMap:
    """Bao hàm của presheaf con dùng chung định danh ô."""
    comps = {level: {c: c for c in sub.cells(level)} for level in sub.levels()}
    return PresheafMap(sub, ambient, comps, validate=validate)


# Tích và giới hạn
def product(a: TruncatedPresheaf, b: TruncatedPresheaf, name: str = "") -> TruncatedPresheaf:
    """Tích theo level; ô là cặp (ô của a, ô của b), cạnh đánh dấu là cặp cạnh đánh dấu."""
    _require_same_shape(a, b)
    bound = common_bound(a, b)
    shape = a.shape
    cells = {level: list(cartesian(a.cells(level), b.cells(level))) for level in shape.levels(bound)}
    plus = None
    if shape.marked:
        plus = {
            level: {(e1, e2): (e1, e2) for e1 in sorted_marks(a, level) for e2 in sorted_marks(b, level)}
            for level in shape.marked_levels(bound)
        }
    return presheaf_from_function(
        shape,
        bound,
        cells,
        lambda lv, d, i, c: (a.face(lv, d, i, c[0]), b.face(lv, d, i, c[1])),
        lambda lv, d, i, c: (a.degeneracy(lv, d, i, c[0]), b.degeneracy(lv, d, i, c[1])),
        plus=plus,
        cosk=_max_cosk(a, b),
        name=name or f"({a.name}×{b.name})",
        dimension=_join_dimension((a.dimension, b.dimension), sum),
    )


def product_many(xs: Sequence[TruncatedPresheaf], name: str = "") -> TruncatedPresheaf:
    if not xs:
        raise ValueError("product of an empty family needs an explicit terminal object")
    result = xs[0]
    for x in xs[1:]:
        result = product(result, x)
    return result.renamed(name) if name else result


def projection(prod: TruncatedPresheaf, factor: TruncatedPresheaf, index: int) -> PresheafMap:
    comps = {level: {c: c[index] for c in prod.cells(level)} for level in prod.levels()}
    return PresheafMap(prod, factor, comps)


def sorted_marks(x: TruncatedPresheaf, level: Level) -> list[CellId]:
    return sorted_cells(x.markings(level))


def pullback(f: PresheafMap, g: PresheafMap, name: str = "") -> tuple[TruncatedPresheaf, PresheafMap, PresheafMap]:
    """Tích thớ X ×_Z Y của f: X -> Z <- Y: g cùng hai phép chiếu."""
    if f.target is not g.target and f.target.shape != g.target.shape:
        raise ShapeMismatchError("cospan legs must share a target")
    x, y = f.source, g.source
    _require_same_shape(x, y, f.target)
    bound = common_bound(x, y, f.target)
    shape = x.shape
    cells: dict[Level, list] = {}
    for level in shape.levels(bound):
        by_image: dict[CellId, list[CellId]] = {}
        for cy in y.cells(level):
            by_image.setdefault(g(level, cy), []).append(cy)
        cells[level] = [(cx, cy) for cx in x.cells(level) for cy in by_image.get(f(level, cx), [])]
    plus = None
    if shape.marked:
        plus = {}
        for level in shape.marked_levels(bound):
            mx, my = x.markings(level), y.markings(level)
            plus[level] = {c: c for c in cells[level] if c[0] in mx and c[1] in my}
    cosk = _max_cosk(x, y, f.target)
    p = presheaf_from_function(
        shape,
        bound,
        cells,
        lambda lv, d, i, c: (x.face(lv, d, i, c[0]), y.face(lv, d, i, c[1])),
        lambda lv, d, i, c: (x.degeneracy(lv, d, i, c[0]), y.degeneracy(lv, d, i, c[1])),
        plus=plus,
        cosk=cosk,
        name=name or f"({x.name}×_{f.target.name}{y.name})",
    )
    return p, projection(p, x, 0), projection(p, y, 1)


def limit_level0(f: PresheafMap, g: PresheafMap, name: str = "") -> TruncatedPresheaf:
    """Giới hạn chặt của cospan X -> Z <- Y, tính theo từng level."""
    return pullback(f, g, name)[0]


# Đối giới hạn
def quotient_presheaf(
    shape: IndexShape,
    bound: Level,
    elements: Mapping[Level, Iterable[Hashable]],
    relations: Mapping[Level, Iterable[tuple[Hashable, Hashable]]],
    face_fn: Callable[[Level, int, int, Hashable], Hashable],
    degeneracy_fn: Callable[[Level, int, int, Hashable], Hashable],
    marked: Optional[Mapping[Level, Iterable[Hashable]]] = None,
    name: str = "",
    dimension: Optional[Level] = None,
) -> tuple[TruncatedPresheaf, dict[Level, dict[Hashable, Hashable]]]:
    """Thương theo level của một presheaf "phần tử" bởi quan hệ tương đẳng sinh ra.

    face_fn/degeneracy_fn tác động trên phần tử; quan hệ phải tương thích với chúng
    (điều này đúng cho quan hệ sinh bởi ánh xạ presheaf). Ô kết quả là đại diện nhỏ nhất.
    Trả về (presheaf, level -> phần tử -> đại diện).
    """
    reps: dict[Level, dict[Hashable, Hashable]] = {}
    for level in shape.levels(bound):
        uf = UnionFind(elements.get(level, ()))
        for a, b in relations.get(level, ()):
            uf.union(a, b)
        reps[level] = uf.canonical()
    cells = {level: sorted(set(r.values()), key=cell_key) for level, r in reps.items()}
    plus = None
    if shape.marked:
        plus = {}
        for level in shape.marked_levels(bound):
            images = {reps[level][e] for e in (marked or {}).get(level, ())}
            plus[level] = {e: e for e in images}
    quotient = presheaf_from_function(
        shape,
        bound,
        cells,
        lambda lv, d, i, c: reps[shift(lv, d, -1)][face_fn(lv, d, i, c)],
        lambda lv, d, i, c: reps[shift(lv, d, +1)][degeneracy_fn(lv, d, i, c)],
        plus=plus,
        name=name,
        dimension=dimension,
    )
    logger.debug("[Quotient] name=%s cells=%s", name, {level_key(lv): len(c) for lv, c in cells.items()})
    return quotient, reps


def colimit_cocone(
    objects: Sequence[TruncatedPresheaf],
    arrows: Sequence[tuple[int, int, PresheafMap]],
    name: str = "",
) -> tuple[TruncatedPresheaf, list[PresheafMap]]:
    """Đối giới hạn của sơ đồ hữu hạn (đối tượng + mũi tên (nguồn, đích, ánh xạ)) cùng các chân."""
    if not objects:
        raise ValueError("colimit of an empty diagram needs a shape; use empty()")
    _require_same_shape(*objects)
    bounds = {x.bound for x in objects}
    if len(bounds) != 1:
        raise ShapeMismatchError(f"colimit objects have different bounds: {sorted(bounds)}")
    shape, bound = objects[0].shape, objects[0].bound
    elements = {level: [(k, c) for k, x in enumerate(objects) for c in x.cells(level)] for level in shape.levels(bound)}
    relations: dict[Level, list] = {level: [] for level in shape.levels(bound)}
    for s, t, m in arrows:
        if m.source is not objects[s] or m.target is not objects[t]:
            raise ShapeMismatchError(f"arrow {s}->{t} does not connect the listed objects")
        for level in shape.levels(bound):
            relations[level].extend(((s, c), (t, m(level, c))) for c in objects[s].cells(level))
    marked = None
    if shape.marked:
        marked = {
            level: [(k, e) for k, x in enumerate(objects) for e in x.markings(level)]
            for level in shape.marked_levels(bound)
        }
    quotient, reps = quotient_presheaf(
        shape,
        bound,
        elements,
        relations,
        lambda lv, d, i, e: (e[0], objects[e[0]].face(lv, d, i, e[1])),
        lambda lv, d, i, e: (e[0], objects[e[0]].degeneracy(lv, d, i, e[1])),
        marked,
        name or "colim",
        _join_dimension((x.dimension for x in objects), max),
    )
    legs = [
        PresheafMap(x, quotient, {level: {c: reps[level][(k, c)] for c in x.cells(level)} for level in x.levels()})
        for k, x in enumerate(objects)
    ]
    return quotient, legs


def colimit(
    objects: Sequence[TruncatedPresheaf],
    arrows: Sequence[tuple[int, int, PresheafMap]],
    name: str = "",
) -> TruncatedPresheaf:
    return colimit_cocone(objects, arrows, name)[0]


def coproduct(xs: Sequence[TruncatedPresheaf], name: str = "") -> TruncatedPresheaf:
    return colimit(xs, [], name or "⊔".join(x.name for x in xs))


def pushout(f: PresheafMap, g: PresheafMap, name: str = "") -> TruncatedPresheaf:
    """Đẩy ra của B <-f- A -g-> C."""
    return colimit([f.source, f.target, g.target], [(0, 1, f), (0, 2, g)], name or "pushout")


def coequalizer(f: PresheafMap, g: PresheafMap, name: str = "") -> TruncatedPresheaf:
    if f.target is not g.target:
        raise ShapeMismatchError("coequalizer needs parallel maps")
    a = f.source
    return colimit([a, f.target], [(0, 1, f), (0, 1, g)], name or "coeq")


# Tách được (đánh dấu)
def is_separated(p: TruncatedPresheaf) -> CheckReport:
    """Ánh xạ [1⁺] -> [1] có đơn ánh không; nhân chứng là cặp plus-cell va chạm."""
    check = "is_separated"
    if not p.shape.marked:
        return holds(check, ("unmarked-shape",))
    for level in p.plus_levels():
        seen: dict[CellId, CellId] = {}
        for pid, edge in sorted(p.plus(level).items(), key=lambda kv: cell_key(kv[0])):
            if edge in seen:
                return fails(check, {"level": level_key(level), "plus_cells": [seen[edge], pid], "edge": edge})
            seen[edge] = pid
    return holds(check, ("exact",))


# Cắt cụt, presheaf con
def truncate(x: TruncatedPresheaf, bound: int | Level, name: str = "") -> TruncatedPresheaf:
    """Hạn chế về cận nhỏ hơn (giữ chứng chỉ cosk và chiều)."""
    bound = normalize_bound(x.shape, bound)
    if any(b > xb for b, xb in zip(bound, x.bound)):
        raise BoundExceededError(f"cannot truncate {x.name} at {bound}: available only through {x.bound}")
    cells = {level: x.cells(level) for level in x.shape.levels(bound)}
    plus = {level: x.plus(level) for level in x.shape.marked_levels(bound)} if x.shape.marked else None
    return presheaf_from_function(
        x.shape, bound, cells, x.face, x.degeneracy, plus=plus, cosk=x.cosk, name=name or x.name,
        dimension=x.dimension,
    )


def subpresheaf(
    x: TruncatedPresheaf,
    keep: Callable[[Level, CellId], bool],
    name: str = "",
    cosk: Optional[int] = None,
    dimension: Optional[Level] = None,
) -> TruncatedPresheaf:
    """Presheaf con gồm các ô thỏa keep; ném InvalidPresheafError nếu không đóng với face/degeneracy."""
    cells = {level: [c for c in x.cells(level) if keep(level, c)] for level in x.levels()}
    members = {level: set(cs) for level, cs in cells.items()}
    for level, cs in cells.items():
        for c in cs:
            for d, i in x.face_keys(level):
                if x.face(level, d, i, c) not in members[shift(level, d, -1)]:
                    raise InvalidPresheafError(f"sub-object {name!r} not closed under d{d}.{i} at {c!r}")
            for d, i in x.degeneracy_keys(level):
                if x.degeneracy(level, d, i, c) not in members[shift(level, d, +1)]:
                    raise InvalidPresheafError(f"sub-object {name!r} not closed under s{d}.{i} at {c!r}")
    plus = None
    if x.shape.marked:
        plus = {
            level: {p: e for p, e in x.plus(level).items() if e in members[level]}
            for level in x.shape.marked_levels(x.bound)
        }
    return presheaf_from_function(
        x.shape, x.bound, cells, x.face, x.degeneracy, plus=plus, cosk=cosk, name=name or f"sub({x.name})",
        dimension=dimension,
    )


def generated_subpresheaf(
    x: TruncatedPresheaf,
    generators: Mapping[Level, Iterable[CellId]],
    name: str = "",
) -> TruncatedPresheaf:
    """Presheaf con nhỏ nhất chứa các ô cho trước (đóng với face và degeneracy)."""
    members: dict[Level, set] = {level: set() for level in x.levels()}
    stack = [(tuple(level), c) for level, cs in generators.items() for c in cs]
    while stack:
        level, c = stack.pop()
        if c in members[level]:
            continue
        if not x.contains(level, c):
            raise InvalidPresheafError(f"generator {c!r} is not a cell of {x.name} at {level_key(level)}")
        members[level].add(c)
        for d, i in x.face_keys(level):
            stack.append((shift(level, d, -1), x.face(level, d, i, c)))
        for d, i in x.degeneracy_keys(level):
            stack.append((shift(level, d, +1), x.degeneracy(level, d, i, c)))
    dims = [lv for lv, cs in generators.items() for _ in cs]
    dimension = tuple(max(parts) for parts in zip(*dims)) if dims else (0,) * x.shape.directions
    return subpresheaf(x, lambda lv, c: c in members[lv], name or f"<{x.name}>", dimension=dimension)


# Kéo dài hằng và trích hàng/cột
def prolong_first(s: TruncatedPresheaf, second_bound: int, name: str = "") -> TruncatedPresheaf:
    """p₁*: (k, l) -> S_k, hằng theo hướng thứ hai."""
    if s.shape.directions != 1:
        raise ShapeMismatchError("prolong_first expects a simplicial input")
    shape = IndexShape.MARKED_BISIMPLEX if s.shape.marked else IndexShape.BISIMPLEX
    bound = (s.bound[0], second_bound)
    cells = {level: s.cells(level[:1]) for level in shape.levels(bound)}
    plus = {level: s.plus(level[:1]) for level in shape.marked_levels(bound)} if s.shape.marked else None
    return presheaf_from_function(
        shape,
        bound,
        cells,
        lambda lv, d, i, c: s.face(lv[:1], 0, i, c) if d == 0 else c,
        lambda lv, d, i, c: s.degeneracy(lv[:1], 0, i, c) if d == 0 else c,
        plus=plus,
        cosk=None if s.cosk is None else max(s.cosk, 1),
        name=name or f"p1*{s.name}",
        dimension=None if s.dimension is None else (s.dimension[0], 0),
    )


def prolong_second(s: TruncatedPresheaf, first_bound: int, name: str = "") -> TruncatedPresheaf:
    """(k, l) -> S_l, hằng theo hướng thứ nhất (nhúng X_{kn} = X_n)."""
    if s.shape != IndexShape.SIMPLEX:
        raise ShapeMismatchError("prolong_second expects an unmarked simplicial input")
    shape = IndexShape.BISIMPLEX
    bound = (first_bound, s.bound[0])
    cells = {level: s.cells(level[1:]) for level in shape.levels(bound)}
    return presheaf_from_function(
        shape,
        bound,
        cells,
        lambda lv, d, i, c: s.face(lv[1:], 0, i, c) if d == 1 else c,
        lambda lv, d, i, c: s.degeneracy(lv[1:], 0, i, c) if d == 1 else c,
        cosk=None if s.cosk is None else max(s.cosk, 1),
        name=name or f"c*{s.name}",
        dimension=None if s.dimension is None else (0, s.dimension[0]),
    )


def row(x: TruncatedPresheaf, k: int, name: str = "") -> TruncatedPresheaf:
    """Hàng thứ k: l -> X_{k,l} (hướng thứ hai)."""
    if x.shape.directions != 2:
        raise ShapeMismatchError("row expects a bisimplicial input")
    if k > x.bound[0]:
        raise BoundExceededError(f"row {k} beyond bound {x.bound}")
    cells = {(l,): x.cells((k, l)) for l in range(x.bound[1] + 1)}
    return presheaf_from_function(
        IndexShape.SIMPLEX,
        x.bound[1],
        cells,
        lambda lv, d, i, c: x.face((k, lv[0]), 1, i, c),
        lambda lv, d, i, c: x.degeneracy((k, lv[0]), 1, i, c),
        cosk=x.cosk,
        name=name or f"{x.name}[{k},•]",
    )


def column(x: TruncatedPresheaf, l: int, name: str = "") -> TruncatedPresheaf:
    """Cột thứ l: k -> X_{k,l}; giữ đánh dấu ở (1, l)."""
    if x.shape.directions != 2:
        raise ShapeMismatchError("column expects a bisimplicial input")
    if l > x.bound[1]:
        raise BoundExceededError(f"column {l} beyond bound {x.bound}")
    shape = IndexShape.MARKED_SIMPLEX if x.shape.marked else IndexShape.SIMPLEX
    cells = {(k,): x.cells((k, l)) for k in range(x.bound[0] + 1)}
    plus = {(1,): x.plus((1, l))} if x.shape.marked and x.bound[0] >= 1 else None
    return presheaf_from_function(
        shape,
        x.bound[0],
        cells,
        lambda lv, d, i, c: x.face((lv[0], l), 0, i, c),
        lambda lv, d, i, c: x.degeneracy((lv[0], l), 0, i, c),
        plus=plus,
        cosk=x.cosk,
        name=name or f"{x.name}[•,{l}]",
    )


def is_constant_in(x: TruncatedPresheaf, direction: int) -> Optional[str]:
    """None nếu mọi face theo hướng đã cho là song ánh (đối tượng hằng theo hướng đó)."""
    for level in x.levels():
        if level[direction] < 1:
            continue
        lower = shift(level, direction, -1)
        for i in range(level[direction] + 1):
            table = x.face_map(level, direction, i)
            if len(set(table.values())) != len(table) or len(table) != x.count(lower):
                return f"d{direction}.{i} at {level_key(level)} is not a bijection"
    return None


def require_constant(x: TruncatedPresheaf, direction: int) -> None:
    defect = is_constant_in(x, direction)
    if defect is not None:
        raise NotConstantError(f"{x.name} is not constant in direction {direction}: {defect}")


# Coskeleton
def boundary_tuples(x: TruncatedPresheaf, level: Level, d: int) -> Iterator[tuple[CellId, ...]]:
    """Các bộ biên tương thích (y_0..y_n) theo hướng d: d_i y_j = d_{j-1} y_i với i < j."""
    level = tuple(level)
    n = level[d]
    lower = shift(level, d, -1)
    candidates = x.cells(lower)
    if n == 1:
        yield from cartesian(candidates, repeat=2)
        return
    index: list[dict[tuple, list[CellId]]] = [dict() for _ in range(n + 1)]
    for y in candidates:
        faces = tuple(x.face(lower, d, i, y) for i in range(n))
        for j in range(n + 1):
            index[j].setdefault(faces[:j], []).append(y)

    def extend(partial: tuple) -> Iterator[tuple]:
        j = len(partial)
        if j == n + 1:
            yield partial
            return
        required = tuple(x.face(lower, d, j - 1, partial[i]) for i in range(j))
        for y in index[j].get(required, ()):
            yield from extend(partial + (y,))

    yield from extend(())


def coskeletal_counts(x: TruncatedPresheaf, c: int) -> list[dict]:
    """Với mỗi (hướng, level) trên c: số ô, số bộ biên tương thích, và tính đơn ánh."""
    rows: list[dict] = []
    for level in x.levels():
        for d in range(x.shape.directions):
            if level[d] <= c:
                continue
            boundaries = {}
            injective = True
            for cell in x.cells(level):
                key = tuple(x.face(level, d, i, cell) for i in range(level[d] + 1))
                if key in boundaries:
                    injective = False
                boundaries[key] = cell
            tuples = sum(1 for _ in boundary_tuples(x, level, d))
            rows.append(
                {
                    "level": level_key(level),
                    "direction": d,
                    "cells": x.count(level),
                    "boundary_tuples": tuples,
                    "injective": injective,
                    "bijective": injective and tuples == x.count(level),
                }
            )
    return rows


def coskeletal_defect(x: TruncatedPresheaf, c: int) -> Optional[str]:
    for row_info in coskeletal_counts(x, c):
        if not row_info["bijective"]:
            return (
                f"level {row_info['level']} direction {row_info['direction']}: "
                f"{row_info['cells']} cells vs {row_info['boundary_tuples']} boundary tuples"
                + ("" if row_info["injective"] else " (boundary map not injective)")
            )
    return None
