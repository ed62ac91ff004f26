"""Các đối tượng chuẩn: Δ[n], ∂Δ[n], Λ[n]_i, Sp[n], J[l], F(n), E(n), G(n), ∂F(n), L(n)_l, τ(o).

Ô của Δ[n] ở level k là bộ đơn điệu (k+1 phần tử) trong [n]; ô của J[l] là bộ tùy ý
trong [l] (nerve của nhóm phỏng hỗn độn I[l]). Đối tượng con dùng chung định danh ô
với đối tượng mẹ, nên mọi bao hàm chuẩn là đồng nhất trên ô.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import product as cartesian
from typing import Callable, Optional

from core.config.defaults import DEFAULT_DIM_BOUND
from core.marked.marked_objects import flat, sharp
from core.presheaf.operators import monotone_maps
from core.presheaf.ops import inclusion, prolong_first, prolong_second, subpresheaf
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, presheaf_from_function
from core.presheaf.shape import PLUS, IndexShape
from core.types.cell_types import Level
from core.types.errors import IllegalSpecError

logger = logging.getLogger(__name__)


class StandardKind(Enum):
    SIMPLEX = "simplex"
    BOUNDARY = "boundary"
    HORN = "horn"
    SPINE = "spine"
    GROUPOID_NERVE = "groupoid"
    F_GEN = "F"
    E_GEN = "E"
    G_GEN = "G"
    F_BOUNDARY = "dF"
    F_HORN = "L"
    CONST_COL = "const"
    TAU_OBJ = "tau"
    MARKED_GEN = "marked"

    @property
    def bisimplicial(self) -> bool:
        return self in (
            StandardKind.F_GEN,
            StandardKind.E_GEN,
            StandardKind.G_GEN,
            StandardKind.F_BOUNDARY,
            StandardKind.F_HORN,
            StandardKind.CONST_COL,
        )

    @property
    def marked(self) -> bool:
        return self in (StandardKind.TAU_OBJ, StandardKind.MARKED_GEN)


@dataclass(frozen=True)
class StandardObjectSpec:
    kind: StandardKind
    params: tuple = ()

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        kind, params = self.kind, self.params
        arity = 2 if kind in (StandardKind.HORN, StandardKind.F_HORN) else 1
        if len(params) != arity:
            raise IllegalSpecError(f"{kind.value} takes {arity} parameter(s), got {params}")
        if kind.marked:
            o = params[0]
            if o != PLUS and not (isinstance(o, int) and o >= 0):
                raise IllegalSpecError(f"{kind.value} object must be a natural number or {PLUS!r}, got {o!r}")
            return
        if not all(isinstance(p, int) and p >= 0 for p in params):
            raise IllegalSpecError(f"{kind.value} parameters must be natural numbers, got {params}")
        n = params[0]
        if kind in (StandardKind.HORN, StandardKind.F_HORN):
            if n < 1 or not 0 <= params[1] <= n:
                raise IllegalSpecError(f"horn ({n}, {params[1]}) needs n >= 1 and 0 <= i <= n")
        if kind is StandardKind.G_GEN and n < 2:
            raise IllegalSpecError(f"G({n}) needs n >= 2")

    @property
    def n(self):
        return self.params[0]

    @property
    def label(self) -> str:
        p = self.params
        return {
            StandardKind.SIMPLEX: lambda: f"Δ[{p[0]}]",
            StandardKind.BOUNDARY: lambda: f"∂Δ[{p[0]}]",
            StandardKind.HORN: lambda: f"Λ[{p[0]}]_{p[1]}",
            StandardKind.SPINE: lambda: f"Sp[{p[0]}]",
            StandardKind.GROUPOID_NERVE: lambda: f"J[{p[0]}]",
            StandardKind.F_GEN: lambda: f"F({p[0]})",
            StandardKind.E_GEN: lambda: f"E({p[0]})",
            StandardKind.G_GEN: lambda: f"G({p[0]})",
            StandardKind.F_BOUNDARY: lambda: f"∂F({p[0]})",
            StandardKind.F_HORN: lambda: f"L({p[0]})_{p[1]}",
            StandardKind.CONST_COL: lambda: f"Δ[{p[0]}]ᵛ",
            StandardKind.TAU_OBJ: lambda: f"τ({p[0]})",
            StandardKind.MARKED_GEN: lambda: f"Δ⁺[{p[0]}]",
        }[self.kind]()

    @staticmethod
    def parse(kind: str, params: list[str]) -> "StandardObjectSpec":
        """Từ dòng lệnh: "horn 2 1", "tau 1+", "F 3"."""
        try:
            k = next(sk for sk in StandardKind if sk.value.lower() == kind.lower() or sk.name.lower() == kind.lower())
        except StopIteration:
            raise IllegalSpecError(f"unknown standard object kind: {kind!r}") from None
        parsed = tuple(p if p == PLUS else int(p) for p in params)
        return StandardObjectSpec(k, parsed)


def obj_spec(kind: StandardKind, *params) -> StandardObjectSpec:
    return StandardObjectSpec(kind, tuple(params))


# Dựng theo bộ đỉnh
def _delete(cell: tuple, i: int) -> tuple:
    return cell[:i] + cell[i + 1:]


def _repeat(cell: tuple, i: int) -> tuple:
    return cell[: i + 1] + cell[i:]


def vertex_tuple_presheaf(
    bound: int,
    cells_at: Callable[[int], list[tuple]],
    name: str,
    cosk: Optional[int],
    dimension: Optional[int],
    validate: bool = False,
) -> TruncatedPresheaf:
    """Presheaf đơn hình có ô là bộ đỉnh; d_i xóa vị trí i, s_i lặp vị trí i."""
    cells = {(k,): cells_at(k) for k in range(bound + 1)}
    return presheaf_from_function(
        IndexShape.SIMPLEX,
        bound,
        cells,
        lambda lv, d, i, c: _delete(c, i),
        lambda lv, d, i, c: _repeat(c, i),
        cosk=cosk,
        name=name,
        validate=validate,
        dimension=dimension,
    )


def standard_simplex(n: int, bound: int = DEFAULT_DIM_BOUND) -> TruncatedPresheaf:
    return vertex_tuple_presheaf(bound, lambda k: list(monotone_maps(k, n)), f"Δ[{n}]", n, n)


def groupoid_nerve(l: int, bound: int = DEFAULT_DIM_BOUND) -> TruncatedPresheaf:
    """J[l]: ô level k là mọi bộ (k+1) đối tượng của I[l]."""
    return vertex_tuple_presheaf(
        bound, lambda k: list(cartesian(range(l + 1), repeat=k + 1)), f"J[{l}]", 2, None
    )


def boundary(n: int, bound: int = DEFAULT_DIM_BOUND) -> TruncatedPresheaf:
    full = set(range(n + 1))
    return subpresheaf(
        standard_simplex(n, bound), lambda lv, c: set(c) != full, f"∂Δ[{n}]", cosk=n, dimension=(max(n - 1, 0),)
    )


def horn(n: int, i: int, bound: int = DEFAULT_DIM_BOUND) -> TruncatedPresheaf:
    """Λ[n]_i: hợp các mặt d_j với j != i, tức ô bỏ sót ít nhất một đỉnh j != i."""
    others = [j for j in range(n + 1) if j != i]
    return subpresheaf(
        standard_simplex(n, bound),
        lambda lv, c: any(j not in c for j in others),
        f"Λ[{n}]_{i}",
        cosk=n,
        dimension=(n - 1,),
    )


def spine(n: int, bound: int = DEFAULT_DIM_BOUND) -> TruncatedPresheaf:
    """Sp[n]: các ô có max - min <= 1 (chuỗi các cạnh liên tiếp)."""
    return subpresheaf(
        standard_simplex(n, bound), lambda lv, c: c[-1] - c[0] <= 1, f"Sp[{n}]", cosk=n, dimension=(min(n, 1),)
    )


def _bisimplicial_bound(dim_bound: int | Level) -> Level:
    return (dim_bound, dim_bound) if isinstance(dim_bound, int) else tuple(dim_bound)


def build(spec: StandardObjectSpec, dim_bound: int | Level = DEFAULT_DIM_BOUND) -> TruncatedPresheaf:
    """Dựng đối tượng có tên, cắt cụt ở dim_bound (hai hướng với đối tượng song đơn hình)."""
    kind, p = spec.kind, spec.params
    if kind.bisimplicial:
        b0, b1 = _bisimplicial_bound(dim_bound)
        simplicial = {
            StandardKind.F_GEN: lambda: standard_simplex(p[0], b0),
            StandardKind.E_GEN: lambda: groupoid_nerve(p[0], b0),
            StandardKind.G_GEN: lambda: spine(p[0], b0),
            StandardKind.F_BOUNDARY: lambda: boundary(p[0], b0),
            StandardKind.F_HORN: lambda: horn(p[0], p[1], b0),
        }
        if kind is StandardKind.CONST_COL:
            return prolong_second(standard_simplex(p[0], b1), b0, spec.label)
        return prolong_first(simplicial[kind](), b1, spec.label)
    bound = dim_bound if isinstance(dim_bound, int) else dim_bound[0]
    if kind.marked:
        if p[0] == PLUS:
            return sharp(standard_simplex(1, bound)).renamed(spec.label)
        return flat(standard_simplex(p[0], bound)).renamed(spec.label)
    builders = {
        StandardKind.SIMPLEX: lambda: standard_simplex(p[0], bound),
        StandardKind.BOUNDARY: lambda: boundary(p[0], bound),
        StandardKind.HORN: lambda: horn(p[0], p[1], bound),
        StandardKind.SPINE: lambda: spine(p[0], bound),
        StandardKind.GROUPOID_NERVE: lambda: groupoid_nerve(p[0], bound),
    }
    x = builders[kind]()
    logger.debug("[Gen] kind=%s bound=%s cells=%s", spec.label, bound, x.nondegenerate_counts())
    return x


# Bao hàm chuẩn
_SUBOBJECT_PAIRS = {
    (StandardKind.HORN, StandardKind.SIMPLEX),
    (StandardKind.BOUNDARY, StandardKind.SIMPLEX),
    (StandardKind.SPINE, StandardKind.SIMPLEX),
    (StandardKind.G_GEN, StandardKind.F_GEN),
    (StandardKind.F_BOUNDARY, StandardKind.F_GEN),
    (StandardKind.F_HORN, StandardKind.F_GEN),
    (StandardKind.SIMPLEX, StandardKind.GROUPOID_NERVE),
}


def vertex_map(source: TruncatedPresheaf, target: TruncatedPresheaf, v: int) -> PresheafMap:
    """Ánh xạ từ điểm (ô là bộ toàn 0) tới đỉnh v (ô là bộ toàn v)."""
    comps = {level: {c: tuple(v for _ in c) for c in source.cells(level)} for level in source.levels()}
    return PresheafMap(source, target, comps, validate=True)


def canonical_inclusion(
    sub: StandardObjectSpec,
    ambient: StandardObjectSpec,
    dim_bound: int | Level = DEFAULT_DIM_BOUND,
    vertex: Optional[int] = None,
) -> PresheafMap:
    """Bao hàm chuẩn giữa hai đối tượng có tên (đã kiểm tra)."""
    pair = (sub.kind, ambient.kind)
    a, b = build(sub, dim_bound), build(ambient, dim_bound)
    if pair in _SUBOBJECT_PAIRS and sub.n == ambient.n:
        return inclusion(a, b)
    if pair == (StandardKind.SIMPLEX, StandardKind.SIMPLEX) and sub.n == 0:
        v = ambient.n if vertex is None else vertex
        if not 0 <= v <= ambient.n:
            raise IllegalSpecError(f"vertex {v} not in [{ambient.n}]")
        return vertex_map(a, b, v)
    if pair == (StandardKind.F_GEN, StandardKind.F_GEN) and sub.n == 0:
        v = ambient.n if vertex is None else vertex
        if not 0 <= v <= ambient.n:
            raise IllegalSpecError(f"vertex {v} not in [{ambient.n}]")
        return vertex_map(a, b, v)
    if pair == (StandardKind.F_GEN, StandardKind.E_GEN) and sub.n == 0 and ambient.n == 1:
        return vertex_map(a, b, 0 if vertex is None else vertex)
    if sub.kind.marked and ambient.kind.marked and sub.n == 1 and ambient.n == PLUS:
        return inclusion(a, b)
    raise IllegalSpecError(f"({sub.label}, {ambient.label}) is not a recognized generating map")
