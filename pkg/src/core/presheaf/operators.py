"""Ánh xạ đơn điệu [a] -> [n] (toán tử đơn hình) dạng tuple và tác động lên ô."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from typing import TYPE_CHECKING, Sequence

from core.types.cell_types import CellId, Level

if TYPE_CHECKING:
    from core.presheaf.presheaf import TruncatedPresheaf

Operator = tuple[int, ...]


@lru_cache(maxsize=None)
def monotone_maps(k: int, n: int) -> tuple[Operator, ...]:
    """Mọi ánh xạ đơn điệu [k] -> [n], theo thứ tự từ điển."""
    return tuple(combinations_with_replacement(range(n + 1), k + 1))


def identity(n: int) -> Operator:
    return tuple(range(n + 1))


def coface(n: int, i: int) -> Operator:
    """δ_i: [n-1] -> [n] bỏ qua giá trị i."""
    return tuple(v if v < i else v + 1 for v in range(n))


def codegeneracy(n: int, i: int) -> Operator:
    """σ_i: [n+1] -> [n] lặp lại giá trị i."""
    return tuple(v if v <= i else v - 1 for v in range(n + 2))


def compose(f: Operator, g: Operator) -> Operator:
    """f ∘ g (g áp dụng trước)."""
    return tuple(f[v] for v in g)


def is_surjective(f: Operator, n: int) -> bool:
    return set(f) == set(range(n + 1))


def epi_mono(f: Operator, n: int) -> tuple[list[int], list[int]]:
    """Phân tích f = mono ∘ epi.

    Trả về (giá trị bị thiếu trong [n], các vị trí i với f(i) == f(i+1)); đó lần lượt
    là chỉ số face cần áp dụng và chỉ số degeneracy cần áp dụng lên ô.
    """
    image = sorted(set(f))
    missing = [v for v in range(n + 1) if v not in set(image)]
    repeats = [i for i in range(len(f) - 1) if f[i] == f[i + 1]]
    return missing, repeats


def act(x: "TruncatedPresheaf", level: Level, cell: CellId, ops: Sequence[Operator]) -> tuple[Level, CellId]:
    """Tác động X(θ)(cell) với θ = (θ_0, ..., θ_{r-1}) theo từng hướng.

    Face áp dụng trước (giảm dần theo chỉ số), degeneracy sau (tăng dần), nên mọi
    level trung gian nằm trong cận khi cả nguồn lẫn đích nằm trong cận.
    """
    current_level = tuple(level)
    current = cell
    plans = [epi_mono(op, level[d]) for d, op in enumerate(ops)]
    for d, (missing, _) in enumerate(plans):
        for v in reversed(missing):
            current = x.face(current_level, d, v, current)
            current_level = _shift(current_level, d, -1)
    for d, (_, repeats) in enumerate(plans):
        for i in repeats:
            current = x.degeneracy(current_level, d, i, current)
            current_level = _shift(current_level, d, +1)
    return current_level, current


def _shift(level: Level, d: int, delta: int) -> Level:
    return level[:d] + (level[d] + delta,) + level[d + 1:]
