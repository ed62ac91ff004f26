"""Bài toán nâng, các lớp phân thớ định nghĩa bởi tính chất nâng phải, và phát hiện quasi-category.

Mỗi lớp cho một tập ánh xạ sinh A -> B (horn, biên) tới trần chiều cap. has_rlp duyệt
mọi hình vuông (top: A -> X, bottom: B -> Y) với f ∘ top = bottom ∘ i và tìm đường chéo.
Kết luận "fails" luôn đúng; "holds" chỉ được khẳng định chính xác khi X, Y có chứng chỉ
coskeletal đủ nhỏ so với cap, còn lại hạ xuống inconclusive.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from core.config.defaults import lift_cap
from core.hom.hom_engine import enumerate_hom, search_maps
from core.marked.marked_objects import flat
from core.metrics.metrics import GLOBAL_METRICS, SearchMetrics
from core.presheaf.ops import common_bound, inclusion, terminal
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf
from core.presheaf.serialize import components_to_dict
from core.presheaf.shape import IndexShape
from core.report.check_report import CheckReport, fails, holds, inconclusive
from core.standard.objects import boundary, horn, standard_simplex
from core.types.errors import InvalidMapError, ShapeMismatchError

logger = logging.getLogger(__name__)


class FibrationClass(Enum):
    KAN = "kan"
    INNER = "inner"
    LEFT = "left"
    RIGHT = "right"
    TRIVIAL_KAN = "trivial"
    MARKED_ANODYNE_SHADOW = "marked-anodyne"

    def horn_indices(self, n: int) -> list[int]:
        """Chỉ số i của các horn Λ[n]_i thuộc lớp."""
        if self is FibrationClass.KAN:
            return list(range(n + 1)) if n >= 1 else []
        if self is FibrationClass.INNER:
            return list(range(1, n)) if n >= 2 else []
        if self is FibrationClass.LEFT:
            return list(range(n)) if n >= 1 else []
        if self is FibrationClass.RIGHT:
            return list(range(1, n + 1)) if n >= 1 else []
        return []

    @staticmethod
    def parse(text: str) -> "FibrationClass":
        for cls in FibrationClass:
            if cls.value == text.strip().lower() or cls.name.lower() == text.strip().lower():
                return cls
        raise ValueError(f"unknown fibration class: {text!r}")


@dataclass(frozen=True)
class Generator:
    label: str
    n: int
    map: PresheafMap


def _marked_horn(n: int, bound: int) -> PresheafMap:
    """Λ[n]_n -> Δ[n] với cạnh cuối (n-1, n) được đánh dấu ở cả hai phía."""
    last = (n - 1, n)
    big = flat(standard_simplex(n, bound))
    big = big.with_markings({(1,): big.markings((1,)) | {last}}).renamed(f"Δ[{n}]^(n-1,n)")
    small = flat(horn(n, n, bound))
    marks = small.markings((1,)) | ({last} if small.contains((1,), last) else frozenset())
    small = small.with_markings({(1,): marks}).renamed(f"Λ[{n}]_{n}^(n-1,n)")
    return inclusion(small, big)


def generators(cls: FibrationClass, cap: int, bound: int) -> list[Generator]:
    """Tập sinh của lớp tới chiều cap, mỗi đối tượng dựng ở cận bound (>= cap)."""
    out: list[Generator] = []
    for n in range(cap + 1):
        if cls is FibrationClass.TRIVIAL_KAN:
            out.append(Generator(f"∂Δ[{n}]->Δ[{n}]", n, inclusion(boundary(n, bound), standard_simplex(n, bound))))
            continue
        if cls is FibrationClass.MARKED_ANODYNE_SHADOW:
            for i in FibrationClass.INNER.horn_indices(n):
                a, b = flat(horn(n, i, bound)), flat(standard_simplex(n, bound))
                out.append(Generator(f"Λ[{n}]_{i}♭->Δ[{n}]♭", n, inclusion(a, b)))
            if n >= 1:
                out.append(Generator(f"Λ[{n}]_{n}^(n-1,n)->Δ[{n}]^(n-1,n)", n, _marked_horn(n, bound)))
            continue
        for i in cls.horn_indices(n):
            out.append(Generator(f"Λ[{n}]_{i}->Δ[{n}]", n, inclusion(horn(n, i, bound), standard_simplex(n, bound))))
    return out


@dataclass
class LiftingProblem:
    """Hình vuông i: A -> B, f: X -> Y, top: A -> X, bottom: B -> Y."""

    i: PresheafMap
    f: PresheafMap
    top: PresheafMap
    bottom: PresheafMap

    def validate(self) -> "LiftingProblem":
        for level in self.i.source.levels():
            if level not in self.top.components():
                continue
            for a in self.i.source.cells(level):
                if self.f(level, self.top(level, a)) != self.bottom(level, self.i(level, a)):
                    raise InvalidMapError(f"lifting square does not commute at {a!r}")
        return self

    def witness(self) -> dict:
        return {"top": components_to_dict(self.top), "bottom": components_to_dict(self.bottom)}


def _fixed_from_top(p: LiftingProblem) -> Optional[dict]:
    """Ảnh cố định của đường chéo trên i(A); None nếu i đồng nhất hai ô có ảnh khác nhau."""
    fixed: dict = {}
    for level, comp in p.top.components().items():
        table = fixed.setdefault(level, {})
        for a, image in comp.items():
            b = p.i(level, a)
            if table.setdefault(b, image) != image:
                return None
    return fixed


def find_diagonal(p: LiftingProblem, metrics: Optional[SearchMetrics] = None) -> Optional[PresheafMap]:
    fixed = _fixed_from_top(p)
    if fixed is None:
        return None
    _, found = search_maps(p.i.target, p.f.source, fixed=fixed, over=(p.f, p.bottom), limit=1, metrics=metrics)
    return found[0] if found else None


def solve_lift(p: LiftingProblem, metrics: Optional[SearchMetrics] = None) -> CheckReport:
    """Tìm đường chéo B -> X; holds kèm đường chéo đã kiểm tra lại."""
    check = "solve_lift"
    p.validate()
    b, x = p.i.target, p.f.source
    complete = b.dimension is not None and all(dm <= cb for dm, cb in zip(b.dimension, common_bound(b, x)))
    flags = ("exact",) if complete else (f"bounded-at-{','.join(map(str, common_bound(b, x)))}",)
    diagonal = find_diagonal(p, metrics)
    (metrics or GLOBAL_METRICS).record_square(diagonal is not None)
    if diagonal is not None:
        diagonal.validate()
        return holds(check, flags, diagonal=components_to_dict(diagonal))
    if not complete:
        return inconclusive(check, flags, witness=p.witness(), reason="search stopped at the truncation ceiling")
    return fails(check, p.witness(), flags)


def _certified_exact(f: PresheafMap, cls: FibrationClass, cap: int) -> Optional[int]:
    """c nếu cả hai đầu có chứng chỉ cosk và cap đủ để kết luận holds chính xác."""
    certs = [f.source.cosk, f.target.cosk]
    if any(c is None for c in certs):
        return None
    c = max(certs)
    needed = c if cls is FibrationClass.TRIVIAL_KAN else c + 1
    return c if cap >= needed else None


def _check_generator(
    f: PresheafMap, gen: Generator, metrics: SearchMetrics
) -> tuple[Optional[dict], int]:
    """Nhân chứng của hình vuông đầu tiên không nâng được (hoặc None) và số hình vuông đã xét."""
    i = gen.map
    squares = 0
    for bottom in enumerate_hom(i.target, f.target, metrics=metrics):
        _, tops = search_maps(i.source, f.source, over=(f, i.then(bottom)), metrics=metrics)
        for top in tops:
            squares += 1
            p = LiftingProblem(i, f, top, bottom)
            diagonal = find_diagonal(p, metrics)
            metrics.record_square(diagonal is not None)
            if diagonal is None:
                return {"generator": gen.label, **p.witness()}, squares
    return None, squares


def has_rlp(
    f: PresheafMap,
    cls: FibrationClass,
    cap: Optional[int] = None,
    workers: int = 1,
    metrics: Optional[SearchMetrics] = None,
) -> CheckReport:
    """f có tính chất nâng phải với mọi ánh xạ sinh của lớp tới chiều cap không."""
    started = time.perf_counter_ns()
    metrics = metrics or GLOBAL_METRICS
    check = f"has_rlp[{cls.value}]"
    if cls is FibrationClass.MARKED_ANODYNE_SHADOW and not f.source.shape.marked:
        raise ShapeMismatchError("the marked anodyne shadow needs a map of marked simplicial sets")
    if f.source.shape.directions != 1:
        raise ShapeMismatchError("lifting properties are checked for maps of simplicial sets")
    bound = common_bound(f.source, f.target)[0]
    cap = min(lift_cap() if cap is None else cap, bound)
    gens = generators(cls, cap, bound)
    if workers > 1 and len(gens) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda g: _check_generator(f, g, metrics), gens))
    else:
        results = []
        for gen in gens:
            results.append(_check_generator(f, gen, metrics))
            if results[-1][0] is not None:
                break
    squares = sum(n for _, n in results)
    witness = next((w for w, _ in results if w is not None), None)
    elapsed = (time.perf_counter_ns() - started) // 1000
    cert = _certified_exact(f, cls, cap)
    details = {"cap": cap, "generators": [g.label for g in gens], "squares": squares}
    if witness is not None:
        report = fails(check, witness, ("exact",), **details)
    elif cert is not None:
        report = holds(check, (f"exact-by-coskeletality-{cert}",), **details)
    else:
        report = inconclusive(check, (f"checked-through-cap-{cap}",), **details)
    logger.info(
        "[Lift] class=%s cap=%d squares=%d verdict=%s elapsed_us=%d", cls.value, cap, squares, report.verdict.value, elapsed
    )
    return report


def to_point(s: TruncatedPresheaf) -> PresheafMap:
    pt = terminal(s.shape, s.bound)
    return PresheafMap(s, pt, {level: {c: "*" for c in s.cells(level)} for level in s.levels()})


def is_quasicategory(s: TruncatedPresheaf, cap: Optional[int] = None) -> CheckReport:
    if s.shape is not IndexShape.SIMPLEX:
        raise ShapeMismatchError(f"is_quasicategory expects a simplicial set, got {s.shape.value}")
    report = has_rlp(to_point(s), FibrationClass.INNER, cap)
    return CheckReport(report.verdict, "is_quasicategory", report.witness, report.exactness, report.details)

