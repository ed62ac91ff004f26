"""Sinh corpus ngẫu nhiên tất định theo seed.

- Tập đơn hình / song đơn hình: gắn ô dần dần (presheaf con sinh bởi vài ô của Δ[N] hoặc Δ[a]⊠Δ[b]),
  nên luôn hợp lệ và tách được.
- Phạm trù: poset ngẫu nhiên, nhóm phỏng hỗn loạn, hoặc bảng hợp thành ngẫu nhiên (loại bỏ khi vi phạm kết hợp).
- Sơ đồ F: P^op -> Cat trên poset ngẫu nhiên P với thớ nhỏ và hàm tử chuyển chọn ngẫu nhiên.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from core.category.finite_category import (
    CatFunctor,
    FiniteCategory,
    chaotic,
    discrete_category,
    functors,
    save_category,
    thin_category,
)
from core.category.grothendieck import CatDiagram
from core.config.defaults import (
    CATEGORY_MAX_ISOS,
    DEFAULT_SEED,
    DEFAULT_SUITE_CASES,
    PROGRESS_EVERY,
    TRANSFER_BOUND,
)
from core.marked.marked_objects import MarkingPolicy, with_policy
from core.presheaf.ops import generated_subpresheaf, product, prolong_first, prolong_second
from core.presheaf.presheaf import TruncatedPresheaf
from core.presheaf.serialize import save_presheaf
from core.standard.objects import standard_simplex
from core.types.errors import InvalidCategoryError

logger = logging.getLogger(__name__)

SHAPES = ("simplex", "bisimplex", "marked")
MAX_ATTACH_TRIES = 20
MAX_TABLE_TRIES = 50
MAX_CATEGORY_TRIES = 50


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = DEFAULT_SEED
    objects: int = DEFAULT_SUITE_CASES
    max_nondegenerate: int = 12
    shape_mix: tuple[str, ...] = SHAPES
    categories: int = 10
    max_category_objects: int = 4
    max_category_isos: Optional[int] = CATEGORY_MAX_ISOS
    diagrams: int = 10
    max_base_objects: int = 3
    max_fiber_objects: int = 3
    bound: int = TRANSFER_BOUND

    def __post_init__(self) -> None:
        unknown = set(self.shape_mix) - set(SHAPES)
        if unknown:
            raise ValueError(f"unknown shapes in shape_mix: {sorted(unknown)}")
        if min(self.objects, self.categories, self.diagrams) < 0:
            raise ValueError("corpus sizes must be non-negative")
        if self.max_category_objects < 1 or self.max_base_objects < 1 or self.max_fiber_objects < 1:
            raise ValueError("category size caps must be at least 1")

    @staticmethod
    def empty(seed: int = DEFAULT_SEED) -> "CorpusSpec":
        return CorpusSpec(seed=seed, objects=0, categories=0, diagrams=0)


@dataclass
class Corpus:
    spec: CorpusSpec
    simplicial: list[TruncatedPresheaf] = field(default_factory=list)
    bisimplicial: list[TruncatedPresheaf] = field(default_factory=list)
    marked: list[TruncatedPresheaf] = field(default_factory=list)
    categories: list[FiniteCategory] = field(default_factory=list)
    diagrams: list[CatDiagram] = field(default_factory=list)
    rejections: int = 0

    @property
    def is_empty(self) -> bool:
        return not (self.simplicial or self.bisimplicial or self.marked or self.categories or self.diagrams)

    def summary(self) -> dict[str, int]:
        return {
            "simplicial": len(self.simplicial),
            "bisimplicial": len(self.bisimplicial),
            "marked": len(self.marked),
            "categories": len(self.categories),
            "diagrams": len(self.diagrams),
            "rejections": self.rejections,
        }


def _pick(rng: np.random.Generator, items: list):
    return items[int(rng.integers(len(items)))]


def _increasing(rng: np.random.Generator, top: int, size: int) -> tuple[int, ...]:
    return tuple(sorted(int(v) for v in rng.choice(top + 1, size=size, replace=False)))


# Tập đơn hình bằng gắn ô
def random_simplicial(rng: np.random.Generator, bound: int, max_nondegenerate: int, name: str) -> TruncatedPresheaf:
    """Presheaf con của Δ[N] sinh bởi 1..3 đơn hình không suy biến có chiều <= bound."""
    top = int(rng.integers(1, 4))
    ambient = standard_simplex(top, bound)
    for _ in range(MAX_ATTACH_TRIES):
        gens: dict[tuple[int], list] = {}
        for _ in range(int(rng.integers(1, 4))):
            k = int(rng.integers(0, min(top, bound) + 1))
            gens.setdefault((k,), []).append(_increasing(rng, top, k + 1))
        x = generated_subpresheaf(ambient, gens, name=name)
        if x.total_nondegenerate() <= max_nondegenerate:
            return x
    return generated_subpresheaf(ambient, {(0,): [(0,)]}, name=name)


def random_bisimplicial(rng: np.random.Generator, bound: int, max_nondegenerate: int, name: str) -> TruncatedPresheaf:
    """Presheaf con của Δ[a]⊠Δ[b] sinh bởi vài song đơn hình không suy biến."""
    a, b = int(rng.integers(0, 3)), int(rng.integers(0, 3))
    ambient = product(
        prolong_first(standard_simplex(a, bound), bound), prolong_second(standard_simplex(b, bound), bound)
    )
    for _ in range(MAX_ATTACH_TRIES):
        gens: dict[tuple[int, int], list] = {}
        for _ in range(int(rng.integers(1, 3))):
            k = int(rng.integers(0, min(a, bound) + 1))
            l = int(rng.integers(0, min(b, bound) + 1))
            gens.setdefault((k, l), []).append((_increasing(rng, a, k + 1), _increasing(rng, b, l + 1)))
        x = generated_subpresheaf(ambient, gens, name=name)
        if x.total_nondegenerate() <= max_nondegenerate:
            return x
    return generated_subpresheaf(ambient, {(0, 0): [((0,), (0,))]}, name=name)


def random_marked(rng: np.random.Generator, bound: int, max_nondegenerate: int, name: str) -> TruncatedPresheaf:
    s = random_simplicial(rng, bound, max_nondegenerate, name)
    edges = [e for e in s.cells((1,)) if s.is_degenerate((1,), e) or rng.random() < 0.5]
    return with_policy(s, MarkingPolicy.explicit(edges)).renamed(name)


# Phạm trù ngẫu nhiên
def random_poset(rng: np.random.Generator, n_objects: int, name: str) -> FiniteCategory:
    """Bao đóng bắc cầu của một DAG ngẫu nhiên trên 0 < 1 < ... < n-1."""
    reach = np.eye(n_objects, dtype=bool)
    for i in range(n_objects):
        for j in range(i + 1, n_objects):
            reach[i, j] = rng.random() < 0.5
    for k in range(n_objects):
        reach |= reach[:, [k]] & reach[[k], :]
    return thin_category(n_objects, lambda i, j: bool(reach[i, j]), name)


def random_table_category(rng: np.random.Generator, n_objects: int, name: str) -> Optional[FiniteCategory]:
    """Một lần thử: cấu xạ và bảng hợp thành ngẫu nhiên; None nếu bảng không là phạm trù."""
    objects = [str(i) for i in range(n_objects)]
    homs: dict[tuple[str, str], list[str]] = {(o, o): [f"id{o}"] for o in objects}
    arrows: list[tuple[str, str, str]] = []
    for k in range(int(rng.integers(1, 4))):
        a, b = _pick(rng, objects), _pick(rng, objects)
        homs.setdefault((a, b), []).append(f"m{k}")
        arrows.append((f"m{k}", a, b))
    comp: dict[tuple[str, str], str] = {}
    for g, gs, gt in arrows:
        for f, fs, ft in arrows:
            if ft != gs:
                continue
            choices = homs.get((fs, gt), [])
            if not choices:
                return None
            comp[(g, f)] = _pick(rng, choices)
    try:
        return FiniteCategory(objects, homs, comp, {o: f"id{o}" for o in objects}, name=name)
    except InvalidCategoryError:
        return None


def _draw_category(rng: np.random.Generator, max_objects: int, name: str) -> tuple[FiniteCategory, int]:
    n_objects = int(rng.integers(1, max_objects + 1))
    kind = _pick(rng, ["poset", "groupoid", "discrete", "table"])
    if kind == "poset":
        return random_poset(rng, n_objects, name), 0
    if kind == "groupoid":
        c = chaotic(n_objects - 1)
        c.name = name
        return c, 0
    if kind == "discrete":
        return discrete_category([str(i) for i in range(n_objects)], name=name), 0
    for attempt in range(MAX_TABLE_TRIES):
        c = random_table_category(rng, n_objects, name)
        if c is not None:
            return c, attempt
    return random_poset(rng, n_objects, name), MAX_TABLE_TRIES


def nonidentity_isos(c: FiniteCategory) -> int:
    return sum(1 for m in c.isomorphisms() if not c.is_identity(m))


def random_category(
    rng: np.random.Generator, max_objects: int, name: str, max_isos: Optional[int] = None
) -> tuple[FiniteCategory, int]:
    """Trả về (phạm trù, số lần bị loại); phạm trù có quá max_isos đẳng cấu không đồng nhất bị rút lại."""
    rejected = 0
    for _ in range(MAX_CATEGORY_TRIES):
        c, r = _draw_category(rng, max_objects, name)
        rejected += r
        if max_isos is None or nonidentity_isos(c) <= max_isos:
            return c, rejected
        rejected += 1
    return random_poset(rng, int(rng.integers(1, max_objects + 1)), name), rejected


def random_diagram(rng: np.random.Generator, max_base: int, max_fiber: int, name: str) -> tuple[CatDiagram, int]:
    """F: P^op -> Cat trên poset ngẫu nhiên P (không nhất thiết tuyến tính) với tối đa max_base đối tượng.

    Chọn hàm tử F(i+1) -> F(i) cho các số liên tiếp; F(i -> j) là hợp dọc i < i+1 < ... < j.
    Quan hệ của P là con của thứ tự 0 < 1 < ... nên F là hạn chế của một sơ đồ trên [n] và hàm tử tính.
    """
    base = random_poset(rng, int(rng.integers(1, max_base + 1)), f"{name}.base")
    fibers: dict[str, FiniteCategory] = {}
    rejected = 0
    for o in base.objects:
        fibers[o], r = random_category(rng, max_fiber, f"{name}.F({o})")
        rejected += r
    n = len(base.objects) - 1
    steps = [_pick(rng, list(functors(fibers[str(i + 1)], fibers[str(i)]))) for i in range(n)]
    transitions: dict[str, CatFunctor] = {}
    for i in range(n + 1):
        for j in range(i, n + 1):
            arrows = base.hom(str(i), str(j))
            if not arrows:
                continue
            functor = CatFunctor.identity(fibers[str(j)])
            for k in range(j - 1, i - 1, -1):
                functor = functor.then(steps[k])
            transitions[arrows[0]] = functor
    diagram = CatDiagram(base, fibers, transitions)
    return diagram, rejected


def generate_corpus(spec: CorpusSpec) -> Corpus:
    rng = np.random.default_rng(spec.seed)
    corpus = Corpus(spec)
    makers = {
        "simplex": (random_simplicial, corpus.simplicial),
        "bisimplex": (random_bisimplicial, corpus.bisimplicial),
        "marked": (random_marked, corpus.marked),
    }
    for idx in range(spec.objects):
        for shape in spec.shape_mix:
            maker, into = makers[shape]
            into.append(maker(rng, spec.bound, spec.max_nondegenerate, f"{shape}{idx:03d}"))
        if (idx + 1) % PROGRESS_EVERY == 0:
            logger.info("[Corpus] seed=%d objects=%d/%d", spec.seed, idx + 1, spec.objects)
    for idx in range(spec.categories):
        c, rejected = random_category(rng, spec.max_category_objects, f"C{idx:03d}", spec.max_category_isos)
        corpus.categories.append(c)
        corpus.rejections += rejected
    for idx in range(spec.diagrams):
        d, rejected = random_diagram(rng, spec.max_base_objects, spec.max_fiber_objects, f"F{idx:03d}")
        corpus.diagrams.append(d)
        corpus.rejections += rejected
    tries = corpus.rejections + len(corpus.categories) + len(corpus.diagrams)
    logger.info(
        "[Corpus] seed=%d %s rejection_rate=%.3f",
        spec.seed,
        " ".join(f"{k}={v}" for k, v in corpus.summary().items()),
        corpus.rejections / max(1, tries),
    )
    return corpus


def write_corpus(corpus: Corpus, directory: str | Path) -> list[Path]:
    """Ghi mỗi đối tượng ra một file JSON; trả về danh sách file theo thứ tự ghi."""
    root = Path(directory)
    written: list[Path] = []
    for group in ("simplicial", "bisimplicial", "marked"):
        (root / group).mkdir(parents=True, exist_ok=True)
        for x in getattr(corpus, group):
            path = root / group / f"{x.name}.json"
            save_presheaf(x, path)
            written.append(path)
    (root / "categories").mkdir(parents=True, exist_ok=True)
    for c in corpus.categories:
        path = root / "categories" / f"{c.name}.json"
        save_category(c, path)
        written.append(path)
    (root / "diagrams").mkdir(parents=True, exist_ok=True)
    for idx, d in enumerate(corpus.diagrams):
        path = root / "diagrams" / f"F{idx:03d}.json"
        path.write_text(json.dumps(d.to_dict(), ensure_ascii=False, sort_keys=True, indent=2), encoding="utf-8")
        written.append(path)
    manifest = root / "corpus.json"
    manifest.write_text(
        json.dumps({"spec": asdict(corpus.spec), "summary": corpus.summary()}, sort_keys=True, indent=2),
        encoding="utf-8",
    )
    written.append(manifest)
    return written
