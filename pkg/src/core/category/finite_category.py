"""Phạm trù hữu hạn, hàm tử và nerve: oracle vét cạn cho các kiểm tra trên tập đơn hình.

Bảng hợp thành lưu trong mảng numpy (M x M): comp[g, f] là chỉ số của g ∘ f, -1 khi
target(f) != source(g). Định danh đối tượng và cấu xạ là chuỗi.
"""
from __future__ import annotations

import json
import logging
from itertools import product as cartesian
from pathlib import Path
from typing import Any, Iterator, Mapping, Optional, Sequence

import numpy as np

from core.config.defaults import DEFAULT_DIM_BOUND
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, presheaf_from_function
from core.presheaf.shape import IndexShape
from core.types.errors import InvalidCategoryError

logger = logging.getLogger(__name__)


def _pair_key(a: str, b: str) -> str:
    return f"{a},{b}"


def _split_pair(text: str, known) -> tuple[str, str]:
    """Tách khóa "a,b"; tên có thể chứa dấu phẩy nên thử mọi vị trí."""
    for k, ch in enumerate(text):
        if ch == "," and text[:k] in known and text[k + 1:] in known:
            return text[:k], text[k + 1:]
    raise InvalidCategoryError(f"pair key {text!r} does not split into two known names")


class FiniteCategory:
    def __init__(
        self,
        objects: Sequence[str],
        homs: Mapping[tuple[str, str], Sequence[str]],
        comp: Mapping[tuple[str, str], str],
        ids: Mapping[str, str],
        name: str = "C",
        validate: bool = True,
    ) -> None:
        self.name = name
        self.objects: tuple[str, ...] = tuple(objects)
        obj_index = {o: k for k, o in enumerate(self.objects)}
        morphisms: list[str] = []
        src: list[int] = []
        tgt: list[int] = []
        for (a, b), names in sorted(homs.items()):
            if a not in obj_index or b not in obj_index:
                raise InvalidCategoryError(f"hom set {a},{b} mentions an unknown object")
            for m in names:
                morphisms.append(m)
                src.append(obj_index[a])
                tgt.append(obj_index[b])
        if len(set(morphisms)) != len(morphisms):
            raise InvalidCategoryError(f"{name}: morphism names must be unique")
        self.morphisms: tuple[str, ...] = tuple(morphisms)
        self._index = {m: k for k, m in enumerate(self.morphisms)}
        self._obj_index = obj_index
        self._src = np.array(src, dtype=np.int64)
        self._tgt = np.array(tgt, dtype=np.int64)
        self.ids: dict[str, str] = dict(ids)
        for o in self.objects:
            idm = self.ids.get(o)
            if idm not in self._index or self.source(idm) != o or self.target(idm) != o:
                raise InvalidCategoryError(f"{name}: identity of {o!r} missing or not an endomorphism")
        self._table = self._build_table(comp)
        if validate:
            self.validate()

    def _build_table(self, comp: Mapping[tuple[str, str], str]) -> np.ndarray:
        size = len(self.morphisms)
        table = np.full((size, size), -1, dtype=np.int64)
        identity = {self._index[m] for m in self.ids.values()}
        composable = self._tgt[None, :] == self._src[:, None]
        for g, f in zip(*np.nonzero(composable)):
            given = comp.get((self.morphisms[g], self.morphisms[f]))
            if g in identity:
                table[g, f] = f
            elif f in identity:
                table[g, f] = g
            elif given is None:
                raise InvalidCategoryError(
                    f"{self.name}: composite {self.morphisms[g]} ∘ {self.morphisms[f]} is not given"
                )
            if given is not None:
                if given not in self._index:
                    raise InvalidCategoryError(f"{self.name}: composite {given!r} is not a morphism")
                if table[g, f] >= 0 and table[g, f] != self._index[given]:
                    raise InvalidCategoryError(
                        f"{self.name}: {self.morphisms[g]} ∘ {self.morphisms[f]} contradicts the unit law"
                    )
                table[g, f] = self._index[given]
        return table

    # Truy cập
    def source(self, m: str) -> str:
        return self.objects[self._src[self._index[m]]]

    def target(self, m: str) -> str:
        return self.objects[self._tgt[self._index[m]]]

    def identity(self, o: str) -> str:
        return self.ids[o]

    def is_identity(self, m: str) -> bool:
        return self.ids.get(self.source(m)) == m

    def hom(self, a: str, b: str) -> list[str]:
        mask = (self._src == self._obj_index[a]) & (self._tgt == self._obj_index[b])
        return [self.morphisms[k] for k in np.nonzero(mask)[0]]

    def out_of(self, a: str) -> list[str]:
        return [self.morphisms[k] for k in np.nonzero(self._src == self._obj_index[a])[0]]

    def composable(self, g: str, f: str) -> bool:
        return self.target(f) == self.source(g)

    def compose(self, g: str, f: str) -> str:
        """g ∘ f."""
        k = self._table[self._index[g], self._index[f]]
        if k < 0:
            raise InvalidCategoryError(f"{self.name}: {g} ∘ {f} is not composable")
        return self.morphisms[k]

    def inverse(self, m: str) -> Optional[str]:
        a, b = self.source(m), self.target(m)
        for g in self.hom(b, a):
            if self.compose(g, m) == self.ids[a] and self.compose(m, g) == self.ids[b]:
                return g
        return None

    def is_iso(self, m: str) -> bool:
        return self.inverse(m) is not None

    def isomorphisms(self) -> list[str]:
        return [m for m in self.morphisms if self.is_iso(m)]

    def is_groupoid(self) -> bool:
        return all(self.is_iso(m) for m in self.morphisms)

    # Kiểm tra
    def validate(self) -> "FiniteCategory":
        """Tính đóng của bảng, luật đơn vị và kết hợp trên mọi bộ ba khả hợp."""
        table = self._table
        ok = table >= 0
        g_idx, f_idx = np.nonzero(ok)
        composites = table[g_idx, f_idx]
        bad = (self._src[composites] != self._src[f_idx]) | (self._tgt[composites] != self._tgt[g_idx])
        if bad.any():
            k = int(np.argmax(bad))
            raise InvalidCategoryError(
                f"{self.name}: {self.morphisms[g_idx[k]]} ∘ {self.morphisms[f_idx[k]]} has the wrong endpoints"
            )
        size = len(self.morphisms)
        h, g, f = np.indices((size, size, size)).reshape(3, -1)
        mask = ok[g, f] & ok[h, g]
        h, g, f = h[mask], g[mask], f[mask]
        left = table[h, table[g, f]]
        right = table[table[h, g], f]
        wrong = np.nonzero(left != right)[0]
        if wrong.size:
            k = wrong[0]
            raise InvalidCategoryError(
                f"{self.name}: associativity fails for ({self.morphisms[h[k]]}, {self.morphisms[g[k]]}, "
                f"{self.morphisms[f[k]]})"
            )
        return self

    # JSON
    def to_dict(self) -> dict[str, Any]:
        homs: dict[str, list[str]] = {}
        for m in self.morphisms:
            homs.setdefault(_pair_key(self.source(m), self.target(m)), []).append(m)
        comp = {
            _pair_key(self.morphisms[g], self.morphisms[f]): self.morphisms[self._table[g, f]]
            for g, f in zip(*np.nonzero(self._table >= 0))
            if not (self.is_identity(self.morphisms[g]) or self.is_identity(self.morphisms[f]))
        }
        return {"name": self.name, "objects": list(self.objects), "homs": homs, "comp": comp, "ids": dict(self.ids)}

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "FiniteCategory":
        try:
            objects = set(data["objects"])
            homs = {_split_pair(k, objects): list(v) for k, v in data["homs"].items()}
            names = {m for v in homs.values() for m in v}
            comp = {_split_pair(k, names): v for k, v in data.get("comp", {}).items()}
            return FiniteCategory(data["objects"], homs, comp, data["ids"], name=data.get("name", "C"))
        except KeyError as exc:
            raise InvalidCategoryError(f"category JSON is missing {exc.args[0]!r}") from None

    def __repr__(self) -> str:
        return f"FiniteCategory({self.name}, objects={len(self.objects)}, morphisms={len(self.morphisms)})"


def load_category(path: str | Path) -> FiniteCategory:
    return FiniteCategory.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_category(c: FiniteCategory, path: str | Path) -> None:
    Path(path).write_text(json.dumps(c.to_dict(), ensure_ascii=False, sort_keys=True, indent=2), encoding="utf-8")


# Các phạm trù chuẩn
def _arrow(i: int, j: int) -> str:
    return f"{i}->{j}"


def thin_category(n_objects: int, related, name: str) -> FiniteCategory:
    """Phạm trù mỏng trên {0..n-1}: có đúng một cấu xạ i -> j khi related(i, j)."""
    objects = [str(i) for i in range(n_objects)]
    homs = {
        (str(i), str(j)): [_arrow(i, j)] for i in range(n_objects) for j in range(n_objects) if related(i, j)
    }
    comp = {
        (_arrow(j, k), _arrow(i, j)): _arrow(i, k)
        for i in range(n_objects)
        for j in range(n_objects)
        for k in range(n_objects)
        if related(i, j) and related(j, k)
    }
    ids = {str(i): _arrow(i, i) for i in range(n_objects)}
    return FiniteCategory(objects, homs, comp, ids, name=name)


def poset(n: int) -> FiniteCategory:
    """[n] = 0 -> 1 -> ... -> n."""
    return thin_category(n + 1, lambda i, j: i <= j, f"[{n}]")


def chaotic(l: int) -> FiniteCategory:
    """I[l]: l+1 đối tượng, đúng một cấu xạ giữa mỗi cặp (đều khả nghịch)."""
    return thin_category(l + 1, lambda i, j: True, f"I[{l}]")


def discrete_category(objects: Sequence[str], name: str = "") -> FiniteCategory:
    return FiniteCategory(
        objects, {(o, o): [f"id_{o}"] for o in objects}, {}, {o: f"id_{o}" for o in objects},
        name=name or f"disc{len(objects)}",
    )


def terminal_category() -> FiniteCategory:
    return poset(0)


def groupoid_core(c: FiniteCategory) -> FiniteCategory:
    """Nhóm phỏng con cực đại: cùng đối tượng, chỉ giữ các đẳng cấu."""
    isos = set(c.isomorphisms())
    homs: dict[tuple[str, str], list[str]] = {}
    for m in c.morphisms:
        if m in isos:
            homs.setdefault((c.source(m), c.target(m)), []).append(m)
    comp = {(g, f): c.compose(g, f) for g in isos for f in isos if c.composable(g, f)}
    return FiniteCategory(c.objects, homs, comp, c.ids, name=f"core({c.name})")


# Hàm tử
class CatFunctor:
    """Hàm tử chặt; contravariant=True nghĩa là source^op -> target."""

    def __init__(
        self,
        source: FiniteCategory,
        target: FiniteCategory,
        ob: Mapping[str, str],
        ar: Mapping[str, str],
        contravariant: bool = False,
        validate: bool = True,
    ) -> None:
        self.source, self.target = source, target
        self.ob, self.ar = dict(ob), dict(ar)
        self.contravariant = contravariant
        if validate:
            self.validate()

    def obj(self, o: str) -> str:
        return self.ob[o]

    def mor(self, m: str) -> str:
        return self.ar[m]

    def validate(self) -> "CatFunctor":
        c, d = self.source, self.target
        if set(self.ob) != set(c.objects) or set(self.ar) != set(c.morphisms):
            raise InvalidCategoryError("functor must be defined on every object and morphism")
        for m in c.morphisms:
            a, b = self.ob[c.source(m)], self.ob[c.target(m)]
            if self.contravariant:
                a, b = b, a
            if d.source(self.ar[m]) != a or d.target(self.ar[m]) != b:
                raise InvalidCategoryError(f"functor sends {m!r} to a morphism with the wrong endpoints")
        for o in c.objects:
            if self.ar[c.identity(o)] != d.identity(self.ob[o]):
                raise InvalidCategoryError(f"functor does not preserve the identity of {o!r}")
        for g in c.morphisms:
            for f in c.morphisms:
                if not c.composable(g, f):
                    continue
                image = self.ar[c.compose(g, f)]
                expected = (
                    d.compose(self.ar[f], self.ar[g]) if self.contravariant else d.compose(self.ar[g], self.ar[f])
                )
                if image != expected:
                    raise InvalidCategoryError(f"functor does not preserve the composite {g} ∘ {f}")
        return self

    def then(self, other: "CatFunctor") -> "CatFunctor":
        """other ∘ self."""
        return CatFunctor(
            self.source,
            other.target,
            {o: other.ob[v] for o, v in self.ob.items()},
            {m: other.ar[v] for m, v in self.ar.items()},
            contravariant=self.contravariant != other.contravariant,
        )

    @staticmethod
    def identity(c: FiniteCategory) -> "CatFunctor":
        return CatFunctor(c, c, {o: o for o in c.objects}, {m: m for m in c.morphisms}, validate=False)

    def to_dict(self) -> dict[str, Any]:
        return {"ob": dict(self.ob), "ar": dict(self.ar)}

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CatFunctor)
            and self.ob == other.ob
            and self.ar == other.ar
            and self.contravariant == other.contravariant
        )

    def __repr__(self) -> str:
        return f"CatFunctor({self.source.name} -> {self.target.name})"


def functors(c: FiniteCategory, d: FiniteCategory) -> Iterator[CatFunctor]:
    """Mọi hàm tử hiệp biến c -> d (vét cạn, quay lui theo cấu xạ không đồng nhất)."""
    plain = [m for m in c.morphisms if not c.is_identity(m)]
    for images in cartesian(d.objects, repeat=len(c.objects)):
        ob = dict(zip(c.objects, images))
        ar = {c.identity(o): d.identity(ob[o]) for o in c.objects}

        def extend(k: int) -> Iterator[dict[str, str]]:
            if k == len(plain):
                yield dict(ar)
                return
            m = plain[k]
            for candidate in d.hom(ob[c.source(m)], ob[c.target(m)]):
                ar[m] = candidate
                if _consistent(c, d, ar, m):
                    yield from extend(k + 1)
                del ar[m]

        for found in extend(0):
            yield CatFunctor(c, d, ob, found, validate=False)


def _consistent(c: FiniteCategory, d: FiniteCategory, ar: Mapping[str, str], m: str) -> bool:
    """Mọi hợp thành có cả ba thành phần đã gán đều được bảo toàn."""
    for g, f in cartesian(ar, repeat=2):
        if m not in (g, f) or not c.composable(g, f):
            continue
        h = c.compose(g, f)
        if h in ar and ar[h] != d.compose(ar[g], ar[f]):
            return False
    for g, f in cartesian(ar, repeat=2):
        if not c.composable(g, f) or c.compose(g, f) != m:
            continue
        if ar[m] != d.compose(ar[g], ar[f]):
            return False
    return True


# Nerve
def _chains(c: FiniteCategory, k: int, previous: list[tuple[str, ...]]) -> list[tuple[str, ...]]:
    if k == 1:
        return [(m,) for m in c.morphisms]
    return [chain + (g,) for chain in previous for g in c.out_of(c.target(chain[-1]))]


def nerve(c: FiniteCategory, bound: int = DEFAULT_DIM_BOUND) -> TruncatedPresheaf:
    """N(C): đỉnh là đối tượng, k-ô là chuỗi (f_1, ..., f_k) khả hợp; 2-coskeletal."""
    cells: dict[tuple[int], list] = {(0,): list(c.objects)}
    previous: list[tuple[str, ...]] = []
    for k in range(1, bound + 1):
        previous = _chains(c, k, previous)
        cells[(k,)] = previous

    def face(level, d, i, cell):
        k = level[0]
        if k == 1:
            return c.target(cell[0]) if i == 0 else c.source(cell[0])
        if i == 0:
            return cell[1:]
        if i == k:
            return cell[:-1]
        return cell[: i - 1] + (c.compose(cell[i], cell[i - 1]),) + cell[i + 1:]

    def degeneracy(level, d, i, cell):
        if level[0] == 0:
            return (c.identity(cell),)
        vertex = c.source(cell[i]) if i < len(cell) else c.target(cell[-1])
        return cell[:i] + (c.identity(vertex),) + cell[i:]

    x = presheaf_from_function(IndexShape.SIMPLEX, bound, cells, face, degeneracy, cosk=2, name=f"N({c.name})")
    logger.debug("[Nerve] category=%s bound=%d counts=%s", c.name, bound, x.nondegenerate_counts())
    return x


def nerve_map(f: CatFunctor, bound: int = DEFAULT_DIM_BOUND) -> PresheafMap:
    """N(F): N(C) -> N(D) cho hàm tử hiệp biến F."""
    if f.contravariant:
        raise InvalidCategoryError("nerve_map expects a covariant functor")
    source, target = nerve(f.source, bound), nerve(f.target, bound)
    comps = {(0,): {o: f.obj(o) for o in source.cells((0,))}}
    for k in range(1, bound + 1):
        comps[(k,)] = {chain: tuple(f.mor(m) for m in chain) for chain in source.cells((k,))}
    return PresheafMap(source, target, comps)


def product_category(a: FiniteCategory, b: FiniteCategory) -> FiniteCategory:
    """A × B với đối tượng "x|y" và cấu xạ "f|g"."""
    objects = [f"{x}|{y}" for x in a.objects for y in b.objects]
    homs: dict[tuple[str, str], list[str]] = {}
    for f in a.morphisms:
        for g in b.morphisms:
            key = (f"{a.source(f)}|{b.source(g)}", f"{a.target(f)}|{b.target(g)}")
            homs.setdefault(key, []).append(f"{f}|{g}")
    comp = {
        (f"{f2}|{g2}", f"{f1}|{g1}"): f"{a.compose(f2, f1)}|{b.compose(g2, g1)}"
        for f1 in a.morphisms
        for f2 in a.morphisms
        if a.composable(f2, f1)
        for g1 in b.morphisms
        for g2 in b.morphisms
        if b.composable(g2, g1)
    }
    ids = {f"{x}|{y}": f"{a.identity(x)}|{b.identity(y)}" for x in a.objects for y in b.objects}
    return FiniteCategory(objects, homs, comp, ids, name=f"{a.name}×{b.name}")
