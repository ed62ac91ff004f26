"""Dựng Grothendieck ∫F cho F: C^op -> Cat chặt, cùng phép chiếu ∫F -> C.

Quy ước: cấu xạ (c, x) -> (d, y) là cặp (f: c -> d, φ: x -> F(f)(y)), φ nằm trong thớ nguồn F(c).
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from core.category.finite_category import CatFunctor, FiniteCategory, discrete_category
from core.types.errors import InvalidCategoryError

logger = logging.getLogger(__name__)


class CatDiagram:
    """F: C^op -> Cat; transitions[f] với f: c -> d là hàm tử F(d) -> F(c)."""

    def __init__(
        self,
        base: FiniteCategory,
        fibers: Mapping[str, FiniteCategory],
        transitions: Mapping[str, CatFunctor],
        validate: bool = True,
    ) -> None:
        self.base = base
        self.fibers = dict(fibers)
        missing = set(base.objects) - set(self.fibers)
        if missing:
            raise InvalidCategoryError(f"diagram has no fiber over {sorted(missing)}")
        self.transitions: dict[str, CatFunctor] = {}
        for m in base.morphisms:
            if m in transitions:
                self.transitions[m] = transitions[m]
            elif base.is_identity(m):
                self.transitions[m] = CatFunctor.identity(self.fibers[base.source(m)])
            else:
                raise InvalidCategoryError(f"diagram has no transition for {m!r}")
        if validate:
            self.validate()

    def fiber(self, c: str) -> FiniteCategory:
        return self.fibers[c]

    def transition(self, f: str) -> CatFunctor:
        return self.transitions[f]

    def validate(self) -> "CatDiagram":
        c = self.base
        for m, functor in self.transitions.items():
            if (
                functor.source.morphisms != self.fibers[c.target(m)].morphisms
                or functor.target.morphisms != self.fibers[c.source(m)].morphisms
            ):
                raise InvalidCategoryError(f"transition for {m!r} must go F(target) -> F(source)")
            functor.validate()
            if c.is_identity(m) and functor != CatFunctor.identity(self.fibers[c.source(m)]):
                raise InvalidCategoryError(f"transition for identity {m!r} is not the identity functor")
        for g in c.morphisms:
            for f in c.morphisms:
                if not c.composable(g, f):
                    continue
                # F(g ∘ f) = F(f) ∘ F(g)
                expected = self.transitions[g].then(self.transitions[f])
                if self.transitions[c.compose(g, f)] != expected:
                    raise InvalidCategoryError(f"diagram is not functorial on {g} ∘ {f}")
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "base": self.base.to_dict(),
            "fibers": {o: f.to_dict() for o, f in self.fibers.items()},
            "transitions": {
                m: t.to_dict() for m, t in self.transitions.items() if not self.base.is_identity(m)
            },
        }

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "CatDiagram":
        try:
            base = FiniteCategory.from_dict(data["base"])
            fibers = {o: FiniteCategory.from_dict(v) for o, v in data["fibers"].items()}
            transitions = {}
            for m, t in data.get("transitions", {}).items():
                if m not in base.morphisms:
                    raise InvalidCategoryError(f"transition for unknown morphism {m!r}")
                transitions[m] = CatFunctor(
                    fibers[base.target(m)], fibers[base.source(m)], t["ob"], t["ar"], validate=False
                )
        except KeyError as exc:
            raise InvalidCategoryError(f"diagram JSON is missing {exc.args[0]!r}") from None
        return CatDiagram(base, fibers, transitions)


def load_diagram(path: str | Path) -> CatDiagram:
    return CatDiagram.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def constant_diagram(base: FiniteCategory, fiber: FiniteCategory) -> CatDiagram:
    identity = CatFunctor.identity(fiber)
    return CatDiagram(base, {o: fiber for o in base.objects}, {m: identity for m in base.morphisms})


def discrete_diagram(
    base: FiniteCategory, sets: Mapping[str, list[str]], maps: Mapping[str, Mapping[str, str]]
) -> CatDiagram:
    """F: C^op -> Set xem như Cat với thớ rời rạc; maps[f] là hàm F(d) -> F(c)."""
    fibers = {o: discrete_category(sets[o], name=f"F({o})") for o in base.objects}
    transitions = {}
    for m in base.morphisms:
        if base.is_identity(m):
            continue
        src, tgt = fibers[base.target(m)], fibers[base.source(m)]
        ob = dict(maps[m])
        transitions[m] = CatFunctor(src, tgt, ob, {f"id_{y}": f"id_{ob[y]}" for y in ob})
    return CatDiagram(base, fibers, transitions)


@dataclass
class GrothendieckConstruction:
    diagram: CatDiagram
    category: FiniteCategory
    projection: CatFunctor
    # tên cấu xạ -> (f, φ, (c, x), (d, y))
    parts: dict[str, tuple[str, str, tuple[str, str], tuple[str, str]]] = field(default_factory=dict)


def _object_name(c: str, x: str) -> str:
    return f"({c},{x})"


def _morphism_name(f: str, phi: str, y: str) -> str:
    return f"({f},{phi};{y})"


def grothendieck(diagram: CatDiagram) -> GrothendieckConstruction:
    base = diagram.base
    objects: list[str] = []
    located: dict[str, tuple[str, str]] = {}
    for c in base.objects:
        for x in diagram.fiber(c).objects:
            name = _object_name(c, x)
            objects.append(name)
            located[name] = (c, x)

    homs: dict[tuple[str, str], list[str]] = {}
    parts: dict[str, tuple[str, str, tuple[str, str], tuple[str, str]]] = {}
    for f in base.morphisms:
        c, d = base.source(f), base.target(f)
        pull = diagram.transition(f)
        fc = diagram.fiber(c)
        for x in fc.objects:
            for y in diagram.fiber(d).objects:
                for phi in fc.hom(x, pull.obj(y)):
                    name = _morphism_name(f, phi, y)
                    homs.setdefault((_object_name(c, x), _object_name(d, y)), []).append(name)
                    parts[name] = (f, phi, (c, x), (d, y))

    by_key = {(f, phi, b): name for name, (f, phi, _, b) in parts.items()}
    comp: dict[tuple[str, str], str] = {}
    for second, (g, psi, _, (e, z)) in parts.items():
        for first, (f, phi, _, target) in parts.items():
            if target != parts[second][2]:
                continue
            # (g, ψ) ∘ (f, φ) = (g ∘ f, F(f)(ψ) ∘ φ)
            fc = diagram.fiber(parts[first][2][0])
            lifted = fc.compose(diagram.transition(f).mor(psi), phi)
            comp[(second, first)] = by_key[(base.compose(g, f), lifted, (e, z))]

    ids = {
        _object_name(c, x): _morphism_name(base.identity(c), diagram.fiber(c).identity(x), x)
        for c in base.objects
        for x in diagram.fiber(c).objects
    }
    total = FiniteCategory(objects, homs, comp, ids, name=f"∫{base.name}")
    projection = CatFunctor(
        total,
        base,
        {o: located[o][0] for o in objects},
        {m: parts[m][0] for m in total.morphisms},
    )
    logger.info(
        "[Grothendieck] base=%s objects=%d morphisms=%d", base.name, len(objects), len(total.morphisms)
    )
    return GrothendieckConstruction(diagram, total, projection, parts)


def classical_cartesian_edges(construction: GrothendieckConstruction) -> frozenset[str]:
    """Các (f, φ) với φ khả nghịch trong thớ nguồn."""
    diagram = construction.diagram
    return frozenset(
        name
        for name, (_, phi, (c, _), _) in construction.parts.items()
        if diagram.fiber(c).is_iso(phi)
    )
