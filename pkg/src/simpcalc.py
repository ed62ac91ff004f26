"""CLI simpcalc: dựng đối tượng chuẩn, tính Hom, kiểm tra phân thớ, hàm tử chuyển, phạm trù và suite.

- Đầu ra là JSON trên stdout (hoặc --out).
- Mã thoát: 0 holds, 1 fails, 2 inconclusive, 3 lỗi đầu vào.
- Mức log: --log-level hoặc biến môi trường SIMPCALC_LOG_LEVEL (mặc định WARNING).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Optional

from core.bisimplicial.checkers import (
    hopullback_discrete,
    is_cartesian_fibration_bisimplicial,
    point_map,
    right_fib_rows,
    segal_completeness_check,
)
from core.cartesian.cartesian_edges import cartesian_edges, natural_marking
from core.category.classification import classification_diagram
from core.category.finite_category import load_category, nerve
from core.category.grothendieck import classical_cartesian_edges, grothendieck, load_diagram
from core.config.defaults import CYLINDER_BUDGET, DEFAULT_DIM_BOUND, DEFAULT_SEED, LOG_LEVEL_ENV_VAR, TRANSFER_BOUND
from core.hom.hom_engine import enumerate_hom, mapping_space, relative_matching_map
from core.lifting.lifting import FibrationClass, has_rlp, is_quasicategory, to_point
from core.marked.marked_objects import flat, sharp
from core.metrics.metrics import GLOBAL_METRICS
from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf, describe
from core.presheaf.serialize import (
    components_to_dict,
    dumps,
    load_map,
    load_presheaf,
    map_to_dict,
    presheaf_to_dict,
)
from core.report.check_report import CheckReport, Verdict, conjunction
from core.standard.objects import StandardObjectSpec, build
from core.suite.corpus import CorpusSpec, generate_corpus, write_corpus
from core.suite.suite_runner import format_summary, run_suite, suite_names
from core.transfer.transfer_functors import (
    ADJUNCTIONS,
    TransferTag,
    apply,
    composite_identities,
    tcompare,
    verify_adjunction,
)
from core.types.cell_types import level_key
from core.types.errors import SimpcalcError

logger = logging.getLogger("simpcalc")

EXIT_ERROR = 3
FIBRATION_CHECKS = ("kan", "inner", "left", "right", "trivial", "qcat")
BISIMPLICIAL_CHECKS = ("rightfib-rows", "hopb", "segal", "cso")


def _emit(payload: Any, out: Optional[str] = None) -> None:
    text = payload if isinstance(payload, str) else dumps(payload)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info("[CLI] wrote=%s", out)
    else:
        print(text)


def _report(report: CheckReport, out: Optional[str] = None) -> int:
    _emit(report.to_dict(), out)
    return report.verdict.exit_code


def _is_map_file(path: str) -> bool:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return isinstance(data, dict) and "components" in data


def _load_projection(path: str, over: Optional[str]) -> PresheafMap:
    """Tệp ánh xạ dùng trực tiếp; tệp presheaf chiếu lên điểm, hoặc lên --over nếu ánh xạ là duy nhất."""
    if _is_map_file(path):
        return load_map(path)
    t = load_presheaf(path)
    if over is None:
        return point_map(t) if t.shape.directions == 2 else to_point(t)
    s = load_presheaf(over)
    maps = enumerate_hom(t, s)
    if len(maps) != 1:
        raise SimpcalcError(f"{len(maps)} maps {t.name} -> {s.name}; pass the projection as a map file")
    return maps.maps[0]


# Lệnh con
def cmd_gen(args: argparse.Namespace) -> int:
    spec = StandardObjectSpec.parse(args.kind, args.params)
    x = build(spec, args.dim)
    _emit(presheaf_to_dict(x), args.out)
    return 0


def cmd_hom(args: argparse.Namespace) -> int:
    a, b = load_presheaf(args.source), load_presheaf(args.target)
    hom = enumerate_hom(a, b, workers=args.workers)
    payload: dict[str, Any] = {"count": len(hom), "exactness": hom.exactness, "bound": list(hom.bound)}
    if not args.count_only:
        payload["maps"] = [components_to_dict(f) for f in hom]
    _emit(payload, args.out)
    return 0


def cmd_mapspace(args: argparse.Namespace) -> int:
    a, b = load_presheaf(args.source), load_presheaf(args.target)
    space = mapping_space(a, b, args.levels)
    _emit(
        {
            "counts": {level_key(lv): n for lv, n in space.counts().items()},
            "exactness": list(space.exactness),
            "exact": space.exact,
        },
        args.out,
    )
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    what = args.what
    if what == "qcat":
        return _report(is_quasicategory(load_presheaf(args.file), args.cap), args.out)
    if what in FIBRATION_CHECKS:
        f = _load_projection(args.file, args.over)
        return _report(has_rlp(f, FibrationClass.parse(what), args.cap, workers=args.workers), args.out)
    if what == "segal":
        return _report(segal_completeness_check(load_presheaf(args.file)), args.out)
    p = _load_projection(args.file, args.over)
    if what == "rightfib-rows":
        return _report(right_fib_rows(p, args.cap), args.out)
    if what == "hopb":
        reports = [hopullback_discrete(p, n) for n in range(1, (args.n or p.source.bound[0]) + 1)]
        return _report(conjunction("hopullback_discrete", reports), args.out)
    return _report(is_cartesian_fibration_bisimplicial(p, args.cap, args.budget), args.out)


def cmd_matching(args: argparse.Namespace) -> int:
    """Ánh xạ khớp Reedy Y_n -> M_nY ×_{M_nX} X_n; tệp presheaf không có --over dùng X là điểm."""
    p = _load_projection(args.file, args.over)
    rel = relative_matching_map(p, args.n)
    m = rel.matching_map
    images = {level: [m(level, u) for u in m.source.cells(level)] for level in m.source.levels()}
    _emit(
        {
            "n": args.n,
            "row": {level_key(lv): m.source.count(lv) for lv in m.source.levels()},
            "fiber_product": {level_key(lv): rel.fiber_product.count(lv) for lv in rel.fiber_product.levels()},
            "injective": all(len(set(v)) == len(v) for v in images.values()),
            "surjective": all(len(set(v)) == rel.fiber_product.count(lv) for lv, v in images.items()),
        },
        args.out,
    )
    return 0


def cmd_edges(args: argparse.Namespace) -> int:
    p = load_map(args.file)
    edges, flags = cartesian_edges(p, args.cap, workers=args.workers)
    _emit({"cartesian_edges": sorted(edges, key=repr), "count": len(edges), "exactness": list(flags)}, args.out)
    return 2 if "some-edges-inconclusive" in flags else 0


def cmd_mark(args: argparse.Namespace) -> int:
    if args.policy == "natural":
        marked = natural_marking(load_map(args.file), args.cap)
        _emit(map_to_dict(marked), args.out)
        return 0
    x = load_presheaf(args.file)
    _emit(presheaf_to_dict(flat(x) if args.policy == "flat" else sharp(x)), args.out)
    return 0


def cmd_apply(args: argparse.Namespace) -> int:
    x = load_presheaf(args.file)
    _emit(presheaf_to_dict(apply(TransferTag.parse(args.functor), x, args.bound)), args.out)
    return 0


def _corpus_objects(directory: str) -> list[TruncatedPresheaf]:
    root = Path(directory)
    files = sorted(p for p in root.rglob("*.json") if p.name != "corpus.json")
    objects = []
    for path in files:
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict) and "shape" in data and "components" not in data:
            x = load_presheaf(path)
            if x.shape.directions == 1:
                objects.append(x)
    return objects


def cmd_verify(args: argparse.Namespace) -> int:
    if args.what == "adjunction":
        if len(args.files) != 3 or args.files[0] not in ADJUNCTIONS:
            raise SimpcalcError(f"verify adjunction needs <pair> x.json y.json with pair in {', '.join(ADJUNCTIONS)}")
        pair, x, y = args.files[0], load_presheaf(args.files[1]), load_presheaf(args.files[2])
        return _report(verify_adjunction(pair, x, y), args.out)
    if args.what == "composites":
        if args.corpus:
            objects = _corpus_objects(args.corpus)
        else:
            objects = [load_presheaf(f) for f in args.files]
        reports = [composite_identities(s, args.bound) for s in objects]
        report = conjunction("composite_identities", reports, objects=len(reports))
        if not reports:
            logger.warning("[Composite] no simplicial objects found; verdict is vacuous")
        return _report(report, args.out)
    if len(args.files) != 1:
        raise SimpcalcError("verify tcompare needs one bisimplicial x.json")
    _emit(tcompare(load_presheaf(args.files[0]), args.bound), args.out)
    return 0


def cmd_cat(args: argparse.Namespace) -> int:
    if args.what == "groth":
        construction = grothendieck(load_diagram(args.file))
        _emit(
            {
                "category": construction.category.to_dict(),
                "projection": construction.projection.to_dict(),
                "classical_cartesian_edges": sorted(classical_cartesian_edges(construction)),
            },
            args.out,
        )
        return 0
    c = load_category(args.file)
    if args.what == "nerve":
        x = nerve(c, args.dim)
    else:
        x = classification_diagram(c, args.bound)
    _emit(presheaf_to_dict(x) if args.out else describe(x), args.out)
    return 0


def cmd_corpus(args: argparse.Namespace) -> int:
    spec = CorpusSpec(seed=args.seed, objects=args.objects, categories=args.categories, diagrams=args.diagrams)
    written = write_corpus(generate_corpus(spec), args.out)
    _emit({"files": len(written), "directory": args.out})
    return 0


def cmd_suite(args: argparse.Namespace) -> int:
    names = suite_names() if args.name == "all" else [args.name]
    spec = CorpusSpec(seed=args.seed, objects=args.objects, categories=args.categories, diagrams=args.diagrams)
    corpus = generate_corpus(spec)
    results = [run_suite(name, corpus, args.workers) for name in names]
    for result in results:
        print(format_summary(result), file=sys.stderr)
    if args.json:
        payload = [r.to_dict() for r in results] if len(results) > 1 else results[0].to_dict()
        Path(args.json).write_text(
            json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    logger.info("[CLI] metrics %s", " ".join(f"{k}={v}" for k, v in GLOBAL_METRICS.snapshot().items()))
    verdicts = {r.verdict for r in results}
    for verdict in (Verdict.FAILS, Verdict.INCONCLUSIVE):
        if verdict in verdicts:
            return verdict.exit_code
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simpcalc", description="Finite presheaf calculus")
    parser.add_argument("--log-level", default=os.environ.get(LOG_LEVEL_ENV_VAR, "WARNING"))
    sub = parser.add_subparsers(dest="command", required=True)

    def with_out(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--out")
        return p

    gen = with_out(sub.add_parser("gen", help="build a standard object"))
    gen.add_argument("kind")
    gen.add_argument("params", nargs="*")
    gen.add_argument("--dim", type=int, default=DEFAULT_DIM_BOUND)
    gen.set_defaults(handler=cmd_gen)

    hom = with_out(sub.add_parser("hom", help="enumerate Hom(a, b)"))
    hom.add_argument("source")
    hom.add_argument("target")
    hom.add_argument("--count-only", action="store_true")
    hom.add_argument("--workers", type=int, default=1)
    hom.set_defaults(handler=cmd_hom)

    ms = with_out(sub.add_parser("mapspace", help="mapping space Map(a, b)"))
    ms.add_argument("source")
    ms.add_argument("target")
    ms.add_argument("--levels", type=int, default=2)
    ms.set_defaults(handler=cmd_mapspace)

    check = with_out(sub.add_parser("check", help="fibration and Segal checks"))
    check.add_argument("what", choices=FIBRATION_CHECKS + BISIMPLICIAL_CHECKS)
    check.add_argument("file")
    check.add_argument("--cap", type=int)
    check.add_argument("--over")
    check.add_argument("--n", type=int)
    check.add_argument("--budget", type=int, default=CYLINDER_BUDGET)
    check.add_argument("--workers", type=int, default=1)
    check.set_defaults(handler=cmd_check)

    matching = with_out(sub.add_parser("matching", help="Reedy matching map of a bisimplicial map"))
    matching.add_argument("file")
    matching.add_argument("--n", type=int, required=True)
    matching.add_argument("--over")
    matching.set_defaults(handler=cmd_matching)

    edges = with_out(sub.add_parser("edges", help="p-Cartesian edges of a map"))
    edges.add_argument("kind", choices=("cartesian",))
    edges.add_argument("file")
    edges.add_argument("--cap", type=int)
    edges.add_argument("--workers", type=int, default=1)
    edges.set_defaults(handler=cmd_edges)

    mark = with_out(sub.add_parser("mark", help="flat, sharp or natural marking"))
    mark.add_argument("policy", choices=("flat", "sharp", "natural"))
    mark.add_argument("file")
    mark.add_argument("--cap", type=int)
    mark.set_defaults(handler=cmd_mark)

    ap = with_out(sub.add_parser("apply", help="apply a transfer functor"))
    ap.add_argument("functor", choices=[t.value for t in TransferTag])
    ap.add_argument("file")
    ap.add_argument("--bound", type=int)
    ap.set_defaults(handler=cmd_apply)

    verify = with_out(sub.add_parser("verify", help="adjunctions, composite identities, t+ comparison"))
    verify.add_argument("what", choices=("adjunction", "composites", "tcompare"))
    verify.add_argument("files", nargs="*", help="adjunction: <pair> x.json y.json")
    verify.add_argument("--corpus")
    verify.add_argument("--bound", type=int, default=TRANSFER_BOUND)
    verify.set_defaults(handler=cmd_verify)

    cat = with_out(sub.add_parser("cat", help="nerves, Grothendieck constructions, classification diagrams"))
    cat.add_argument("what", choices=("nerve", "groth", "classdiag"))
    cat.add_argument("file")
    cat.add_argument("--dim", type=int, default=DEFAULT_DIM_BOUND)
    cat.add_argument("--bound", type=int, default=TRANSFER_BOUND)
    cat.set_defaults(handler=cmd_cat)

    corpus = sub.add_parser("corpus", help="write a seeded corpus as JSON files")
    corpus.add_argument("--seed", type=int, default=DEFAULT_SEED)
    corpus.add_argument("--objects", type=int, default=CorpusSpec.objects)
    corpus.add_argument("--categories", type=int, default=CorpusSpec.categories)
    corpus.add_argument("--diagrams", type=int, default=CorpusSpec.diagrams)
    corpus.add_argument("--out", required=True)
    corpus.set_defaults(handler=cmd_corpus)

    suite = sub.add_parser("suite", help="run an acceptance suite")
    suite.add_argument("name", choices=suite_names() + ["all"])
    suite.add_argument("--seed", type=int, default=DEFAULT_SEED)
    suite.add_argument("--objects", type=int, default=CorpusSpec.objects)
    suite.add_argument("--categories", type=int, default=CorpusSpec.categories)
    suite.add_argument("--diagrams", type=int, default=CorpusSpec.diagrams)
    suite.add_argument("--workers", type=int, default=1)
    suite.add_argument("--json")
    suite.set_defaults(handler=cmd_suite)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        # SimpcalcError là ValueError; JSON hỏng và tệp thiếu cũng về mã 3
        print(f"simpcalc: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
