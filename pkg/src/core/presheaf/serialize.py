"""Định dạng JSON cho presheaf và ánh xạ presheaf.

Presheaf:
    {"shape": "Simplex", "dim": 2, "levels": {"0": ["a", "b"], ...},
     "faces": {"1": {"0": {"e": "a"}, ...}}, "degeneracies": {...},
     "markings": ["e", ...], "cosk": 2}

Với hình hai hướng, khóa level là "k,l", khóa toán tử là "hướng.i", "dim" là danh
sách hai số và "markings" là {"1,l": [...]}. Ô không phải chuỗi được chuỗi hóa bằng
JSON gọn; phân tích rồi chuỗi hóa lại cho kết quả giống hệt từng byte (sau khi sắp khóa).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Optional

from core.presheaf.presheaf import PresheafMap, TruncatedPresheaf
from core.presheaf.shape import IndexShape
from core.types.cell_types import CellId, encode_cell, level_key, parse_level, sorted_cells
from core.types.errors import InvalidPresheafError


def decode_cell(text: str) -> CellId:
    """Ngược lại của encode_cell: mảng JSON thành tuple, số thành int, còn lại giữ chuỗi."""
    if text and (text[0] in "[-" or text.isdigit()):
        try:
            return _to_cell(json.loads(text))
        except json.JSONDecodeError:
            return text
    return text


def _to_cell(value: Any) -> CellId:
    if isinstance(value, list):
        return tuple(_to_cell(v) for v in value)
    return value


def _op_key(shape: IndexShape, d: int, i: int) -> str:
    return str(i) if shape.directions == 1 else f"{d}.{i}"


def _parse_op_key(shape: IndexShape, text: str) -> tuple[int, int]:
    if shape.directions == 1:
        return 0, int(text)
    d, i = text.split(".")
    return int(d), int(i)


def presheaf_to_dict(x: TruncatedPresheaf) -> dict[str, Any]:
    shape = x.shape
    levels = {level_key(lv): [encode_cell(c) for c in x.cells(lv)] for lv in x.levels()}
    faces: dict[str, dict] = {}
    degens: dict[str, dict] = {}
    for lv in x.levels():
        for d, i in x.face_keys(lv):
            table = x.face_map(lv, d, i)
            faces.setdefault(level_key(lv), {})[_op_key(shape, d, i)] = {
                encode_cell(c): encode_cell(table[c]) for c in x.cells(lv)
            }
        for d, i in x.degeneracy_keys(lv):
            table = x.degeneracy_map(lv, d, i)
            degens.setdefault(level_key(lv), {})[_op_key(shape, d, i)] = {
                encode_cell(c): encode_cell(table[c]) for c in x.cells(lv)
            }
    out: dict[str, Any] = {
        "shape": shape.value,
        "dim": x.bound[0] if shape.directions == 1 else list(x.bound),
        "levels": levels,
        "faces": faces,
        "degeneracies": degens,
        "cosk": x.cosk,
    }
    if x.name:
        out["name"] = x.name
    if shape.marked:
        if shape.directions == 1:
            out["markings"] = [encode_cell(e) for e in sorted_cells(x.markings((1,)))] if x.bound[0] >= 1 else []
        else:
            out["markings"] = {
                level_key(lv): [encode_cell(e) for e in sorted_cells(x.markings(lv))] for lv in x.plus_levels()
            }
    return out


def presheaf_from_dict(data: Mapping[str, Any], validate: bool = True) -> TruncatedPresheaf:
    """Dựng presheaf từ dict JSON; validate=True kiểm tra toàn bộ bất biến (kể cả chứng chỉ cosk)."""
    try:
        shape = IndexShape.parse(data["shape"])
        dim = data["dim"]
        bound = (int(dim),) if isinstance(dim, int) else tuple(int(b) for b in dim)
        cells = {parse_level(k): [decode_cell(c) for c in v] for k, v in data["levels"].items()}
        faces = {}
        for lk, ops in data.get("faces", {}).items():
            for ok, table in ops.items():
                d, i = _parse_op_key(shape, ok)
                faces[(parse_level(lk), d, i)] = {decode_cell(a): decode_cell(b) for a, b in table.items()}
        degens = {}
        for lk, ops in data.get("degeneracies", {}).items():
            for ok, table in ops.items():
                d, i = _parse_op_key(shape, ok)
                degens[(parse_level(lk), d, i)] = {decode_cell(a): decode_cell(b) for a, b in table.items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidPresheafError(f"malformed presheaf JSON: {exc}") from exc
    plus: Optional[dict] = None
    if shape.marked:
        raw = data.get("markings", [])
        if shape.directions == 1:
            plus = {(1,): {decode_cell(e): decode_cell(e) for e in raw}}
        else:
            plus = {parse_level(k): {decode_cell(e): decode_cell(e) for e in v} for k, v in raw.items()}
    return TruncatedPresheaf(
        shape, bound, cells, faces, degens, plus, data.get("cosk"), data.get("name", ""), validate
    )


def dumps(data: Mapping[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=False, indent=1)


def presheaf_to_json(x: TruncatedPresheaf) -> str:
    return dumps(presheaf_to_dict(x))


def presheaf_from_json(text: str, validate: bool = True) -> TruncatedPresheaf:
    return presheaf_from_dict(json.loads(text), validate)


def load_presheaf(path: str | Path, validate: bool = True) -> TruncatedPresheaf:
    return presheaf_from_json(Path(path).read_text(encoding="utf-8"), validate)


def save_presheaf(x: TruncatedPresheaf, path: str | Path) -> None:
    Path(path).write_text(presheaf_to_json(x) + "\n", encoding="utf-8")


def components_to_dict(f: PresheafMap) -> dict[str, dict[str, str]]:
    """Thành phần của ánh xạ dạng JSON (cũng dùng làm nhân chứng trong báo cáo)."""
    return {
        level_key(lv): {encode_cell(c): encode_cell(v) for c, v in comp.items()}
        for lv, comp in f.components().items()
    }


def map_to_dict(f: PresheafMap, source_ref: Any = None, target_ref: Any = None) -> dict[str, Any]:
    """Ánh xạ: nguồn/đích là đường dẫn tệp (nếu cho) hoặc presheaf nhúng trực tiếp."""
    return {
        "source": source_ref if source_ref is not None else presheaf_to_dict(f.source),
        "target": target_ref if target_ref is not None else presheaf_to_dict(f.target),
        "components": components_to_dict(f),
    }


def map_from_dict(data: Mapping[str, Any], base: Optional[Path] = None, validate: bool = True) -> PresheafMap:
    def resolve(ref: Any) -> TruncatedPresheaf:
        if isinstance(ref, str):
            path = Path(ref) if base is None else base / ref
            return load_presheaf(path, validate)
        return presheaf_from_dict(ref, validate)

    source, target = resolve(data["source"]), resolve(data["target"])
    comps = {
        parse_level(k): {decode_cell(a): decode_cell(b) for a, b in v.items()}
        for k, v in data["components"].items()
    }
    return PresheafMap(source, target, comps, validate=validate)


def load_map(path: str | Path, validate: bool = True) -> PresheafMap:
    path = Path(path)
    return map_from_dict(json.loads(path.read_text(encoding="utf-8")), path.parent, validate)


def save_map(f: PresheafMap, path: str | Path, source_ref: Any = None, target_ref: Any = None) -> None:
    Path(path).write_text(dumps(map_to_dict(f, source_ref, target_ref)) + "\n", encoding="utf-8")
