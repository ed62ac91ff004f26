"""Định danh ô (cell) và thứ tự chuẩn tắc.

Ô của presheaf là giá trị hashable bất kỳ (int, str, tuple lồng nhau). Module này
cung cấp khóa sắp xếp chuẩn tắc để mọi phép duyệt đều tất định, cùng với băm
SHA-256 ổn định dùng cho tên tệp và báo cáo.
"""
from __future__ import annotations

import hashlib
import json
from typing import Any, Hashable, Iterable, NewType

CellId = Hashable
Level = tuple[int, ...]

# Khóa ánh xạ đã chuẩn hóa (bộ các cặp level -> (cell, ảnh)), dùng làm tên ô.
MapKey = NewType("MapKey", tuple)


def cell_key(cell: Any) -> tuple:
    """Khóa sắp xếp toàn phần cho định danh ô có kiểu hỗn hợp."""
    if isinstance(cell, bool):
        return (0, int(cell))
    if isinstance(cell, int):
        return (0, cell)
    if isinstance(cell, str):
        return (1, cell)
    if isinstance(cell, tuple):
        return (2, len(cell), tuple(cell_key(c) for c in cell))
    if isinstance(cell, frozenset):
        return (3, tuple(sorted(cell_key(c) for c in cell)))
    return (4, repr(cell))


def sorted_cells(cells: Iterable[Any]) -> list[Any]:
    """Sắp xếp các ô theo thứ tự chuẩn tắc."""
    return sorted(cells, key=cell_key)


def level_key(level: Level) -> str:
    """Chuỗi hóa level: (1,) -> "1", (1, 2) -> "1,2"."""
    return ",".join(str(i) for i in level)


def parse_level(text: str) -> Level:
    """Ngược lại của level_key."""
    return tuple(int(part) for part in text.split(","))


def encode_cell(cell: Any) -> str:
    """Chuỗi hóa ô cho định dạng JSON; chuỗi giữ nguyên để round-trip byte-identical."""
    if isinstance(cell, str):
        return cell
    return json.dumps(_to_jsonable(cell), separators=(",", ":"))


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, (tuple, list)):
        return [_to_jsonable(v) for v in value]
    if isinstance(value, frozenset):
        return sorted((_to_jsonable(v) for v in value), key=lambda v: json.dumps(v))
    return value


def digest(value: Any) -> str:
    """Băm SHA-256 (16 byte đầu, hex) của dạng chuỗi hóa chuẩn tắc."""
    payload = json.dumps(_to_jsonable(value), sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(payload.encode("utf-8")).digest()[:16].hex()
