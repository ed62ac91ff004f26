"""Báo cáo kiểm tra: phán quyết + nhân chứng + cờ chính xác."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional

from core.types.cell_types import _to_jsonable


class Verdict(Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive-at-bound"

    @property
    def exit_code(self) -> int:
        return {Verdict.HOLDS: 0, Verdict.FAILS: 1, Verdict.INCONCLUSIVE: 2}[self]


@dataclass(frozen=True)
class CheckReport:
    verdict: Verdict
    check: str
    witness: Optional[Any] = None
    exactness: tuple[str, ...] = ()
    details: dict[str, Any] = field(default_factory=dict)
    elapsed_us: int = 0

    def __post_init__(self) -> None:
        if self.verdict is Verdict.FAILS and self.witness is None:
            raise ValueError(f"a failing report for {self.check!r} needs a witness")

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    @property
    def inconclusive(self) -> bool:
        return self.verdict is Verdict.INCONCLUSIVE

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        """Dạng JSON-able; bỏ thời gian mặc định để báo cáo tất định theo seed."""
        out: dict[str, Any] = {
            "check": self.check,
            "verdict": self.verdict.value,
            "witness": _to_jsonable(_plain(self.witness)),
            "exactness": list(self.exactness),
            "details": _to_jsonable(_plain(self.details)),
        }
        if include_timing:
            out["elapsed_us"] = self.elapsed_us
        return out


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((_plain(v) for v in value), key=repr)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return repr(value)


def holds(check: str, exactness: Iterable[str] = (), **details: Any) -> CheckReport:
    return CheckReport(Verdict.HOLDS, check, None, tuple(exactness), dict(details))


def fails(check: str, witness: Any, exactness: Iterable[str] = (), **details: Any) -> CheckReport:
    return CheckReport(Verdict.FAILS, check, witness, tuple(exactness), dict(details))


def inconclusive(check: str, exactness: Iterable[str] = (), witness: Any = None, **details: Any) -> CheckReport:
    return CheckReport(Verdict.INCONCLUSIVE, check, witness, tuple(exactness), dict(details))


def conjunction(check: str, reports: Iterable[CheckReport], **details: Any) -> CheckReport:
    """Gộp theo thứ tự chuẩn: fails đầu tiên thắng, sau đó inconclusive, còn lại holds."""
    reports = list(reports)
    exactness = tuple(sorted({flag for r in reports for flag in r.exactness}))
    parts = [r.to_dict() for r in reports]
    for r in reports:
        if r.fails:
            return fails(check, {"part": r.check, "witness": r.witness}, exactness, parts=parts, **details)
    for r in reports:
        if r.inconclusive:
            return inconclusive(check, exactness, witness={"part": r.check}, parts=parts, **details)
    return holds(check, exactness, parts=parts, **details)
