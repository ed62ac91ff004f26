"""Tham số mặc định của simpcalc (cận chiều, trần nâng, ngân sách)."""
from __future__ import annotations

import os

# Cận chiều mặc định: đủ cho đích 2-coskeletal, bài toán nâng 3 chiều và phạm trù đồng luân.
DEFAULT_DIM_BOUND = 4
# Trần chiều cho các sinh tử nâng (horn, biên).
DEFAULT_LIFT_CAP = 3
# Trần cho kiểm tra trivial Kan của ánh xạ so sánh slice.
DEFAULT_TRIVIAL_CAP = 2
# Số hình trụ K tối đa cho điều kiện Segal/completeness tương đối.
CYLINDER_BUDGET = 8
# Cận đầu ra mặc định của t_! và t^! (đủ cho đích 2-coskeletal).
TRANSFER_BOUND = 2
# Số đẳng cấu không đồng nhất tối đa của phạm trù trong corpus; t^!N(C) ở level (2, 2) có |Fun([2] × I[2], C)| ô.
CATEGORY_MAX_ISOS = 2
DEFAULT_SEED = 0
DEFAULT_SUITE_CASES = 50
PROGRESS_EVERY = 10

CAP_ENV_VAR = "SIMPCALC_CAP"
LOG_LEVEL_ENV_VAR = "SIMPCALC_LOG_LEVEL"


def _cap_override() -> int | None:
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None or raw.strip() == "":
        return None
    value = int(raw)
    if value < 0:
        raise ValueError(f"{CAP_ENV_VAR} must be non-negative, got {raw!r}")
    return value


def lift_cap() -> int:
    """Trần nâng hiệu lực (biến môi trường SIMPCALC_CAP ghi đè)."""
    override = _cap_override()
    return DEFAULT_LIFT_CAP if override is None else override


def trivial_cap() -> int:
    """Trần trivial Kan hiệu lực (cùng biến môi trường ghi đè)."""
    override = _cap_override()
    return DEFAULT_TRIVIAL_CAP if override is None else override
