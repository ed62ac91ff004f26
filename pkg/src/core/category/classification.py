"""Sơ đồ phân loại của phạm trù hữu hạn: mức (n, m) là các hàm tử [n] × I[m] -> C."""
from __future__ import annotations

import logging

from core.category.finite_category import FiniteCategory, chaotic, functors, nerve, poset, product_category
from core.config.defaults import TRANSFER_BOUND
from core.presheaf.presheaf import TruncatedPresheaf
from core.transfer.transfer_functors import t_upper

logger = logging.getLogger(__name__)


def classification_diagram(c: FiniteCategory, bound: int = TRANSFER_BOUND) -> TruncatedPresheaf:
    """Hàm tử [n] × I[m] -> C tương ứng ánh xạ Δ[n] × J[m] -> N(C), nên đây là t^!N(C)."""
    diagram = t_upper(nerve(c, max(bound, 2)), bound)
    logger.info("[ClassDiag] category=%s bound=%d exact=%s", c.name, bound, diagram.exact)
    return diagram.presheaf.renamed(f"class({c.name})")


def classification_level_count(c: FiniteCategory, n: int, m: int) -> int:
    """Đếm trực tiếp |Fun([n] × I[m], C)|, dùng để đối chiếu."""
    return sum(1 for _ in functors(product_category(poset(n), chaotic(m)), c))
