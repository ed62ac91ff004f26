"""Union-find (hợp theo hạng, nén đường đi) cho thương tập hữu hạn theo từng level."""
from __future__ import annotations

from typing import Hashable, Iterable

from core.types.cell_types import cell_key


class UnionFind:
    """Cấu trúc tập rời nhau trên một tập phần tử hashable.

    Mỗi lớp có một leader nội bộ (phụ thuộc thứ tự hợp); tên chuẩn tắc của lớp là
    phần tử nhỏ nhất theo cell_key, lấy qua canonical().
    """

    def __init__(self, elements: Iterable[Hashable] = ()) -> None:
        self._leader: dict[Hashable, Hashable] = {}
        self._size: dict[Hashable, int] = {}
        self._rank: dict[Hashable, int] = {}
        self.clusters = 0
        for e in elements:
            self.add(e)

    def add(self, e: Hashable) -> None:
        if e in self._leader:
            return
        self._leader[e] = e
        self._size[e] = 1
        self._rank[e] = 0
        self.clusters += 1

    def __contains__(self, e: Hashable) -> bool:
        return e in self._leader

    def __len__(self) -> int:
        return len(self._leader)

    def size(self, e: Hashable) -> int:
        return self._size[self.find(e)]

    def find(self, e: Hashable) -> Hashable:
        path = [e]
        parent = self._leader[e]
        while parent != self._leader[parent]:
            path.append(parent)
            parent = self._leader[parent]
        if len(path) > 1:
            for a in path:
                self._leader[a] = parent
        return parent

    def union(self, a: Hashable, b: Hashable) -> bool:
        """Hợp hai lớp; trả về True nếu thực sự có gộp."""
        s1, s2 = self.find(a), self.find(b)
        if s1 == s2:
            return False
        r1, r2 = self._rank[s1], self._rank[s2]
        if r2 > r1:
            s1, s2 = s2, s1
            r1, r2 = r2, r1
        if r1 == r2:
            self._rank[s1] += 1
        self._leader[s2] = s1
        self._size[s1] += self._size[s2]
        self.clusters -= 1
        return True

    def same(self, a: Hashable, b: Hashable) -> bool:
        return self.find(a) == self.find(b)

    def canonical(self) -> dict[Hashable, Hashable]:
        """Phần tử -> đại diện nhỏ nhất của lớp (tất định, không phụ thuộc thứ tự hợp)."""
        least: dict[Hashable, Hashable] = {}
        for e in self._leader:
            root = self.find(e)
            current = least.get(root)
            if current is None or cell_key(e) < cell_key(current):
                least[root] = e
        return {e: least[self.find(e)] for e in self._leader}

    def classes(self) -> dict[Hashable, list[Hashable]]:
        """Đại diện chuẩn tắc -> các phần tử của lớp (đã sắp xếp)."""
        groups: dict[Hashable, list[Hashable]] = {}
        for e, rep in self.canonical().items():
            groups.setdefault(rep, []).append(e)
        return {rep: sorted(members, key=cell_key) for rep, members in groups.items()}
