"""Bộ đếm metrics gọn cho các phép tìm kiếm vét cạn."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field


@dataclass
class SearchMetrics:
    nodes_visited: int = 0
    branches_pruned: int = 0
    maps_found: int = 0
    hom_sets: int = 0
    squares_checked: int = 0
    lifts_found: int = 0
    elapsed_total_us: int = 0
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False, compare=False)

    def record_node(self, pruned: bool) -> None:
        with self._lock:
            self.nodes_visited += 1
            if pruned:
                self.branches_pruned += 1

    def record_search(self, nodes: int, pruned: int) -> None:
        with self._lock:
            self.nodes_visited += nodes
            self.branches_pruned += pruned

    def record_hom_set(self, size: int, micros: int) -> None:
        with self._lock:
            self.hom_sets += 1
            self.maps_found += size
            self.elapsed_total_us += micros

    def record_square(self, lifted: bool) -> None:
        with self._lock:
            self.squares_checked += 1
            if lifted:
                self.lifts_found += 1

    def merge(self, other: "SearchMetrics") -> None:
        with self._lock:
            self.nodes_visited += other.nodes_visited
            self.branches_pruned += other.branches_pruned
            self.maps_found += other.maps_found
            self.hom_sets += other.hom_sets
            self.squares_checked += other.squares_checked
            self.lifts_found += other.lifts_found
            self.elapsed_total_us += other.elapsed_total_us

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return {
                "nodes_visited": self.nodes_visited,
                "branches_pruned": self.branches_pruned,
                "maps_found": self.maps_found,
                "hom_sets": self.hom_sets,
                "squares_checked": self.squares_checked,
                "lifts_found": self.lifts_found,
            }

    def average_hom_us(self) -> float:
        if self.hom_sets == 0:
            return 0.0
        return self.elapsed_total_us / float(self.hom_sets)


# Bộ đếm dùng chung của tiến trình; các phép tính ghi vào đây nếu không truyền bộ riêng.
GLOBAL_METRICS = SearchMetrics()
