"""Incremental subset-sum table over the weights of isolated vertices."""
from __future__ import annotations

import bisect
import math

import numpy as np

from . import _kernels as K


class IsolatedDP:
    """Achievable subset sums of isolated-vertex weights.

    Achievable sums are also kept as a sorted list of maximal runs of
    consecutive sums, so that a window query costs O(#runs).  Only run
    endpoints are indexed (``_run_end[lo] = hi``, ``_run_start[hi] = lo``);
    a new sum can only touch a run at one of its endpoints.
    """

    def __init__(self, table_limit: int = 10_000_000):
        self.table_limit = table_limit
        self.vertices: list[int] = []
        self.total = 0
        self.disabled = False
        self._table = np.zeros(64, dtype=np.bool_)
        self._table[0] = True
        self._parent = np.full(64, -1, dtype=np.int64)
        self._weights: dict[int, int] = {}
        self._starts: list[int] = [0]
        self._run_end: dict[int, int] = {0: 0}
        self._run_start: dict[int, int] = {0: 0}

    def __contains__(self, v: int) -> bool:
        return v in self._weights

    def __len__(self) -> int:
        return len(self.vertices)

    def add(self, v: int, weight: int) -> bool:
        """Insert an isolated vertex; returns False once the table cap is hit."""
        if self.disabled or v in self._weights:
            return False
        weight = int(weight)
        top = self.total
        if top + weight + 1 > self.table_limit:
            self.disabled = True
            return False
        if top + weight + 1 > self._table.size:
            size = max(2 * self._table.size, top + weight + 1)
            self._table = np.concatenate([self._table, np.zeros(size - self._table.size, dtype=np.bool_)])
            self._parent = np.concatenate([self._parent, np.full(size - self._parent.size, -1, dtype=np.int64)])
        out = np.empty(top + 1, dtype=np.int64)
        count = K.subset_sum_insert(self._table, self._parent, top, weight, v, out)
        self._weights[v] = weight
        self.vertices.append(v)
        self.total += weight
        for x in out[:count][::-1].tolist():
            self._insert_sum(x)
        return True

    def without(self, v: int) -> IsolatedDP:
        """Table rebuilt from every tracked vertex except ``v``."""
        dp = IsolatedDP(self.table_limit)
        for u in self.vertices:
            if u != v:
                dp.add(u, self._weights[u])
        return dp

    def _insert_sum(self, x: int) -> None:
        left = self._run_start.pop(x - 1, None)
        right_end = self._run_end.pop(x + 1, None)
        if left is not None:
            lo = left
            del self._run_end[lo]
        else:
            lo = x
            bisect.insort(self._starts, x)
        if right_end is not None:
            hi = right_end
            del self._run_start[hi]
            del self._starts[bisect.bisect_left(self._starts, x + 1)]
        else:
            hi = x
        self._run_end[lo] = hi
        self._run_start[hi] = lo

    def is_sum(self, x: int) -> bool:
        return 0 <= x <= self.total and bool(self._table[x])

    def sums(self) -> set[int]:
        return set(np.flatnonzero(self._table[: self.total + 1]).tolist())

    def ranges(self) -> list[tuple[int, int]]:
        return [(lo, self._run_end[lo]) for lo in self._starts]

    def best_sum(self, lo: int, hi: int, ideal: float) -> int | None:
        """Achievable sum in ``[lo, hi]`` closest to ``ideal`` (smaller on ties)."""
        lo, hi = max(lo, 0), min(hi, self.total)
        best = None
        for start in self._starts:
            end = self._run_end[start]
            a, b = max(start, lo), min(end, hi)
            if a > b:
                continue
            floor = math.floor(ideal)
            for cand in (min(max(floor, a), b), min(max(floor + 1, a), b)):
                if best is None or (abs(cand - ideal), cand) < (abs(best - ideal), best):
                    best = cand
        return best

    def subset_for(self, x: int) -> list[int]:
        """One concrete set of isolated vertices whose weights sum to ``x``."""
        if not self.is_sum(x):
            raise ValueError(f"{x} is not an achievable sum")
        chosen = []
        while x > 0:
            v = int(self._parent[x])
            chosen.append(v)
            x -= self._weights[v]
        return chosen
