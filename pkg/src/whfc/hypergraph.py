"""Weighted hypergraph in CSR form, k-way partitions and their metrics."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable weighted hypergraph.

    Pins are stored twice: ``pins[edge_ptr[e]:edge_ptr[e+1]]`` are the vertices
    of hyperedge ``e`` and ``incident[vertex_ptr[v]:vertex_ptr[v+1]]`` are the
    hyperedges containing ``v``.
    """

    edge_ptr: np.ndarray
    pins: np.ndarray
    vertex_ptr: np.ndarray
    incident: np.ndarray
    vertex_weight: np.ndarray
    edge_weight: np.ndarray

    @classmethod
    def from_edges(
        cls,
        num_vertices: int,
        edges: Sequence[Iterable[int]],
        vertex_weights: Sequence[int] | None = None,
        edge_weights: Sequence[int] | None = None,
    ) -> Hypergraph:
        edge_lists = [list(dict.fromkeys(int(v) for v in e)) for e in edges]
        m = len(edge_lists)
        sizes = np.fromiter((len(e) for e in edge_lists), dtype=np.int64, count=m)
        edge_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(sizes, out=edge_ptr[1:])
        pins = np.fromiter((v for e in edge_lists for v in e), dtype=np.int64, count=int(edge_ptr[-1]))
        if pins.size and (pins.min() < 0 or pins.max() >= num_vertices):
            raise ValueError("pin index out of range")

        vw = np.ones(num_vertices, dtype=np.int64) if vertex_weights is None else np.asarray(vertex_weights, dtype=np.int64).copy()
        ew = np.ones(m, dtype=np.int64) if edge_weights is None else np.asarray(edge_weights, dtype=np.int64).copy()
        if vw.shape != (num_vertices,) or ew.shape != (m,):
            raise ValueError("weight array has the wrong length")
        if (vw < 1).any() or (ew < 1).any():
            raise ValueError("weights must be positive integers")

        owner = np.repeat(np.arange(m, dtype=np.int64), sizes)
        order = np.argsort(pins, kind="stable")
        incident = owner[order]
        vertex_ptr = np.zeros(num_vertices + 1, dtype=np.int64)
        np.cumsum(np.bincount(pins, minlength=num_vertices), out=vertex_ptr[1:])
        return cls(
            _frozen(edge_ptr),
            _frozen(pins),
            _frozen(vertex_ptr),
            _frozen(incident),
            _frozen(vw),
            _frozen(ew),
        )

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_ptr) - 1

    @property
    def num_hyperedges(self) -> int:
        return len(self.edge_ptr) - 1

    @property
    def num_pins(self) -> int:
        return len(self.pins)

    @property
    def total_weight(self) -> int:
        return int(self.vertex_weight.sum())

    def pins_of(self, e: int) -> np.ndarray:
        return self.pins[self.edge_ptr[e] : self.edge_ptr[e + 1]]

    def edges_of(self, v: int) -> np.ndarray:
        return self.incident[self.vertex_ptr[v] : self.vertex_ptr[v + 1]]

    def edge_size(self, e: int) -> int:
        return int(self.edge_ptr[e + 1] - self.edge_ptr[e])

    def degree(self, v: int) -> int:
        return int(self.vertex_ptr[v + 1] - self.vertex_ptr[v])

    def edge_lists(self) -> list[list[int]]:
        return [self.pins_of(e).tolist() for e in range(self.num_hyperedges)]

    def check_consistency(self) -> None:
        """Full cross-scan of both incidence directions."""
        forward = {(int(v), e) for e in range(self.num_hyperedges) for v in self.pins_of(e)}
        backward = {(v, int(e)) for v in range(self.num_vertices) for e in self.edges_of(v)}
        if forward != backward:
            raise AssertionError("incidence directions disagree")
        if len(forward) != self.num_pins:
            raise AssertionError("duplicate pins")

    def structurally_equal(self, other: Hypergraph) -> bool:
        return (
            self.num_vertices == other.num_vertices
            and np.array_equal(self.edge_ptr, other.edge_ptr)
            and np.array_equal(self.pins, other.pins)
            and np.array_equal(self.vertex_weight, other.vertex_weight)
            and np.array_equal(self.edge_weight, other.edge_weight)
        )


class Partition:
    """Block assignment of every vertex plus cached block weights."""

    def __init__(self, hypergraph: Hypergraph, k: int, assignment: Sequence[int] | np.ndarray):
        a = np.array(assignment, dtype=np.int64)
        if k < 1:
            raise ValueError("k must be positive")
        if a.shape != (hypergraph.num_vertices,):
            raise ValueError(f"expected {hypergraph.num_vertices} block ids, got {a.size}")
        if a.size and (a.min() < 0 or a.max() >= k):
            raise ValueError("block id out of range")
        self.hypergraph = hypergraph
        self.k = k
        self.assignment = a
        self.block_weight = np.bincount(a, weights=hypergraph.vertex_weight, minlength=k).astype(np.int64)
        if (np.bincount(a, minlength=k) == 0).any():
            raise ValueError("every block must be non-empty")

    def move(self, v: int, block: int) -> None:
        old = self.assignment[v]
        if old == block:
            return
        w = self.hypergraph.vertex_weight[v]
        self.block_weight[old] -= w
        self.block_weight[block] += w
        self.assignment[v] = block

    def copy(self) -> Partition:
        return Partition(self.hypergraph, self.k, self.assignment)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.assignment, other.assignment)


def max_block_weight(total_weight: int, k: int, epsilon: float) -> int:
    """Largest integer block weight allowed by ``(1 + epsilon) * total / k``."""
    eps = Fraction(repr(float(epsilon)))
    return int((1 + eps) * total_weight / k // 1)


def edge_connectivity(h: Hypergraph, assignment: np.ndarray, k: int) -> np.ndarray:
    """Number of distinct blocks touched by every hyperedge."""
    owner = np.repeat(np.arange(h.num_hyperedges, dtype=np.int64), np.diff(h.edge_ptr))
    keys = np.unique(owner * k + assignment[h.pins])
    return np.bincount(keys // k, minlength=h.num_hyperedges)


def connectivity_metric(h: Hypergraph, p: Partition) -> int:
    lam = edge_connectivity(h, p.assignment, p.k)
    return int((h.edge_weight * np.maximum(lam - 1, 0)).sum())


def imbalance(h: Hypergraph, p: Partition) -> Fraction:
    total = h.total_weight
    return Fraction(int(p.block_weight.max()) * p.k, total) - 1


def is_balanced(h: Hypergraph, p: Partition, epsilon: float) -> bool:
    return int(p.block_weight.max()) <= max_block_weight(h.total_weight, p.k, epsilon)
