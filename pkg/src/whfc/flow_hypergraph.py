"""Mutable flow state on a weighted hypergraph.

Flow is stored per pin: ``pin_flow(u, e) > 0`` means ``u`` sends that much
into ``e``, ``< 0`` means it receives.  The flow through a hyperedge is the
sum of the positive (equivalently, negated negative) pin flows.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .hypergraph import Hypergraph

FREE, SOURCE, TARGET = K.FREE, K.SOURCE, K.TARGET


class FlowInvariantError(AssertionError):
    pass


class FlowHypergraph:
    def __init__(
        self,
        num_vertices: int,
        edges: Sequence[Iterable[int]],
        capacities: Sequence[int] | None = None,
        vertex_weights: Sequence[int] | None = None,
        sources: Iterable[int] = (),
        targets: Iterable[int] = (),
    ):
        h = Hypergraph.from_edges(num_vertices, edges, vertex_weights, capacities)
        n, m = h.num_vertices, h.num_hyperedges
        pins = h.pins.copy()
        # incidence i of vertex v sits at the slot where v occurs in its hyperedge
        order = np.argsort(pins, kind="stable")
        inc_slot = order.astype(np.int64)
        slot_inc = np.empty_like(inc_slot)
        slot_inc[inc_slot] = np.arange(len(pins), dtype=np.int64)
        self.arrays = K.FlowArrays(
            edge_ptr=h.edge_ptr.copy(),
            pin_vertex=pins,
            pin_flow=np.zeros(len(pins), dtype=np.int64),
            slot_inc=slot_inc,
            recv_end=h.edge_ptr[:-1].copy(),
            send_begin=h.edge_ptr[1:].copy(),
            capacity=h.edge_weight.copy(),
            flow=np.zeros(m, dtype=np.int64),
            vertex_ptr=h.vertex_ptr.copy(),
            inc_edge=h.incident.copy(),
            inc_slot=inc_slot,
            vertex_weight=h.vertex_weight.copy(),
            terminal=np.zeros(n, dtype=np.int8),
        )
        self._slot_edge = np.repeat(np.arange(m, dtype=np.int64), np.diff(h.edge_ptr))
        self._inc_vertex = np.repeat(np.arange(n, dtype=np.int64), np.diff(h.vertex_ptr))
        self._workspace = None
        for v in sources:
            self.arrays.terminal[v] = SOURCE
        for v in targets:
            if self.arrays.terminal[v] == SOURCE:
                raise ValueError(f"vertex {v} is both source and target")
            self.arrays.terminal[v] = TARGET

    @classmethod
    def from_hypergraph(cls, h: Hypergraph, sources: Iterable[int] = (), targets: Iterable[int] = ()) -> FlowHypergraph:
        return cls(h.num_vertices, h.edge_lists(), h.edge_weight, h.vertex_weight, sources, targets)

    @property
    def num_vertices(self) -> int:
        return len(self.arrays.vertex_ptr) - 1

    @property
    def num_hyperedges(self) -> int:
        return len(self.arrays.edge_ptr) - 1

    @property
    def num_pins(self) -> int:
        return len(self.arrays.pin_vertex)

    @property
    def terminal(self) -> np.ndarray:
        return self.arrays.terminal

    @property
    def vertex_weight(self) -> np.ndarray:
        return self.arrays.vertex_weight

    def sources(self) -> np.ndarray:
        return np.flatnonzero(self.arrays.terminal == SOURCE)

    def targets(self) -> np.ndarray:
        return np.flatnonzero(self.arrays.terminal == TARGET)

    def incident_edges(self, v: int) -> np.ndarray:
        a = self.arrays
        return a.inc_edge[a.vertex_ptr[v] : a.vertex_ptr[v + 1]]

    def pins(self, e: int) -> np.ndarray:
        """Pins of ``e`` in their current slot order."""
        a = self.arrays
        return a.pin_vertex[a.edge_ptr[e] : a.edge_ptr[e + 1]]

    def degree(self, v: int) -> int:
        return int(self.arrays.vertex_ptr[v + 1] - self.arrays.vertex_ptr[v])

    def incidence(self, v: int, e: int) -> int:
        a = self.arrays
        lo, hi = a.vertex_ptr[v], a.vertex_ptr[v + 1]
        hits = np.flatnonzero(a.inc_edge[lo:hi] == e)
        if not hits.size:
            raise KeyError(f"vertex {v} is not a pin of hyperedge {e}")
        return int(lo + hits[0])

    def capacity(self, e: int) -> int:
        return int(self.arrays.capacity[e])

    def hyperedge_flow(self, e: int) -> int:
        return int(self.arrays.flow[e])

    def pin_flow(self, v: int, e: int) -> int:
        return int(self.arrays.pin_flow[self.arrays.inc_slot[self.incidence(v, e)]])

    def residual_capacity(self, u: int, e: int, v: int) -> int:
        if u == v:
            raise ValueError("residual capacity needs two distinct pins")
        return int(K.residual(self.arrays, e, self.incidence(u, e), self.incidence(v, e)))

    def push(self, u: int, e: int, v: int, delta: int) -> None:
        if delta <= 0:
            raise ValueError("delta must be positive")
        iu, iv = self.incidence(u, e), self.incidence(v, e)
        if delta > K.residual(self.arrays, e, iu, iv):
            raise AssertionError("push exceeds residual capacity")
        K.push(self.arrays, e, iu, iv, delta)

    def scan_pins(self, e: int, entering: int) -> list[int]:
        """Pins that can receive positive flow from ``entering`` through ``e``.

        On a saturated hyperedge a pin that does not receive flow from ``e``
        can only reach the pins that currently send flow into it.
        """
        a = self.arrays
        fu = self.pin_flow(entering, e)
        if a.capacity[e] - a.flow[e] == 0 and fu >= 0:
            lo, hi = a.send_begin[e], a.edge_ptr[e + 1]
        else:
            lo, hi = a.edge_ptr[e], a.edge_ptr[e + 1]
        return [int(v) for v in a.pin_vertex[lo:hi] if v != entering]

    def add_terminal(self, v: int, side: int) -> None:
        if self.arrays.terminal[v] not in (FREE, side):
            raise ValueError(f"vertex {v} already belongs to the other terminal")
        self.arrays.terminal[v] = side

    def flow_value(self) -> int:
        """Net flow leaving the source terminals."""
        a = self.arrays
        src = a.terminal[a.pin_vertex] == SOURCE
        return int(a.pin_flow[src].sum())

    def flow_by_incidence(self) -> np.ndarray:
        """Pin flows in a slot-order independent layout, for state comparisons."""
        return self.arrays.pin_flow[self.arrays.inc_slot].copy()

    def state(self) -> tuple[np.ndarray, np.ndarray]:
        return self.arrays.flow.copy(), self.flow_by_incidence()

    def reset_flow(self) -> None:
        a = self.arrays
        a.pin_flow[:] = 0
        a.flow[:] = 0
        a.recv_end[:] = a.edge_ptr[:-1]
        a.send_begin[:] = a.edge_ptr[1:]

    def copy(self) -> FlowHypergraph:
        clone = object.__new__(FlowHypergraph)
        clone.arrays = K.FlowArrays(*(x.copy() for x in self.arrays))
        clone._slot_edge = self._slot_edge
        clone._inc_vertex = self._inc_vertex
        clone._workspace = None
        return clone

    def audit(self, conservation: bool = True) -> None:
        """Full consistency check of the flow state; raises FlowInvariantError."""
        a = self.arrays
        m = self.num_hyperedges
        if not np.array_equal(a.inc_slot[a.slot_inc], np.arange(self.num_pins)):
            raise FlowInvariantError("pin position index is inconsistent")
        if not np.array_equal(a.pin_vertex[a.inc_slot], self._inc_vertex):
            raise FlowInvariantError("incidence points at the wrong pin")
        if not np.array_equal(self._slot_edge[a.inc_slot], a.inc_edge):
            raise FlowInvariantError("pin left its hyperedge")

        if ((a.flow < 0) | (a.flow > a.capacity)).any():
            raise FlowInvariantError("hyperedge flow outside [0, capacity]")
        pos = np.zeros(m, dtype=np.int64)
        neg = np.zeros(m, dtype=np.int64)
        np.add.at(pos, self._slot_edge, np.maximum(a.pin_flow, 0))
        np.add.at(neg, self._slot_edge, np.maximum(-a.pin_flow, 0))
        if not (np.array_equal(pos, a.flow) and np.array_equal(neg, a.flow)):
            raise FlowInvariantError("f(e) differs from the sum of sent or received pin flow")

        slot = np.arange(self.num_pins)
        recv = slot < a.recv_end[self._slot_edge]
        send = slot >= a.send_begin[self._slot_edge]
        if ((a.recv_end < a.edge_ptr[:-1]) | (a.send_begin > a.edge_ptr[1:]) | (a.recv_end > a.send_begin)).any():
            raise FlowInvariantError("subrange boundaries out of order")
        if ((a.pin_flow < 0) != recv).any() or ((a.pin_flow > 0) != send).any():
            raise FlowInvariantError("pin sits in the wrong flow subrange")

        if conservation:
            excess = np.zeros(self.num_vertices, dtype=np.int64)
            np.add.at(excess, a.pin_vertex, a.pin_flow)
            free = a.terminal == FREE
            if excess[free].any():
                raise FlowInvariantError("flow conservation violated at a non-terminal vertex")
