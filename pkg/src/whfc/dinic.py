"""Dinic's algorithm with capacity scaling, run directly on a FlowHypergraph."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from . import _kernels as K
from .flow_hypergraph import SOURCE, TARGET, FlowHypergraph

Side = Literal["source", "target"]

PushHook = Callable[[FlowHypergraph, int, int, int, int], None]


class _Workspace:
    def __init__(self, n: int, m: int):
        nodes = n + 2 * m
        self.dist = np.empty(nodes, dtype=np.int64)
        self.queue = np.empty(nodes, dtype=np.int64)
        self.cursor = np.zeros(nodes, dtype=np.int64)
        self.path_node = np.empty(nodes + 1, dtype=np.int64)
        self.path_inc = np.empty(nodes + 1, dtype=np.int64)
        self.path_e = np.empty(n, dtype=np.int64)
        self.path_inc_u = np.empty(n, dtype=np.int64)
        self.path_inc_v = np.empty(n, dtype=np.int64)
        self.path_route = np.empty(n, dtype=np.int64)
        self.seen = np.zeros(m, dtype=np.int64)
        self.state = np.zeros(1, dtype=np.int64)

    def path_args(self) -> tuple:
        return (self.cursor, self.path_node, self.path_inc, self.path_e,
                self.path_inc_u, self.path_inc_v, self.path_route)


def _workspace(fh: FlowHypergraph) -> _Workspace:
    if fh._workspace is None:
        fh._workspace = _Workspace(fh.num_vertices, fh.num_hyperedges)
    return fh._workspace


def _orientation(side: Side) -> tuple[int, int, int]:
    if side == "source":
        return 1, SOURCE, TARGET
    if side == "target":
        return -1, TARGET, SOURCE
    raise ValueError(f"unknown side {side!r}")


@dataclass
class ReachabilitySets:
    """Vertices reachable from one terminal side in the residual network.

    For the target side this is the set of vertices that can reach a target.
    ``cut_edges`` are the hyperedges entered from the reachable set whose
    bridge is saturated; at a maximum flow their capacities sum to the flow
    value.
    """

    side: Side
    reachable: np.ndarray
    cut_edges: np.ndarray
    cut_weight: int

    def weight(self, vertex_weight: np.ndarray) -> int:
        return int(vertex_weight[self.reachable].sum())


def _scale_start(fh: FlowHypergraph) -> int:
    cap = fh.arrays.capacity
    if not cap.size:
        return 0
    return 1 << (int(cap.max()).bit_length() - 1)


def _augment(fh: FlowHypergraph, side: Side, roots: np.ndarray, on_push: PushHook | None) -> int:
    sign, src_tag, dst_tag = _orientation(side)
    ws = _workspace(fh)
    fa = fh.arrays
    roots = np.ascontiguousarray(roots, dtype=np.int64)
    total = 0
    scale = _scale_start(fh)
    while scale >= 1 and roots.size:
        while True:
            target_level = K.level_bfs(fa, sign, scale, roots, src_tag, dst_tag, False, ws.dist, ws.queue)
            if target_level < 0:
                break
            if on_push is None:
                added = K.blocking_flow(
                    fa, sign, scale, roots, dst_tag, ws.dist, target_level,
                    *ws.path_args(), ws.seen, ws.state,
                )
            else:
                added = _hooked_blocking_flow(fh, sign, scale, roots, dst_tag, target_level, on_push)
            if added == 0:
                break
            total += int(added)
        scale >>= 1
    return total


def _hooked_blocking_flow(fh, sign, scale, roots, dst_tag, target_level, on_push: PushHook) -> int:
    # Same search as K.blocking_flow, with the pushes issued one at a time.
    ws = _workspace(fh)
    fa = fh.arrays
    ws.cursor[:] = 0
    ws.state[0] = 0
    total = 0
    while True:
        hops = K.find_path(fa, sign, scale, roots, dst_tag, ws.dist, target_level, *ws.path_args(), ws.state)
        if hops == 0:
            return total
        b = int(K.path_bottleneck(fa, sign, hops, ws.path_e, ws.path_inc_u, ws.path_inc_v, ws.path_route, ws.seen))
        for k in range(hops):
            e, iu, iv = int(ws.path_e[k]), int(ws.path_inc_u[k]), int(ws.path_inc_v[k])
            if sign < 0:
                iu, iv = iv, iu
            K.push(fa, e, iu, iv, b)
            on_push(fh, e, iu, iv, b)
        total += b


def exhaust_flow(fh: FlowHypergraph, on_push: PushHook | None = None) -> int:
    """Augment the current flow to a maximum flow; returns the value added.

    ``on_push(fh, e, inc_u, inc_v, delta)`` is called after every single
    push when given, which is slow and meant for auditing.
    """
    return _augment(fh, "source", fh.sources(), on_push)


def restart_from_piercing(fh: FlowHypergraph, pierced: int, on_push: PushHook | None = None) -> int:
    """Restore maximality after ``pierced`` joined a terminal side.

    Only the new terminal can start an augmenting path, so the searches are
    seeded from it alone: forward for a new source, backward for a new
    target.
    """
    tag = fh.terminal[pierced]
    if tag == SOURCE:
        return _augment(fh, "source", np.array([pierced]), on_push)
    if tag == TARGET:
        return _augment(fh, "target", np.array([pierced]), on_push)
    raise ValueError(f"vertex {pierced} is not a terminal")


def compute_reachable(fh: FlowHypergraph, side: Side) -> ReachabilitySets:
    sign, src_tag, dst_tag = _orientation(side)
    ws = _workspace(fh)
    fa = fh.arrays
    seeds = np.flatnonzero(fa.terminal == src_tag).astype(np.int64)
    K.level_bfs(fa, sign, 1, seeds, src_tag, dst_tag, True, ws.dist, ws.queue)
    n = fh.num_vertices
    reachable = ws.dist[:n] >= 0
    # entry node reached, exit node not: the bridge is saturated
    cut = np.flatnonzero((ws.dist[n::2] >= 0) & (ws.dist[n + 1 :: 2] < 0))
    return ReachabilitySets(side, reachable, cut, int(fa.capacity[cut].sum()))


def has_augmenting_path(fh: FlowHypergraph) -> bool:
    ws = _workspace(fh)
    level = K.level_bfs(fh.arrays, 1, 1, fh.sources().astype(np.int64), SOURCE, TARGET, False, ws.dist, ws.queue)
    return level >= 0
