"""Slow reference implementations used to check the fast paths.

Nothing here shares state or code with the production solver.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .hypergraph import Hypergraph, max_block_weight


@dataclass
class LawlerNetwork:
    """Directed network; ``capacity is None`` marks an unbounded edge.

    Node ``v < num_vertices`` is a hypergraph vertex, hyperedge ``e`` owns the
    in-node ``num_vertices + 2e`` and the out-node ``num_vertices + 2e + 1``.
    """

    num_vertices: int
    num_nodes: int
    edges: list[tuple[int, int, int | None]] = field(default_factory=list)
    sources: list[int] = field(default_factory=list)
    targets: list[int] = field(default_factory=list)

    def in_node(self, e: int) -> int:
        return self.num_vertices + 2 * e

    def out_node(self, e: int) -> int:
        return self.num_vertices + 2 * e + 1

    def is_bridge(self, edge: tuple[int, int, int | None]) -> bool:
        u, v, _ = edge
        return u >= self.num_vertices and v == u + 1 and (u - self.num_vertices) % 2 == 0


def build_lawler_network(
    num_vertices: int,
    edges: Sequence[Iterable[int]],
    capacities: Sequence[int],
    sources: Iterable[int],
    targets: Iterable[int],
) -> LawlerNetwork:
    net = LawlerNetwork(num_vertices, num_vertices + 2 * len(edges))
    for e, pins in enumerate(edges):
        e_in, e_out = net.in_node(e), net.out_node(e)
        net.edges.append((e_in, e_out, int(capacities[e])))
        for u in pins:
            net.edges.append((u, e_in, None))
            net.edges.append((e_out, u, None))
    net.sources = sorted(set(sources))
    net.targets = sorted(set(targets))
    return net


def lawler_network_of(fh) -> LawlerNetwork:
    """Lawler network of a FlowHypergraph's topology and terminals."""
    edges = [sorted(int(v) for v in fh.pins(e)) for e in range(fh.num_hyperedges)]
    return build_lawler_network(fh.num_vertices, edges, fh.arrays.capacity, fh.sources(), fh.targets())


@dataclass
class OracleFlow:
    value: int
    source_side: set[int]
    cut_edges: list[tuple[int, int, int | None]]


def max_flow(net: LawlerNetwork) -> OracleFlow:
    """Shortest augmenting paths (Edmonds-Karp) from all sources to all targets."""
    adj: list[list[int]] = [[] for _ in range(net.num_nodes)]
    head: list[int] = []
    cap: list[int | None] = []
    flow: list[int] = []
    for u, v, c in net.edges:
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        flow.append(0)
        adj[v].append(len(head))
        head.append(u)
        cap.append(0)
        flow.append(0)

    def residual(a: int) -> int | None:
        return None if cap[a] is None else cap[a] - flow[a]

    targets = set(net.targets)
    value = 0
    while True:
        parent = [-1] * net.num_nodes
        seen = [False] * net.num_nodes
        queue = deque(net.sources)
        for s in net.sources:
            seen[s] = True
        reached = -1
        while queue and reached < 0:
            u = queue.popleft()
            for a in adj[u]:
                r = residual(a)
                v = head[a]
                if seen[v] or (r is not None and r <= 0):
                    continue
                seen[v] = True
                parent[v] = a
                if v in targets:
                    reached = v
                    break
                queue.append(v)
        if reached < 0:
            source_side = {v for v in range(net.num_nodes) if seen[v]}
            cut = [
                (u, v, c) for (u, v, c) in net.edges
                if u in source_side and v not in source_side
            ]
            return OracleFlow(value, source_side, cut)
        bottleneck = None
        v = reached
        while parent[v] >= 0:
            r = residual(parent[v])
            if r is not None and (bottleneck is None or r < bottleneck):
                bottleneck = r
            v = head[parent[v] ^ 1]
        if bottleneck is None:
            raise ValueError("unbounded flow: a source and a target are joined by infinite edges")
        v = reached
        while parent[v] >= 0:
            a = parent[v]
            flow[a] += bottleneck
            flow[a ^ 1] -= bottleneck
            v = head[a ^ 1]
        value += bottleneck


def brute_force_min_cut(
    num_vertices: int,
    edges: Sequence[Sequence[int]],
    capacities: Sequence[int],
    sources: Iterable[int],
    targets: Iterable[int],
) -> int:
    """Minimum S-T hyperedge cut by enumerating every side for the free vertices."""
    sources, targets = set(sources), set(targets)
    free = [v for v in range(num_vertices) if v not in sources and v not in targets]
    if len(free) > 18:
        raise ValueError("too many free vertices for enumeration")
    best = None
    for mask in range(1 << len(free)):
        side = {v for i, v in enumerate(free) if mask >> i & 1} | sources
        cut = sum(
            int(c) for pins, c in zip(edges, capacities)
            if any(v in side for v in pins) and any(v not in side for v in pins)
        )
        best = cut if best is None or cut < best else best
    return int(best)


def _bisection_cuts(h: Hypergraph) -> tuple[np.ndarray, np.ndarray]:
    n = h.num_vertices
    masks = np.arange(1 << n, dtype=np.int64)
    side = (masks[:, None] >> np.arange(n)) & 1
    weight_one = side @ h.vertex_weight
    cut = np.zeros(masks.size, dtype=np.int64)
    for e in range(h.num_hyperedges):
        pins = h.pins_of(e)
        ones = side[:, pins].sum(axis=1)
        cut += h.edge_weight[e] * ((ones > 0) & (ones < len(pins)))
    return cut, weight_one


def brute_force_bisection(h: Hypergraph, epsilon: float) -> int:
    """Optimal connectivity over all epsilon-balanced 2-way partitions."""
    if h.num_vertices > 20:
        raise ValueError("brute force bisection is limited to 20 vertices")
    if h.num_vertices < 2:
        raise ValueError("need at least two vertices")
    total = h.total_weight
    bound = max_block_weight(total, 2, epsilon)
    cut, w1 = _bisection_cuts(h)
    ok = (w1 > 0) & (w1 < total) & (w1 <= bound) & (total - w1 <= bound)
    ok &= np.arange(ok.size) & 1 == 1  # vertex 0 in block 1 removes mirrored duplicates
    if not ok.any():
        raise ValueError("no balanced bisection exists")
    return int(cut[ok].min())


def brute_force_subset_sum(weights: Sequence[int]) -> set[int]:
    if len(weights) > 15:
        raise ValueError("brute force subset sum is limited to 15 weights")
    sums = set()
    for r in range(len(weights) + 1):
        for combo in combinations(weights, r):
            sums.add(sum(combo))
    return sums


def _reach(num_vertices: int, edges, capacities, sources, targets) -> tuple[set[int], set[int]]:
    """Vertices reachable from the sources and vertices reaching the targets
    in the residual network of a maximum flow."""
    net = build_lawler_network(num_vertices, edges, capacities, sources, targets)
    fwd = max_flow(net).source_side
    back = LawlerNetwork(net.num_vertices, net.num_nodes, [(v, u, c) for u, v, c in net.edges], net.targets, net.sources)
    bwd = max_flow(back).source_side
    return {v for v in fwd if v < num_vertices}, {v for v in bwd if v < num_vertices}


def balanced_nested_cut_exists(
    num_vertices: int,
    edges: Sequence[Sequence[int]],
    capacities: Sequence[int],
    weights: Sequence[int],
    sources: Iterable[int],
    targets: Iterable[int],
    max_source: int,
    max_target: int,
    max_states: int = 50_000,
) -> bool:
    """Whether some sequence of grow-and-pierce steps reaches a balanced cut.

    Every choice is explored: either side may be grown to its reachable set
    and extended by any free vertex that keeps it within its bound.  A state is accepted when one of the two
    minimum cut sides, plus any subset of the vertices whose hyperedges all
    touch both terminal sets, fits both bounds.  Raises ValueError when more
    than ``max_states`` terminal configurations would be visited.
    """
    w = [int(x) for x in weights]
    total = sum(w)
    edges = [list(map(int, e)) for e in edges]
    seen: set[tuple[frozenset[int], frozenset[int]]] = set()

    def fits(source_weight: int) -> bool:
        return source_weight <= max_source and total - source_weight <= max_target

    def balanced(s: set[int], t: set[int], sr: set[int], tr: set[int]) -> bool:
        iso = [
            v for v in range(num_vertices)
            if v not in sr and v not in tr
            and all(any(u in s for u in e) and any(u in t for u in e) for e in edges if v in e)
        ]
        sums = {0}
        for v in iso:
            sums |= {x + w[v] for x in sums}
        base_s = sum(w[v] for v in sr)
        base_t = total - sum(w[v] for v in tr) - sum(w[v] for v in iso)
        return any(fits(base_s + x) or fits(base_t + x) for x in sums)

    def reachable_window(s: frozenset[int], t: frozenset[int]) -> bool:
        # every later source block lies between s and the complement of t
        sums = {sum(w[v] for v in s)}
        for v in range(num_vertices):
            if v not in s and v not in t:
                sums |= {x + w[v] for x in sums}
        return any(fits(x) for x in sums)

    def visit(s: frozenset[int], t: frozenset[int]) -> bool:
        if (s, t) in seen:
            return False
        seen.add((s, t))
        if len(seen) > max_states:
            raise ValueError("nested cut search exceeded its state budget")
        if not reachable_window(s, t):
            return False
        sr, tr = _reach(num_vertices, edges, capacities, s, t)
        if balanced(set(s), set(t), sr, tr):
            return True
        for grown, other, is_source in ((sr, t, True), (tr, s, False)):
            # blocks contain their terminals, so a side over its bound is dead
            room = (max_source if is_source else max_target) - sum(w[v] for v in grown)
            for v in range(num_vertices):
                if v in grown or v in other or w[v] > room:
                    continue
                nxt = frozenset(grown | {v})
                if visit(nxt, other) if is_source else visit(other, nxt):
                    return True
        return False

    return visit(frozenset(sources), frozenset(targets))
