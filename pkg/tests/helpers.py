"""Seeded instance generators shared by the test modules."""
from __future__ import annotations

import numpy as np

from whfc.flow_hypergraph import FlowHypergraph
from whfc.hypergraph import Hypergraph


def random_flow_instance(rng: np.random.Generator, max_n: int = 30, max_m: int = 40, max_pins: int = 8, max_w: int = 20):
    """Random weighted hypergraph with non-adjacent source and target sets.

    Returns (n, edges, capacities, sources, targets).
    """
    while True:
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        edges = [
            rng.choice(n, size=int(rng.integers(1, min(max_pins, n) + 1)), replace=False).tolist()
            for _ in range(m)
        ]
        caps = rng.integers(1, max_w + 1, size=m).tolist()
        perm = rng.permutation(n).tolist()
        ns = int(rng.integers(1, max(1, n // 3) + 1))
        sources = perm[:ns]
        src = set(sources)
        adjacent = {v for e in edges if src & set(e) for v in e}
        rest = [v for v in perm[ns:] if v not in adjacent]
        if not rest:
            continue
        nt = int(rng.integers(1, max(1, len(rest) // 2) + 1))
        return n, edges, caps, sources, rest[:nt]


def random_flow_hypergraph(rng: np.random.Generator, **kw) -> FlowHypergraph:
    n, edges, caps, s, t = random_flow_instance(rng, **kw)
    return FlowHypergraph(n, edges, caps, sources=s, targets=t)


def connected_hypergraph(rng: np.random.Generator, n: int, m: int, max_pins: int = 5, max_vw: int = 1, max_ew: int = 9) -> Hypergraph:
    """Random hypergraph made connected by a random spanning path of 2-pin edges."""
    perm = rng.permutation(n)
    edges = [[int(perm[i]), int(perm[i + 1])] for i in range(n - 1)]
    for _ in range(m):
        edges.append(rng.choice(n, size=int(rng.integers(2, min(max_pins, n) + 1)), replace=False).tolist())
    vw = rng.integers(1, max_vw + 1, n)
    ew = rng.integers(1, max_ew + 1, len(edges))
    return Hypergraph.from_edges(n, edges, vw, ew)


def planted_bisection(rng: np.random.Generator, half: int, crossing: int = 3) -> Hypergraph:
    """Two dense random clusters of ``half`` vertices joined by a few 2-pin edges."""
    n = 2 * half
    perm = rng.permutation(n)
    a, b = perm[:half], perm[half:]
    edges = []
    for part in (a, b):
        for _ in range(int(rng.integers(half, 2 * half))):
            edges.append(rng.choice(part, size=int(rng.integers(2, min(4, half) + 1)), replace=False).tolist())
    for _ in range(int(rng.integers(1, crossing + 1))):
        edges.append([int(rng.choice(a)), int(rng.choice(b))])
    return Hypergraph.from_edges(n, edges, None, rng.integers(1, 4, len(edges)))


def cut_weight(edges, caps, side: np.ndarray) -> int:
    """Weight of hyperedges with pins on both sides of a boolean assignment."""
    total = 0
    for pins, c in zip(edges, caps):
        flags = {bool(side[v]) for v in pins}
        if len(flags) == 2:
            total += int(c)
    return total
