"""k-way refinement by flow problems around block-pair cuts."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .flow_hypergraph import FlowHypergraph
from .hfc import HfcConfig, HfcResult, run_hfc
from .hypergraph import Hypergraph, Partition, max_block_weight

Mode = Literal["hfc", "hfc-star", "whole"]
MODES = ("hfc", "hfc-star", "whole")


@dataclass
class ExtractionResult:
    """Flow problem around the cut between blocks ``i`` (source) and ``j``.

    Flow vertices 0 and 1 are the source and target terminals.  A terminal
    either stands for the unvisited part of its block (``vertex_of == -1``,
    members listed in ``source_members`` / ``target_members``) or, when the
    search covered the whole block, is an ordinary vertex of it.
    """

    fh: FlowHypergraph
    blocks: tuple[int, int]
    vertex_of: np.ndarray
    source_members: np.ndarray
    target_members: np.ndarray
    distance: np.ndarray
    origin: np.ndarray
    cut_weight: int  # original cut weight of the retained hyperedges
    fixed_cut: int  # hyperedges with pins in both terminals, always cut
    bounds: tuple[float, float]

    @property
    def num_vertices(self) -> int:
        return self.fh.num_vertices


def pair_cut_edges(h: Hypergraph, p: Partition, i: int, j: int) -> np.ndarray:
    owner = np.repeat(np.arange(h.num_hyperedges), np.diff(h.edge_ptr))
    blocks = p.assignment[h.pins]
    has_i = np.bincount(owner[blocks == i], minlength=h.num_hyperedges) > 0
    has_j = np.bincount(owner[blocks == j], minlength=h.num_hyperedges) > 0
    return np.flatnonzero(has_i & has_j)


def extraction_bounds(h: Hypergraph, p: Partition, i: int, j: int, mode: Mode, epsilon: float) -> tuple[float, float]:
    wi, wj = int(p.block_weight[i]), int(p.block_weight[j])
    if mode == "hfc":
        return wi / 5, wj / 5
    if mode == "hfc-star":
        avg = math.ceil(h.total_weight / p.k)
        cap = (1 + 16 * epsilon) * avg
        return cap - wj, cap - wi
    if mode == "whole":
        return math.inf, math.inf
    raise ValueError(f"unknown mode {mode!r}")


def _layered_bfs(h: Hypergraph, p: Partition, block: int, seeds: np.ndarray, bound: float, rng: np.random.Generator):
    """Randomized BFS inside one block that stops at the first vertex that
    would push the visited weight over ``bound``.  Returns visit order and
    layer per visited vertex."""
    order: list[int] = []
    layer: dict[int, int] = {}
    weight = 0
    frontier = [int(v) for v in rng.permutation(seeds)]
    depth = 0
    for v in frontier:
        layer[v] = 0
    while frontier:
        nxt: list[int] = []
        for v in frontier:
            w = int(h.vertex_weight[v])
            if weight + w > bound:
                for u in frontier[frontier.index(v):] + nxt:
                    del layer[u]
                return order, layer
            weight += w
            order.append(v)
            for e in h.edges_of(v).tolist():
                for u in rng.permutation(h.pins_of(e)).tolist():
                    if p.assignment[u] == block and u not in layer:
                        layer[u] = depth + 1
                        nxt.append(u)
        frontier = nxt
        depth += 1
    return order, layer


def _farthest(h: Hypergraph, start: np.ndarray, allowed: np.ndarray, assignment: np.ndarray, block: int, rng) -> int:
    """Last vertex of ``block`` (any vertex when negative) reached by a
    randomized BFS from ``start`` inside the ``allowed`` vertices."""
    seen = np.zeros(h.num_vertices, dtype=np.bool_)
    seen[start] = True
    queue = deque(int(v) for v in rng.permutation(start))
    last = -1
    while queue:
        v = queue.popleft()
        if block < 0 or assignment[v] == block:
            last = v
        for e in h.edges_of(v).tolist():
            for u in rng.permutation(h.pins_of(e)).tolist():
                if allowed[u] and not seen[u]:
                    seen[u] = True
                    queue.append(u)
    if last < 0:
        # block not reachable from the other terminal
        last = int(rng.choice(np.flatnonzero(assignment == block)))
    return last


def extract_flow_problem(
    h: Hypergraph,
    p: Partition,
    i: int,
    j: int,
    mode: Mode = "hfc",
    seed: int = 0,
    epsilon: float = 0.03,
) -> ExtractionResult | None:
    """Build the flow problem for the pair, or None if the pair shares no cut."""
    cut = pair_cut_edges(h, p, i, j)
    if not cut.size:
        return None
    rng = np.random.default_rng(seed)
    boundary = np.unique(np.concatenate([h.pins_of(e) for e in cut.tolist()]))
    bounds = extraction_bounds(h, p, i, j, mode, epsilon)

    visited = []
    for block, bound in ((i, bounds[0]), (j, bounds[1])):
        seeds = boundary[p.assignment[boundary] == block]
        visited.append(_layered_bfs(h, p, block, seeds, bound, rng))

    n = h.num_vertices
    in_pair = (p.assignment == i) | (p.assignment == j)
    rests, orders = [], []
    for block, (order, _) in zip((i, j), visited):
        in_block = np.flatnonzero(p.assignment == block)
        seen = np.zeros(n, dtype=np.bool_)
        seen[order] = True
        rests.append(in_block[~seen[in_block]])
        orders.append(list(order))
    # A side whose search covered its whole block gets a single-vertex
    # terminal: the vertex farthest from the other side's terminal, or, if
    # both sides are covered, the farthest from the cut for the source side.
    single = [-1, -1]
    if not rests[0].size and not rests[1].size:
        # the current cut carries no information about where the best cut is,
        # so take a pseudo-diameter pair of the whole pair
        start = np.array([orders[0][-1]])
        single[0] = _farthest(h, start, in_pair, p.assignment, -1, rng)
        single[1] = _farthest(h, np.array([single[0]]), in_pair, p.assignment, -1, rng)
        if single[1] == single[0]:
            single[1] = orders[1][-1] if orders[1][-1] != single[0] else orders[0][-1]
    for side in (0, 1):
        if rests[side].size or single[side] >= 0:
            continue
        other = rests[1 - side] if rests[1 - side].size else np.array([single[1 - side]])
        single[side] = _farthest(h, other, in_pair, p.assignment, (i, j)[side], rng)

    flow_id = np.full(n, -1, dtype=np.int64)
    vertex_of = [single[0], single[1]]
    distance = [0, 0]
    origin = [-1, -1]
    members = []
    for side, (order, layer) in enumerate(visited):
        if single[side] >= 0:
            flow_id[single[side]] = side
            members.append(np.zeros(0, dtype=np.int64))
        else:
            flow_id[rests[side]] = side
            members.append(rests[side])
        for v in order:
            if v in single:
                continue
            flow_id[v] = len(vertex_of)
            vertex_of.append(v)
            distance.append(layer[v])
            origin.append(side)

    weights = np.zeros(len(vertex_of), dtype=np.int64)
    np.add.at(weights, flow_id[flow_id >= 0], h.vertex_weight[flow_id >= 0])

    edges, caps = [], []
    cut_weight = fixed = 0
    for e in range(h.num_hyperedges):
        pins = h.pins_of(e)
        ids = np.unique(flow_id[pins])
        ids = ids[ids >= 0]
        if ids.size < 2:
            continue
        blocks = p.assignment[pins]
        spans = bool((blocks == i).any() and (blocks == j).any())
        if ids[0] == 0 and ids[1] == 1:
            fixed += int(h.edge_weight[e]) if spans else 0
            continue
        edges.append(ids.tolist())
        caps.append(int(h.edge_weight[e]))
        cut_weight += int(h.edge_weight[e]) if spans else 0

    fh = FlowHypergraph(len(vertex_of), edges, caps, weights, sources=[0], targets=[1])
    return ExtractionResult(
        fh=fh,
        blocks=(i, j),
        vertex_of=np.array(vertex_of, dtype=np.int64),
        source_members=members[0],
        target_members=members[1],
        distance=np.array(distance, dtype=np.int64),
        origin=np.array(origin, dtype=np.int64),
        cut_weight=cut_weight,
        fixed_cut=fixed,
        bounds=bounds,
    )


def apply_refinement(p: Partition, ext: ExtractionResult, result: HfcResult) -> int:
    """Move vertices to the sides HFC chose; returns the connectivity gain.

    Infeasible results leave the partition alone and gain nothing.
    """
    if not result.feasible:
        return 0
    i, j = ext.blocks
    side = result.bipartition.source_block
    for u, v in enumerate(ext.vertex_of.tolist()):
        if v >= 0:
            p.move(v, i if side[u] else j)
    return ext.cut_weight - result.flow_value


@dataclass
class RefineConfig:
    k: int
    epsilon: float = 0.03
    mode: Mode = "hfc"
    seed: int = 0
    use_iso_dp: bool = True
    use_distance: bool = True
    use_mbc: bool = True
    mbc_repetitions: int = 7
    dp_table_limit: int = 10_000_000
    max_rounds: int = 100


@dataclass
class RefineStats:
    rounds: int = 0
    flow_problems: int = 0
    hfc_runs: int = 0
    improvements: int = 0
    pierce_steps: int = 0
    dp_vertices: int = 0
    mbc_improvements: int = 0
    total_gain: int = 0
    flow_problem_sizes: list[int] = field(default_factory=list)
    gains: list[int] = field(default_factory=list)


def _pair_seed(seed: int, *parts: int) -> int:
    return int(np.random.SeedSequence([seed, *parts]).generate_state(1)[0])


def refine_pair(h: Hypergraph, p: Partition, i: int, j: int, config: RefineConfig, seed: int, stats: RefineStats) -> int | None:
    """One HFC run on the pair.  Applies and returns the gain when the result
    is an improvement, else returns None and leaves ``p`` unchanged."""
    ext = extract_flow_problem(h, p, i, j, config.mode, seed, config.epsilon)
    if ext is None:
        return None
    limit = max_block_weight(h.total_weight, p.k, config.epsilon)
    hfc_config = HfcConfig(
        max_source_weight=limit,
        max_target_weight=limit,
        cut_bound=ext.cut_weight,
        use_iso_dp=config.use_iso_dp,
        use_distance=config.use_distance,
        use_mbc=config.use_mbc,
        mbc_repetitions=config.mbc_repetitions,
        dp_table_limit=config.dp_table_limit,
        seed=seed,
    )
    result = run_hfc(ext.fh, hfc_config, ext.distance, ext.origin)
    stats.hfc_runs += 1
    stats.flow_problems += result.stats.flow_problems
    stats.pierce_steps += result.stats.pierce_steps
    stats.dp_vertices += result.stats.dp_vertices
    stats.mbc_improvements += result.stats.mbc_improvements
    stats.flow_problem_sizes.append(ext.num_vertices)
    if not result.feasible:
        return None
    gain = ext.cut_weight - result.flow_value
    before = max(int(p.block_weight[i]), int(p.block_weight[j]))
    after = max(result.bipartition.source_weight, result.bipartition.target_weight)
    if gain < 0 or (gain == 0 and after >= before):
        return None
    return apply_refinement(p, ext, result)


def active_pairs(h: Hypergraph, p: Partition) -> list[tuple[int, int, int]]:
    """Block pairs sharing cut hyperedges with their pair-cut weight."""
    owner = np.repeat(np.arange(h.num_hyperedges), np.diff(h.edge_ptr))
    k = p.k
    present = np.zeros((h.num_hyperedges, k), dtype=np.bool_)
    present[owner, p.assignment[h.pins]] = True
    weight = present.T.astype(np.int64) @ (present * h.edge_weight[:, None])
    pairs = [(int(weight[a, b]), a, b) for a in range(k) for b in range(a + 1, k) if weight[a, b] > 0]
    return pairs


def refine_kway(
    h: Hypergraph,
    p: Partition,
    config: RefineConfig,
    on_improvement: Callable[[Partition, int, int, int], None] | None = None,
) -> tuple[Partition, RefineStats]:
    """Refine all block pairs until a full round brings no improvement.

    Pairs are visited heaviest pair cut first; an improved pair reactivates
    its two blocks for the next round.  ``on_improvement(p, i, j, gain)`` is
    called after every applied refinement.
    """
    p = p.copy()
    stats = RefineStats()
    active = np.ones(p.k, dtype=np.bool_)
    for rnd in range(config.max_rounds):
        stats.rounds += 1
        pairs = sorted(active_pairs(h, p), key=lambda t: (-t[0], t[1], t[2]))
        touched = np.zeros(p.k, dtype=np.bool_)
        for _, i, j in pairs:
            if not (active[i] or active[j]):
                continue
            gain = refine_pair(h, p, i, j, config, _pair_seed(config.seed, rnd, i, j), stats)
            if gain is not None:
                stats.improvements += 1
                stats.total_gain += gain
                stats.gains.append(gain)
                touched[i] = touched[j] = True
                if on_improvement is not None:
                    on_improvement(p, i, j, gain)
        if not touched.any():
            break
        active = touched
    return p, stats


def greedy_initial_partition(h: Hypergraph, k: int, epsilon: float = 0.03, seed: int = 0) -> Partition:
    """Recursive bisection by randomized BFS growth."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > h.num_vertices:
        raise ValueError(f"k={k} exceeds the number of vertices ({h.num_vertices})")
    rng = np.random.default_rng(seed)
    assignment = np.zeros(h.num_vertices, dtype=np.int64)
    limit = max_block_weight(h.total_weight, k, epsilon)
    _bisect(h, np.arange(h.num_vertices), k, 0, assignment, rng, limit)
    return Partition(h, k, assignment)


def _bisect(h: Hypergraph, vertices: np.ndarray, k: int, first_block: int, out: np.ndarray, rng, limit: int) -> None:
    if k == 1:
        out[vertices] = first_block
        return
    k1 = k // 2
    k2 = k - k1
    w = h.vertex_weight
    total = int(w[vertices].sum())
    # aim for the proportional share, but leave both halves able to fit
    target = min(max(total * k1 / k, total - k2 * limit), k1 * limit)
    inside = np.zeros(h.num_vertices, dtype=np.bool_)
    inside[vertices] = True
    taken = np.zeros(h.num_vertices, dtype=np.bool_)
    grown, weight = [], 0
    remaining = set(vertices.tolist())
    cap = math.ceil(target)
    queue: deque[int] = deque()
    while (weight < target or len(grown) < k1) and len(remaining) > k2:
        if not queue:
            # vertices skipped as too heavy become available again
            taken[list(remaining)] = False
            fits = [v for v in sorted(remaining) if weight + w[v] <= cap or len(grown) < k1]
            if not fits:
                break
            start = int(rng.choice(fits))
            queue.append(start)
            taken[start] = True
        v = queue.popleft()
        if weight + w[v] > cap and len(grown) >= k1:
            continue
        grown.append(v)
        remaining.discard(v)
        weight += int(w[v])
        for e in h.edges_of(v).tolist():
            for u in rng.permutation(h.pins_of(e)).tolist():
                if inside[u] and not taken[u]:
                    taken[u] = True
                    queue.append(u)
    part1 = np.array(sorted(grown), dtype=np.int64)
    part2 = np.array(sorted(remaining), dtype=np.int64)
    _bisect(h, part1, k1, first_block, out, rng, limit)
    _bisect(h, part2, k2, first_block + k1, out, rng, limit)
