from __future__ import annotations

import math

import numpy as np
import pytest

from helpers import connected_hypergraph, planted_bisection
from whfc.dinic import exhaust_flow
from whfc.hfc import HfcResult, HfcStats
from whfc.hypergraph import Hypergraph, Partition, connectivity_metric, is_balanced, max_block_weight
from whfc.oracles import brute_force_bisection
from whfc.refinement import (
    RefineConfig,
    active_pairs,
    apply_refinement,
    extract_flow_problem,
    extraction_bounds,
    greedy_initial_partition,
    pair_cut_edges,
    refine_kway,
)


def mesh(rows: int, cols: int) -> Hypergraph:
    """Grid whose hyperedges are the rows and columns of 2x2 cells."""
    idx = lambda r, c: r * cols + c  # noqa: E731
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append([idx(r, c), idx(r, c + 1)])
            if r + 1 < rows:
                edges.append([idx(r, c), idx(r + 1, c)])
            if r + 1 < rows and c + 1 < cols:
                edges.append([idx(r, c), idx(r, c + 1), idx(r + 1, c), idx(r + 1, c + 1)])
    return Hypergraph.from_edges(rows * cols, edges)


def random_partition(h: Hypergraph, k: int, rng) -> Partition:
    a = np.arange(h.num_vertices) % k
    return Partition(h, k, rng.permutation(a))


def check_extraction(h: Hypergraph, p: Partition, ext) -> None:
    i, j = ext.blocks
    pair = set(np.flatnonzero((p.assignment == i) | (p.assignment == j)).tolist())
    mapped = [int(v) for v in ext.vertex_of if v >= 0]
    absorbed = ext.source_members.tolist() + ext.target_members.tolist()
    assert len(mapped) + len(absorbed) == len(pair)
    assert set(mapped) | set(absorbed) == pair
    assert all(p.assignment[v] == i for v in ext.source_members)
    assert all(p.assignment[v] == j for v in ext.target_members)
    fh = ext.fh
    for e in range(fh.num_hyperedges):
        tags = fh.terminal[fh.pins(e)].tolist()
        assert not (1 in tags and 2 in tags)
    # flow vertex weights are the sum of what they stand for
    w = fh.vertex_weight
    assert int(w.sum()) == int(h.vertex_weight[list(pair)].sum())
    assert ext.cut_weight + ext.fixed_cut == int(h.edge_weight[pair_cut_edges(h, p, i, j)].sum())


def test_whole_pair_is_the_flow_problem():
    rng = np.random.default_rng(1)
    h = connected_hypergraph(rng, 20, 15)
    p = random_partition(h, 3, rng)
    ext = extract_flow_problem(h, p, 0, 2, "whole", seed=3)
    check_extraction(h, p, ext)
    assert ext.num_vertices == int(((p.assignment == 0) | (p.assignment == 2)).sum())
    assert not ext.source_members.size and not ext.target_members.size


def test_zero_bound_collapses_side():
    # hfc mode allows a fifth of the block weight; 4 unit vertices give 0.8
    h = Hypergraph.from_edges(8, [[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [6, 7]])
    p = Partition(h, 2, [0, 0, 0, 0, 1, 1, 1, 1])
    assert extraction_bounds(h, p, 0, 1, "hfc", 0.03) == (0.8, 0.8)
    ext = extract_flow_problem(h, p, 0, 1, "hfc")
    check_extraction(h, p, ext)
    assert sorted(ext.source_members.tolist()) == [0, 1, 2, 3]
    assert sorted(ext.target_members.tolist()) == [4, 5, 6, 7]


def test_no_shared_cut_means_no_problem():
    h = Hypergraph.from_edges(4, [[0, 1], [2, 3]])
    assert extract_flow_problem(h, Partition(h, 2, [0, 0, 1, 1]), 0, 1) is None


def test_star_bounds_are_larger_with_large_epsilon():
    rng = np.random.default_rng(2)
    for trial in range(30):
        h = connected_hypergraph(rng, 60, 50)
        p = random_partition(h, 4, rng)
        for i, j in [(0, 1), (2, 3)]:
            if not pair_cut_edges(h, p, i, j).size:
                continue
            hfc = extract_flow_problem(h, p, i, j, "hfc", seed=trial, epsilon=0.5)
            star = extract_flow_problem(h, p, i, j, "hfc-star", seed=trial, epsilon=0.5)
            b_hfc, b_star = hfc.bounds, star.bounds
            wi, wj = p.block_weight[i], p.block_weight[j]
            assert b_hfc == (wi / 5, wj / 5)
            cap = (1 + 16 * 0.5) * math.ceil(h.total_weight / 4)
            assert b_star == pytest.approx((cap - wj, cap - wi))
            assert star.num_vertices >= hfc.num_vertices
            check_extraction(h, p, hfc)
            check_extraction(h, p, star)


def test_first_flow_never_exceeds_original_cut():
    rng = np.random.default_rng(3)
    for trial in range(60):
        h = connected_hypergraph(rng, 40, 40, max_ew=5)
        p = random_partition(h, 3, rng)
        for mode in ("hfc", "hfc-star", "whole"):
            ext = extract_flow_problem(h, p, 0, 1, mode, seed=trial)
            if ext is None:
                continue
            check_extraction(h, p, ext)
            assert exhaust_flow(ext.fh) <= ext.cut_weight


def test_infeasible_result_changes_nothing():
    h = Hypergraph.from_edges(4, [[0, 1], [1, 2], [2, 3]])
    p = Partition(h, 2, [0, 0, 1, 1])
    ext = extract_flow_problem(h, p, 0, 1, "whole")
    before = p.copy()
    assert apply_refinement(p, ext, HfcResult(None, 9, HfcStats())) == 0
    assert p == before


def test_equal_cut_with_better_balance_is_accepted():
    h = Hypergraph.from_edges(4, [[0, 1], [1, 2], [2, 3]])
    p = Partition(h, 2, [0, 0, 0, 1])
    q, stats = refine_kway(h, p, RefineConfig(k=2, epsilon=0.5, mode="whole"))
    assert connectivity_metric(h, q) == 1
    assert sorted(q.block_weight.tolist()) == [2, 2]
    assert stats.improvements >= 1 and stats.total_gain == 0


def test_optimal_bisection_is_kept():
    h = Hypergraph.from_edges(8, [[0, 1, 2], [1, 2, 3], [0, 3], [4, 5, 6], [5, 6, 7], [4, 7], [3, 4]])
    p = Partition(h, 2, [0, 0, 0, 0, 1, 1, 1, 1])
    q, stats = refine_kway(h, p, RefineConfig(k=2, epsilon=0.0, mode="whole"))
    assert connectivity_metric(h, q) == 1 and stats.total_gain == 0


@pytest.mark.parametrize("mode", ["hfc", "hfc-star", "whole"])
def test_refinement_invariants(mode):
    rng = np.random.default_rng(5)
    for trial in range(25):
        n = int(rng.integers(10, 80))
        k = int(rng.integers(2, 5))
        h = connected_hypergraph(rng, n, n, max_vw=3)
        p = greedy_initial_partition(h, k, 0.03, seed=trial)
        c0 = connectivity_metric(h, p)
        balanced = is_balanced(h, p, 0.03)
        q, stats = refine_kway(h, p, RefineConfig(k=k, mode=mode, seed=trial))
        c1 = connectivity_metric(h, q)
        assert c1 <= c0
        assert c0 - c1 == stats.total_gain == sum(stats.gains)
        if balanced:
            assert is_balanced(h, q, 0.03)
        assert connectivity_metric(h, p) == c0  # input untouched


def test_refinement_is_deterministic():
    rng = np.random.default_rng(6)
    h = connected_hypergraph(rng, 60, 60)
    p = greedy_initial_partition(h, 3, 0.03, seed=1)
    a, _ = refine_kway(h, p, RefineConfig(k=3, seed=9))
    b, _ = refine_kway(h, p, RefineConfig(k=3, seed=9))
    assert a == b


def test_mesh_k4():
    h = mesh(8, 8)
    p = greedy_initial_partition(h, 4, 0.03, seed=0)
    assert is_balanced(h, p, 0.03)
    q, _ = refine_kway(h, p, RefineConfig(k=4))
    assert connectivity_metric(h, q) <= connectivity_metric(h, p)
    assert is_balanced(h, q, 0.03)


def test_planted_bisection_is_found():
    rng = np.random.default_rng(8)
    hits = 0
    for trial in range(20):
        h = planted_bisection(rng, 8, crossing=2)
        p = random_partition(h, 2, rng)
        q, _ = refine_kway(h, p, RefineConfig(k=2, mode="whole", seed=trial))
        hits += connectivity_metric(h, q) == brute_force_bisection(h, 0.03)
    assert hits >= 15


def test_active_pairs_share_cut():
    h = Hypergraph.from_edges(6, [[0, 1], [2, 3], [4, 5], [1, 2]])
    p = Partition(h, 3, [0, 0, 1, 1, 2, 2])
    pairs = active_pairs(h, p)
    assert [(i, j) for _, i, j in pairs] == [(0, 1)]


# -- greedy initial partition ----------------------------------------------------


def test_greedy_rejects_bad_k():
    h = Hypergraph.from_edges(3, [[0, 1, 2]])
    with pytest.raises(ValueError):
        greedy_initial_partition(h, 1)
    with pytest.raises(ValueError):
        greedy_initial_partition(h, 4)


def test_greedy_bisection_of_unit_vertices():
    rng = np.random.default_rng(9)
    for trial in range(20):
        n = 2 * int(rng.integers(2, 30))
        h = connected_hypergraph(rng, n, n)
        p = greedy_initial_partition(h, 2, 0.03, seed=trial)
        assert abs(int(p.block_weight[0]) - int(p.block_weight[1])) <= 1


def test_greedy_k4_on_16_vertices():
    h = mesh(4, 4)
    for seed in range(10):
        p = greedy_initial_partition(h, 4, 0.03, seed=seed)
        assert p.block_weight.max() <= math.ceil(1.03 * 4)
        assert (p.block_weight > 0).all()


def test_greedy_respects_bound_with_weights():
    rng = np.random.default_rng(10)
    for trial in range(30):
        h = connected_hypergraph(rng, 50, 40, max_vw=3)
        k = int(rng.integers(2, 6))
        p = greedy_initial_partition(h, k, 0.1, seed=trial)
        slack = int(h.vertex_weight.max())
        assert p.block_weight.max() <= max_block_weight(h.total_weight, k, 0.1) + slack
