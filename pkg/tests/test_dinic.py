from __future__ import annotations

import json
import os
import subprocess
import sys
import textwrap

import numpy as np

from helpers import cut_weight, random_flow_hypergraph, random_flow_instance
from whfc.dinic import compute_reachable, exhaust_flow, has_augmenting_path, restart_from_piercing
from whfc.flow_hypergraph import FREE, SOURCE, TARGET, FlowHypergraph
from whfc.oracles import build_lawler_network, lawler_network_of, max_flow


def test_single_bottleneck():
    fh = FlowHypergraph(2, [[0, 1]], [7], sources=[0], targets=[1])
    assert exhaust_flow(fh) == 7


def test_series_bottleneck():
    fh = FlowHypergraph(3, [[0, 1], [1, 2]], [5, 3], sources=[0], targets=[2])
    assert exhaust_flow(fh) == 3
    fh.audit()


def test_zero_flow_reachability():
    # terminals are not adjacent and nothing is saturated
    fh = FlowHypergraph(5, [[0, 1, 2], [2, 3], [3, 4]], [1, 1, 1], sources=[0], targets=[4])
    sr = compute_reachable(fh, "source")
    assert sr.reachable.tolist() == [True, True, True, True, False]
    assert sr.cut_edges.size == 0


def test_source_side_stops_between_terminal_and_cut():
    # s -5- a -1- b -5- t: only the middle hyperedge saturates
    fh = FlowHypergraph(4, [[0, 1], [1, 2], [2, 3]], [5, 1, 5], sources=[0], targets=[3])
    assert exhaust_flow(fh) == 1
    sr = compute_reachable(fh, "source")
    tr = compute_reachable(fh, "target")
    assert sr.reachable.tolist() == [True, True, False, False]
    assert tr.reachable.tolist() == [False, False, True, True]
    assert sr.cut_edges.tolist() == tr.cut_edges.tolist() == [1]


def test_flow_matches_oracle_and_cut_duality():
    rng = np.random.default_rng(2024)
    for _ in range(300):
        n, edges, caps, s, t = random_flow_instance(rng)
        fh = FlowHypergraph(n, edges, caps, sources=s, targets=t)
        value = exhaust_flow(fh)
        fh.audit()
        assert value == fh.flow_value()
        assert value == max_flow(build_lawler_network(n, edges, caps, s, t)).value
        assert not has_augmenting_path(fh)
        sr = compute_reachable(fh, "source")
        tr = compute_reachable(fh, "target")
        assert sr.cut_weight == tr.cut_weight == value
        assert not (sr.reachable & tr.reachable).any()
        assert cut_weight(edges, caps, sr.reachable) == value
        assert cut_weight(edges, caps, ~tr.reachable) == value


def test_second_call_adds_nothing():
    rng = np.random.default_rng(5)
    for _ in range(50):
        fh = random_flow_hypergraph(rng)
        exhaust_flow(fh)
        assert exhaust_flow(fh) == 0


def test_large_capacities_use_scaling():
    fh = FlowHypergraph(4, [[0, 1, 2], [1, 3], [2, 3]], [10**12, 3 * 10**11, 5 * 10**11], sources=[0], targets=[3])
    assert exhaust_flow(fh) == 8 * 10**11
    fh.audit()


def _same_reach(a: FlowHypergraph, b: FlowHypergraph) -> bool:
    return all(
        np.array_equal(compute_reachable(a, side).reachable, compute_reachable(b, side).reachable)
        for side in ("source", "target")
    )


def test_restart_matches_scratch():
    rng = np.random.default_rng(77)
    for _ in range(150):
        fh = random_flow_hypergraph(rng)
        total = exhaust_flow(fh)
        for _ in range(int(rng.integers(1, 6))):
            free = np.flatnonzero(fh.terminal == FREE)
            if not free.size:
                break
            v = int(rng.choice(free))
            side = SOURCE if rng.random() < 0.5 else TARGET
            fh.add_terminal(v, side)
            total += restart_from_piercing(fh, v)
            fh.audit()
            fresh = FlowHypergraph(
                fh.num_vertices,
                [sorted(fh.pins(e).tolist()) for e in range(fh.num_hyperedges)],
                fh.arrays.capacity,
                sources=fh.sources(),
                targets=fh.targets(),
            )
            assert exhaust_flow(fresh) == total == fh.flow_value()
            assert _same_reach(fh, fresh)


def test_piercing_outside_opposite_reach_adds_no_flow():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(200):
        fh = random_flow_hypergraph(rng)
        exhaust_flow(fh)
        tr = compute_reachable(fh, "target").reachable
        sr = compute_reachable(fh, "source").reachable
        safe = np.flatnonzero((fh.terminal == FREE) & ~tr)
        risky = np.flatnonzero((fh.terminal == FREE) & tr)
        if safe.size:
            g = fh.copy()
            g.add_terminal(int(safe[0]), SOURCE)
            assert restart_from_piercing(g, int(safe[0])) == 0
            checked += 1
        if risky.size and sr.any():
            # a target-reachable vertex turned source opens a path of positive residual capacity
            g = fh.copy()
            g.add_terminal(int(risky[0]), SOURCE)
            net = lawler_network_of(g)
            assert restart_from_piercing(g, int(risky[0])) >= 1
            assert g.flow_value() == max_flow(net).value
    assert checked > 100


def test_on_push_hook_sees_every_push():
    rng = np.random.default_rng(3)
    fh = random_flow_hypergraph(rng)
    moved = []
    value = exhaust_flow(fh, on_push=lambda f, e, iu, iv, d: moved.append(d))
    assert value == 0 or moved
    fh2 = fh.copy()
    fh2.reset_flow()
    assert exhaust_flow(fh2) == value


SCRIPT = textwrap.dedent(
    """
    import json, sys
    import numpy as np
    sys.path.insert(0, sys.argv[1])
    from helpers import random_flow_instance
    from whfc._jit import NUMBA_ENABLED
    from whfc.dinic import compute_reachable, exhaust_flow
    from whfc.flow_hypergraph import FlowHypergraph
    rng = np.random.default_rng(99)
    out = []
    for _ in range(40):
        n, edges, caps, s, t = random_flow_instance(rng)
        fh = FlowHypergraph(n, edges, caps, sources=s, targets=t)
        out.append([exhaust_flow(fh), np.flatnonzero(compute_reachable(fh, "source").reachable).tolist()])
    print(json.dumps({"numba": NUMBA_ENABLED, "out": out}))
    """
)


def _run_backend(flag: str) -> dict:
    env = dict(os.environ, WHFC_DISABLE_NUMBA=flag)
    tests_dir = os.path.dirname(os.path.abspath(__file__))
    res = subprocess.run([sys.executable, "-c", SCRIPT, tests_dir], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def test_compiled_and_pure_backends_agree():
    pure = _run_backend("1")
    fast = _run_backend("0")
    assert pure["numba"] is False
    assert pure["out"] == fast["out"]
