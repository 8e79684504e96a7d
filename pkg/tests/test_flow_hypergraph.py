from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whfc.flow_hypergraph import FlowHypergraph, FlowInvariantError


def single_edge(capacity: int, size: int = 4) -> FlowHypergraph:
    return FlowHypergraph(size, [list(range(size))], [capacity])


def loaded_edge() -> FlowHypergraph:
    """c=10, f=10, pin 0 receives 4, pin 1 sends 6, pin 2 sends 4, pin 3 receives 6."""
    fh = single_edge(10)
    fh.push(1, 0, 0, 4)
    fh.push(1, 0, 3, 2)
    fh.push(2, 0, 3, 4)
    return fh


def four_steps(delta: int, fu: int, fv: int, f: int) -> tuple[list[int], int, int, int]:
    """Reference split of a push into the four Lawler paths, written out step by step."""
    parts = []
    d = min(delta, max(-fu, 0), max(fv, 0))  # u_out -> e_o -> e_i -> v_in, cancels bridge flow
    f, fu, fv, delta = f - d, fu + d, fv - d, delta - d
    parts.append(d)
    d = min(delta, max(-fu, 0))  # u reroutes what it receives
    fu, fv, delta = fu + d, fv - d, delta - d
    parts.append(d)
    d = min(delta, max(fv, 0))  # v stops sending
    fu, fv, delta = fu + d, fv - d, delta - d
    parts.append(d)
    parts.append(delta)  # new flow over the bridge
    return parts, fu + delta, fv - delta, f + delta


def test_residual_examples():
    assert single_edge(10).residual_capacity(0, 0, 1) == 10
    fh = loaded_edge()
    assert (fh.hyperedge_flow(0), fh.pin_flow(0, 0), fh.pin_flow(1, 0)) == (10, -4, 6)
    assert fh.residual_capacity(0, 0, 1) == 10
    # pins 2 and 3 carry no reroutable flow in that direction
    assert fh.residual_capacity(3, 0, 0) == 6
    fh2 = single_edge(10)
    fh2.push(0, 0, 1, 10)
    assert fh2.residual_capacity(2, 0, 3) == 0


def test_fresh_push_goes_over_the_bridge():
    fh = single_edge(10, 2)
    fh.push(0, 0, 1, 5)
    assert (fh.hyperedge_flow(0), fh.pin_flow(0, 0), fh.pin_flow(1, 0)) == (5, 5, -5)


def test_four_step_trace():
    fh = loaded_edge()
    parts, fu, fv, f = four_steps(10, -4, 6, 10)
    assert parts == [4, 0, 2, 4]
    fh.push(0, 0, 1, 10)
    assert (fh.hyperedge_flow(0), fh.pin_flow(0, 0), fh.pin_flow(1, 0)) == (f, fu, fv) == (10, 6, -4)
    fh.audit(conservation=False)


def test_push_of_nineteen_units():
    # e = {u, v, w}: u receives 8, v sends 10, w receives 2
    fh = FlowHypergraph(3, [[0, 1, 2]], [20])
    fh.push(1, 0, 0, 8)
    fh.push(1, 0, 2, 2)
    assert fh.residual_capacity(0, 0, 1) == 28
    parts, fu, fv, f = four_steps(19, -8, 10, 10)
    assert sum(parts) == 19 and all(p >= 0 for p in parts)
    fh.push(0, 0, 1, 19)
    assert (fh.hyperedge_flow(0), fh.pin_flow(0, 0), fh.pin_flow(1, 0)) == (f, fu, fv)
    fh.audit(conservation=False)


def test_push_rejects_excess():
    fh = single_edge(3, 2)
    with pytest.raises(AssertionError):
        fh.push(0, 0, 1, 4)
    with pytest.raises(ValueError):
        fh.push(0, 0, 1, 0)


def test_scan_pins_examples():
    n = 100
    fh = FlowHypergraph(n + 1, [list(range(n)), [n - 1, n]], [3, 50])
    # saturate e0 with a single sending pin 7
    fh.push(7, 0, 9, 3)
    assert fh.scan_pins(0, 0) == [7]
    # a pin that receives flow can reroute it to anybody
    assert sorted(fh.scan_pins(0, 9)) == [v for v in range(n) if v != 9]
    # unsaturated hyperedge
    assert sorted(fh.scan_pins(1, n)) == [n - 1]


@st.composite
def edge_states(draw):
    """A single hyperedge driven into a random state by random valid pushes."""
    size = draw(st.integers(2, 7))
    cap = draw(st.integers(1, 30))
    fh = FlowHypergraph(size, [list(range(size))], [cap])
    for _ in range(draw(st.integers(0, 12))):
        u, v = draw(st.permutations(range(size)))[:2]
        r = fh.residual_capacity(u, 0, v)
        if r:
            fh.push(u, 0, v, draw(st.integers(1, r)))
    return fh


@settings(max_examples=300, deadline=None)
@given(edge_states())
def test_scan_pins_matches_residual(fh):
    fh.audit(conservation=False)
    size = len(fh.pins(0))
    for u in range(size):
        expected = sorted(v for v in range(size) if v != u and fh.residual_capacity(u, 0, v) > 0)
        assert sorted(fh.scan_pins(0, u)) == expected


@settings(max_examples=300, deadline=None)
@given(edge_states(), st.data())
def test_push_then_reverse_restores_state(fh, data):
    size = len(fh.pins(0))
    u, v = data.draw(st.permutations(range(size)))[:2]
    r = fh.residual_capacity(u, 0, v)
    if not r:
        return
    delta = data.draw(st.integers(1, r))
    before = fh.state()
    fu, fv, f = fh.pin_flow(u, 0), fh.pin_flow(v, 0), fh.hyperedge_flow(0)
    parts, eu, ev, ef = four_steps(delta, fu, fv, f)
    fh.push(u, 0, v, delta)
    fh.audit(conservation=False)
    assert sum(parts) == delta
    assert (fh.pin_flow(u, 0), fh.pin_flow(v, 0), fh.hyperedge_flow(0)) == (eu, ev, ef)
    assert fh.residual_capacity(v, 0, u) >= delta
    fh.push(v, 0, u, delta)
    fh.audit(conservation=False)
    after = fh.state()
    assert np.array_equal(before[0], after[0]) and np.array_equal(before[1], after[1])


def test_audit_detects_corruption():
    fh = loaded_edge()
    fh.audit(conservation=False)
    fh.arrays.flow[0] = 9
    with pytest.raises(FlowInvariantError):
        fh.audit(conservation=False)
    fh = loaded_edge()
    with pytest.raises(FlowInvariantError):
        fh.audit(conservation=True)


def test_terminals_and_flow_value():
    fh = FlowHypergraph(3, [[0, 1], [1, 2]], [4, 4], sources=[0], targets=[2])
    fh.push(0, 0, 1, 3)
    fh.push(1, 1, 2, 3)
    fh.audit()
    assert fh.flow_value() == 3
    with pytest.raises(ValueError):
        fh.add_terminal(0, 2)
    with pytest.raises(ValueError):
        FlowHypergraph(2, [[0, 1]], sources=[0], targets=[0])
    clone = fh.copy()
    fh.reset_flow()
    assert fh.flow_value() == 0 and clone.flow_value() == 3
