"""Hot loops over the flow hypergraph arrays.

Every kernel takes a :class:`FlowArrays` bundle and mutates it in place.  A
search runs in one of two orientations selected by ``sign``: ``+1`` follows
residual capacity from the source side towards the target side, ``-1``
follows it backwards (from the target side towards the source side).  In the
backward orientation the roles of flow-sending and flow-receiving pins swap,
so the code reads pin flows as ``sign * pin_flow``.

Terminal tags: 0 free, 1 source, 2 target.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._jit import jit

FREE = 0
SOURCE = 1
TARGET = 2

_BIG = np.int64(1) << np.int64(62)


class FlowArrays(NamedTuple):
    edge_ptr: np.ndarray
    pin_vertex: np.ndarray  # per pin slot
    pin_flow: np.ndarray  # per pin slot
    slot_inc: np.ndarray  # pin slot -> incidence index
    recv_end: np.ndarray  # per hyperedge: end of the receiving subrange
    send_begin: np.ndarray  # per hyperedge: start of the sending subrange
    capacity: np.ndarray
    flow: np.ndarray
    vertex_ptr: np.ndarray
    inc_edge: np.ndarray  # per incidence
    inc_slot: np.ndarray  # incidence index -> current pin slot
    vertex_weight: np.ndarray
    terminal: np.ndarray


@jit
def _swap_slots(fa, a, b):
    if a == b:
        return
    t = fa.pin_vertex[a]
    fa.pin_vertex[a] = fa.pin_vertex[b]
    fa.pin_vertex[b] = t
    t = fa.pin_flow[a]
    fa.pin_flow[a] = fa.pin_flow[b]
    fa.pin_flow[b] = t
    t = fa.slot_inc[a]
    fa.slot_inc[a] = fa.slot_inc[b]
    fa.slot_inc[b] = t
    fa.inc_slot[fa.slot_inc[a]] = a
    fa.inc_slot[fa.slot_inc[b]] = b


@jit
def _relocate(fa, e, inc, old, new):
    # Pins of e are laid out as [receiving | neutral | sending].
    if old < 0 and new >= 0:
        last = fa.recv_end[e] - 1
        _swap_slots(fa, fa.inc_slot[inc], last)
        fa.recv_end[e] = last
        old = 0
    elif old > 0 and new <= 0:
        first = fa.send_begin[e]
        _swap_slots(fa, fa.inc_slot[inc], first)
        fa.send_begin[e] = first + 1
        old = 0
    if old == 0:
        if new > 0:
            b = fa.send_begin[e] - 1
            _swap_slots(fa, fa.inc_slot[inc], b)
            fa.send_begin[e] = b
        elif new < 0:
            b = fa.recv_end[e]
            _swap_slots(fa, fa.inc_slot[inc], b)
            fa.recv_end[e] = b + 1


@jit
def residual(fa, e, inc_u, inc_v):
    fu = fa.pin_flow[fa.inc_slot[inc_u]]
    fv = fa.pin_flow[fa.inc_slot[inc_v]]
    return fa.capacity[e] - fa.flow[e] + max(-fu, 0) + max(fv, 0)


@jit
def push(fa, e, inc_u, inc_v, delta):
    """Move ``delta`` units from pin ``inc_u`` through ``e`` to pin ``inc_v``.

    The four partial pushes run in a fixed order: first cancel flow that
    ``u`` receives against flow ``v`` sends (bridge flow decreases), then
    reroute what ``u`` receives, then what ``v`` sends, and only then use
    free bridge capacity.
    """
    su = fa.inc_slot[inc_u]
    sv = fa.inc_slot[inc_v]
    fu0 = fa.pin_flow[su]
    fv0 = fa.pin_flow[sv]
    fu = fu0
    fv = fv0
    f = fa.flow[e]

    d = min(delta, max(-fu, 0), max(fv, 0))
    f -= d
    fu += d
    fv -= d
    delta -= d

    d = min(delta, max(-fu, 0))
    fu += d
    fv -= d
    delta -= d

    d = min(delta, max(fv, 0))
    fu += d
    fv -= d
    delta -= d

    f += delta
    fu += delta
    fv -= delta
    assert f <= fa.capacity[e], "push exceeds residual capacity"

    fa.flow[e] = f
    fa.pin_flow[su] = fu
    fa.pin_flow[sv] = fv
    _relocate(fa, e, inc_u, fu0, fu)
    _relocate(fa, e, inc_v, fv0, fv)


@jit
def _sending_range(fa, e, sign):
    if sign > 0:
        return fa.send_begin[e], fa.edge_ptr[e + 1]
    return fa.edge_ptr[e], fa.recv_end[e]


@jit
def level_bfs(fa, sign, scale, seeds, src_tag, dst_tag, explore_all, dist, queue):
    """Hop distances in the residual network restricted to capacity >= scale.

    The search runs over the implicit Lawler network: node ``v < n`` is a
    vertex, ``n + 2e`` the entry node and ``n + 2e + 1`` the exit node of
    hyperedge ``e`` (in the backward orientation entry and exit swap roles).
    Arcs: vertex -> entry always, vertex -> exit if the vertex receives
    flow, entry -> exit on free bridge capacity, exit -> entry on bridge
    flow, entry -> sending pins, exit -> every pin.

    Returns the level of the first reached ``dst_tag`` vertex, or -1.  With
    ``explore_all`` the search skips ``dst_tag`` vertices instead of stopping
    at them and labels everything reachable.
    """
    n = fa.vertex_ptr.shape[0] - 1
    dist[:] = -1
    tail = 0
    for s in seeds:
        if dist[s] == -1:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    head = 0
    target_level = -1
    while head < tail:
        x = queue[head]
        head += 1
        d = dist[x]
        if target_level >= 0 and d >= target_level:
            break
        if x < n:
            for i in range(fa.vertex_ptr[x], fa.vertex_ptr[x + 1]):
                a = n + 2 * fa.inc_edge[i]
                if dist[a] == -1:
                    dist[a] = d + 1
                    queue[tail] = a
                    tail += 1
                if dist[a + 1] == -1 and -sign * fa.pin_flow[fa.inc_slot[i]] >= scale:
                    dist[a + 1] = d + 1
                    queue[tail] = a + 1
                    tail += 1
            continue
        e = (x - n) >> 1
        entry = ((x - n) & 1) == 0
        if entry:
            other = x + 1
            ok = fa.capacity[e] - fa.flow[e] >= scale
            lo, hi = _sending_range(fa, e, sign)
        else:
            other = x - 1
            ok = fa.flow[e] >= scale
            lo = fa.edge_ptr[e]
            hi = fa.edge_ptr[e + 1]
        if ok and dist[other] == -1:
            dist[other] = d + 1
            queue[tail] = other
            tail += 1
        for pos in range(lo, hi):
            v = fa.pin_vertex[pos]
            if dist[v] != -1:
                continue
            t = fa.terminal[v]
            if t == src_tag or (explore_all and t == dst_tag):
                continue
            if entry and sign * fa.pin_flow[pos] < scale:
                continue
            dist[v] = d + 1
            if t == dst_tag:
                if target_level < 0:
                    target_level = d + 1
            else:
                queue[tail] = v
                tail += 1
    return target_level


@jit
def _admissible_pin(fa, sign, scale, dist, dst_tag, target_level, entry, pos, level):
    v = fa.pin_vertex[pos]
    if dist[v] != level:
        return False
    if level >= target_level and fa.terminal[v] != dst_tag:
        return False
    return not entry or sign * fa.pin_flow[pos] >= scale


@jit
def find_path(fa, sign, scale, roots, dst_tag, dist, target_level, cursor,
              path_node, path_inc, path_e, path_inc_u, path_inc_v, path_route, state):
    """Depth-first search for one augmenting path in the level graph.

    Cursors and dead nodes (``dist = -2``) persist across calls within a
    phase; the current root index lives in ``state[0]``.  The path is
    returned as hyperedge hops ``(path_e, path_inc_u, path_inc_v)``;
    ``path_route`` is 0 when a hop passes both nodes of its hyperedge, 1 for
    the entry node only and 2 for the exit node only.  Returns the number of
    hops, 0 once the phase is blocked.
    """
    n = fa.vertex_ptr.shape[0] - 1
    while state[0] < roots.shape[0]:
        root = roots[state[0]]
        if dist[root] != 0:
            state[0] += 1
            continue
        plen = 0
        path_node[0] = root
        while True:
            x = path_node[plen]
            if plen > 0 and x < n and fa.terminal[x] == dst_tag:
                return _hops(fa, n, plen, path_node, path_inc, path_e, path_inc_u, path_inc_v, path_route)
            level = dist[x] + 1
            y = -1
            if x < n:
                begin = fa.vertex_ptr[x]
                stop = 2 * (fa.vertex_ptr[x + 1] - begin)
                while cursor[x] < stop:
                    c = cursor[x]
                    i = begin + (c >> 1)
                    node = n + 2 * fa.inc_edge[i] + (c & 1)
                    if dist[node] == level and level < target_level:
                        if (c & 1) == 0 or -sign * fa.pin_flow[fa.inc_slot[i]] >= scale:
                            y = node
                            path_inc[plen] = i
                            break
                    cursor[x] += 1
            else:
                e = (x - n) >> 1
                entry = ((x - n) & 1) == 0
                base = fa.edge_ptr[e]
                if cursor[x] == 0:
                    other = x + 1 if entry else x - 1
                    ok = fa.capacity[e] - fa.flow[e] >= scale if entry else fa.flow[e] >= scale
                    if ok and dist[other] == level and level < target_level:
                        y = other
                    else:
                        cursor[x] = 1
                if y < 0:
                    if entry:
                        lo, hi = _sending_range(fa, e, sign)
                    else:
                        lo = base
                        hi = fa.edge_ptr[e + 1]
                    pos = max(base + cursor[x] - 1, lo)
                    while pos < hi:
                        if _admissible_pin(fa, sign, scale, dist, dst_tag, target_level, entry, pos, level):
                            y = fa.pin_vertex[pos]
                            path_inc[plen] = fa.slot_inc[pos]
                            break
                        pos += 1
                    cursor[x] = pos - base + 1
            if y >= 0:
                plen += 1
                path_node[plen] = y
            else:
                dist[x] = -2
                if plen == 0:
                    break
                plen -= 1
        state[0] += 1
    return 0


@jit
def _hops(fa, n, plen, path_node, path_inc, path_e, path_inc_u, path_inc_v, path_route):
    hops = 0
    k = 0
    while k < plen:
        # path_node[k] is a vertex; one or two hyperedge nodes follow
        x1 = path_node[k + 1]
        e = (x1 - n) >> 1
        path_e[hops] = e
        path_inc_u[hops] = path_inc[k]
        if path_node[k + 2] >= n:
            path_route[hops] = 0
            path_inc_v[hops] = path_inc[k + 2]
            k += 3
        else:
            path_route[hops] = 1 if ((x1 - n) & 1) == 0 else 2
            path_inc_v[hops] = path_inc[k + 1]
            k += 2
        hops += 1
    return hops


@jit
def path_bottleneck(fa, sign, plen, path_e, path_inc_u, path_inc_v, path_route, seen):
    """Largest amount that can be pushed hop by hop along the path.

    A hyperedge can occur twice on a path, once through each of its nodes.
    Such hops are limited to their node's own arc so that the first push
    leaves the bridge alone and cannot shrink the second hop's residual.
    """
    for k in range(plen):
        seen[path_e[k]] += 1
    b = _BIG
    for k in range(plen):
        e = path_e[k]
        gu = sign * fa.pin_flow[fa.inc_slot[path_inc_u[k]]]
        gv = sign * fa.pin_flow[fa.inc_slot[path_inc_v[k]]]
        if seen[e] > 1:
            r = gv if path_route[k] == 1 else -gu
        else:
            r = fa.capacity[e] - fa.flow[e] + max(-gu, 0) + max(gv, 0)
        if r < b:
            b = r
    for k in range(plen):
        seen[path_e[k]] = 0
    return b


@jit
def push_step(fa, sign, e, inc_u, inc_v, delta):
    # A backward-orientation step u -> v carries real flow from v to u.
    if sign > 0:
        push(fa, e, inc_u, inc_v, delta)
    else:
        push(fa, e, inc_v, inc_u, delta)


@jit
def blocking_flow(fa, sign, scale, roots, dst_tag, dist, target_level, cursor, path_node,
                  path_inc, path_e, path_inc_u, path_inc_v, path_route, seen, state):
    cursor[:] = 0
    state[0] = 0
    total = 0
    while True:
        hops = find_path(fa, sign, scale, roots, dst_tag, dist, target_level, cursor,
                         path_node, path_inc, path_e, path_inc_u, path_inc_v, path_route, state)
        if hops == 0:
            return total
        b = path_bottleneck(fa, sign, hops, path_e, path_inc_u, path_inc_v, path_route, seen)
        for k in range(hops):
            push_step(fa, sign, path_e[k], path_inc_u[k], path_inc_v[k], b)
        total += b


@jit
def add_terminals(fa, vertices, tag, src_pins, tgt_pins, mixed, isolated, out):
    """Mark vertices as terminals and report vertices that became isolated.

    A free vertex is isolated once every incident hyperedge has pins on both
    terminal sides.
    """
    for v in vertices:
        fa.terminal[v] = tag
    count = 0
    for v in vertices:
        for i in range(fa.vertex_ptr[v], fa.vertex_ptr[v + 1]):
            e = fa.inc_edge[i]
            was_mixed = src_pins[e] > 0 and tgt_pins[e] > 0
            if tag == SOURCE:
                src_pins[e] += 1
            else:
                tgt_pins[e] += 1
            if not was_mixed and src_pins[e] > 0 and tgt_pins[e] > 0:
                for pos in range(fa.edge_ptr[e], fa.edge_ptr[e + 1]):
                    w = fa.pin_vertex[pos]
                    mixed[w] += 1
                    if (
                        fa.terminal[w] == FREE
                        and isolated[w] == 0
                        and mixed[w] == fa.vertex_ptr[w + 1] - fa.vertex_ptr[w]
                    ):
                        isolated[w] = 1
                        out[count] = w
                        count += 1
    return count


@jit
def subset_sum_insert(table, parent, top, weight, item, out):
    """0/1 knapsack step: every reachable x <= top also makes x + weight reachable."""
    count = 0
    for x in range(top, -1, -1):
        if table[x] and not table[x + weight]:
            table[x + weight] = True
            parent[x + weight] = item
            out[count] = x + weight
            count += 1
    return count
