"""Weighted HyperFlowCutter: incremental max flows until a balanced cut appears."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels as K
from .dinic import ReachabilitySets, compute_reachable, exhaust_flow, restart_from_piercing
from .flow_hypergraph import FREE, SOURCE, TARGET, FlowHypergraph
from .isolated import IsolatedDP


DEAD_END = "no piercing candidate left"


class HfcInvariantError(AssertionError):
    pass


@dataclass
class HfcConfig:
    max_source_weight: int
    max_target_weight: int
    cut_bound: int | None = None
    use_iso_dp: bool = True
    use_distance: bool = True
    use_mbc: bool = True
    mbc_repetitions: int = 7
    dp_table_limit: int = 10_000_000
    attempts: int = 8  # fresh starts after piercing runs into a dead end
    seed: int = 0


@dataclass
class Bipartition:
    source_block: np.ndarray
    cut_weight: int
    source_weight: int
    target_weight: int
    score: int  # max overshoot of a block over its bound; <= 0 means balanced


@dataclass
class HfcStats:
    flow_problems: int = 0
    pierce_steps: int = 0
    augmenting_pierces: int = 0
    fallback_pierces: int = 0
    dp_vertices: int = 0
    mbc_steps: int = 0
    mbc_improvements: int = 0
    attempts: int = 1
    cut_sequence: list[int] = field(default_factory=list)


@dataclass
class HfcResult:
    bipartition: Bipartition | None
    flow_value: int
    stats: HfcStats
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.bipartition is not None


class PiercingQueue:
    """Bucket queue of boundary vertices keyed by an integer rating.

    Entries that stopped being valid piercing candidates are dropped lazily
    when their bucket is inspected.
    """

    def __init__(self, n: int):
        self.buckets: dict[int, list[int]] = {}
        self.queued = np.zeros(n, dtype=np.bool_)

    def insert(self, v: int, rating: int) -> None:
        if not self.queued[v]:
            self.queued[v] = True
            self.buckets.setdefault(rating, []).append(v)

    def select(self, rng: np.random.Generator, valid, creates_path: np.ndarray, avoid_only: bool) -> tuple[int, bool] | None:
        """Uniform pick from the best bucket holding a vertex that keeps the
        flow maximal; without one, from the best non-empty bucket."""
        fallback = None
        for rating in sorted(self.buckets, reverse=True):
            bucket = self.buckets[rating]
            kept = [v for v in bucket if valid(v)]
            for v in bucket:
                if not valid(v):
                    self.queued[v] = False
            if not kept:
                del self.buckets[rating]
                continue
            self.buckets[rating] = kept
            avoiding = [v for v in kept if not creates_path[v]]
            if avoiding:
                return avoiding[int(rng.integers(len(avoiding)))], False
            if fallback is None:
                fallback = kept
        if fallback is None or avoid_only:
            return None
        return fallback[int(rng.integers(len(fallback)))], True


class HyperFlowCutter:
    """Driver state for one flow problem.

    ``distance`` is the BFS distance of a vertex from the original cut and
    ``origin`` the side it came from (0 source side, 1 target side, -1
    unknown).  A vertex is rated by its distance when pierced into its own
    side and by -1 when pierced into the opposite side.
    """

    def __init__(
        self,
        fh: FlowHypergraph,
        config: HfcConfig,
        distance: np.ndarray | None = None,
        origin: np.ndarray | None = None,
        on_flow: Callable[[HyperFlowCutter], None] | None = None,
    ):
        if not fh.sources().size or not fh.targets().size:
            raise ValueError("both terminal sets must be non-empty")
        n = fh.num_vertices
        self.fh = fh
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.on_flow = on_flow
        self.total_weight = int(fh.vertex_weight.sum())
        self._initial_terminal = fh.terminal.copy()

        self.rating = {SOURCE: np.zeros(n, dtype=np.int64), TARGET: np.zeros(n, dtype=np.int64)}
        if config.use_distance and distance is not None:
            distance = np.asarray(distance, dtype=np.int64)
            origin = np.full(n, -1) if origin is None else np.asarray(origin)
            for side, own in ((SOURCE, 0), (TARGET, 1)):
                r = np.where(origin == own, distance, -1)
                self.rating[side] = np.where(origin == -1, 0, r)
        self._scratch = np.empty(n, dtype=np.int64)
        self._setup()

    def _setup(self) -> None:
        """Bring the flow problem back to its initial terminals and zero flow."""
        fh = self.fh
        n, m = fh.num_vertices, fh.num_hyperedges
        fh.reset_flow()
        fh.terminal[:] = FREE
        self.stats = HfcStats()
        self.flow = 0
        self.best: Bipartition | None = None
        self.queues = {SOURCE: PiercingQueue(n), TARGET: PiercingQueue(n)}
        self.src_pins = np.zeros(m, dtype=np.int64)
        self.tgt_pins = np.zeros(m, dtype=np.int64)
        self.mixed = np.zeros(n, dtype=np.int64)
        self.isolated = np.zeros(n, dtype=np.int8)
        self._pending: list[int] = []
        self.dp = IsolatedDP(self.config.dp_table_limit) if self.config.use_iso_dp else None
        self.dp_frozen = False
        self.in_dp = np.zeros(n, dtype=np.bool_)

        self._mark_terminals(np.flatnonzero(self._initial_terminal == SOURCE), SOURCE)
        self._mark_terminals(np.flatnonzero(self._initial_terminal == TARGET), TARGET)
        degrees = np.diff(fh.arrays.vertex_ptr)
        lonely = np.flatnonzero((degrees == 0) & (fh.terminal == FREE))
        self.isolated[lonely] = 1
        self._pending.extend(lonely.tolist())

    # -- terminal bookkeeping -------------------------------------------------

    def _mark_terminals(self, vertices: np.ndarray, side: int) -> None:
        vertices = np.ascontiguousarray(vertices, dtype=np.int64)
        count = K.add_terminals(
            self.fh.arrays, vertices, side, self.src_pins, self.tgt_pins,
            self.mixed, self.isolated, self._scratch,
        )
        self._pending.extend(self._scratch[:count].tolist())

    def _absorb_isolated(self) -> None:
        pending, self._pending = self._pending, []
        if self.dp is None or self.dp_frozen:
            return
        w = self.fh.vertex_weight
        for v in pending:
            if self.fh.terminal[v] == FREE and self.dp.add(v, int(w[v])):
                self.in_dp[v] = True
                self.stats.dp_vertices += 1

    def _valid_candidate(self, v: int) -> bool:
        return self.fh.terminal[v] == FREE and not self.in_dp[v]

    def _grow(self, side: int, reach: ReachabilitySets) -> None:
        fa = self.fh.arrays
        new = np.flatnonzero(reach.reachable & (fa.terminal == FREE))
        if new.size:
            self._mark_terminals(new, side)
        queue, rating = self.queues[side], self.rating[side]
        for e in reach.cut_edges.tolist():
            for v in fa.pin_vertex[fa.edge_ptr[e] : fa.edge_ptr[e + 1]].tolist():
                if fa.terminal[v] == FREE and not self.in_dp[v]:
                    queue.insert(v, int(rating[v]))

    def _pierce(self, side: int, sr: ReachabilitySets, tr: ReachabilitySets, avoid_only: bool) -> tuple[int, int, bool] | None:
        """Grow a side to its reachable set and add one piercing vertex.

        Boundary vertices of the side's cut come first.  Without one, any
        free vertex is taken (disconnected flow problems), preferring one
        that does not create an augmenting path.  Candidates heavier than
        the room left below the side's bound are skipped, and when the
        requested side has none the other side is tried.
        Returns (vertex, side, creates_path).
        """
        sides = (side, TARGET if side == SOURCE else SOURCE)
        w = self.fh.vertex_weight
        for s in sides:
            own, opposite = (sr, tr) if s == SOURCE else (tr, sr)
            self._grow(s, own)
            # a terminal side above its bound can never become a block again
            bound = self.config.max_source_weight if s == SOURCE else self.config.max_target_weight
            room = bound - int(w[self.fh.terminal == s].sum())

            def valid(v: int) -> bool:
                return self._valid_candidate(v) and w[v] <= room

            picked = self.queues[s].select(self.rng, valid, opposite.reachable, avoid_only)
            if picked is None:
                picked = self._any_free(opposite, avoid_only, room)
            if picked is not None:
                v, creates = picked
                self._mark_terminals(np.array([v]), s)
                return v, s, creates
        return None

    def _any_free(self, opposite: ReachabilitySets, avoid_only: bool, room: int) -> tuple[int, bool] | None:
        w = self.fh.vertex_weight
        free = np.flatnonzero((self.fh.terminal == FREE) & ~self.in_dp & (w <= room))
        keep = free[~opposite.reachable[free]]
        pool = keep if keep.size or avoid_only else free
        if not pool.size and not avoid_only and self.dp is not None and len(self.dp):
            # only isolated vertices are left: give one up to the terminal
            pool = np.array([v for v in sorted(self.dp.vertices) if w[v] <= room], dtype=np.int64)
        if not pool.size:
            return None
        self.stats.fallback_pierces += 1
        v = int(pool[self.rng.integers(pool.size)])
        if self.in_dp[v]:
            self.dp = self.dp.without(v)
            self.in_dp[v] = False
        return v, bool(opposite.reachable[v])

    # -- balance ----------------------------------------------------------------

    def _dp_weight(self) -> int:
        return self.dp.total if self.dp is not None else 0

    def best_bipartition(self, sr: ReachabilitySets, tr: ReachabilitySets) -> Bipartition | None:
        """Most balanced feasible bipartition induced by either cut side.

        Isolated vertices tracked by the subset-sum table are split between
        the blocks to get as close to the balance optimum as possible.
        """
        cfg, w = self.config, self.fh.vertex_weight
        total, ls, lt = self.total_weight, cfg.max_source_weight, cfg.max_target_weight
        iso = self._dp_weight()
        best = None
        for kind, fixed in (("source", int(w[sr.reachable].sum())), ("target", total - int(w[tr.reachable].sum()) - iso)):
            lo, hi = total - lt - fixed, ls - fixed
            if iso:
                x = self.dp.best_sum(lo, hi, (total - lt + ls - 2 * fixed) / 2)
            else:
                x = 0 if lo <= 0 <= hi else None
            if x is None:
                continue
            ws = fixed + x
            score = max(ws - ls, total - ws - lt)
            if best is None or score < best[0]:
                best = (score, kind, x, ws)
        if best is None:
            return None
        score, kind, x, ws = best
        if kind == "source":
            block = sr.reachable.copy()
        else:
            block = ~tr.reachable & ~self.in_dp
        if x:
            block[self.dp.subset_for(x)] = True
        return Bipartition(block, self.flow, ws, total - ws, score)

    # -- main loop ----------------------------------------------------------------

    def run(self) -> HfcResult:
        """Run until a balanced cut appears.

        Weighted vertices can leave every remaining piercing choice too heavy
        for both sides even though a balanced nested cut existed for other
        choices; such dead ends start over from the initial terminals with
        the random stream moved on.
        """
        for attempt in range(max(1, self.config.attempts)):
            if attempt:
                self._setup()
            result = self._run_once()
            result.stats.attempts = attempt + 1
            if result.feasible or result.reason != DEAD_END:
                break
        return result

    def _run_once(self) -> HfcResult:
        fh, cfg = self.fh, self.config
        self.flow = exhaust_flow(fh)
        self.stats.flow_problems += 1
        while True:
            if self.on_flow is not None:
                self.on_flow(self)
            sr = compute_reachable(fh, "source")
            tr = compute_reachable(fh, "target")
            self.stats.cut_sequence.append(self.flow)
            if cfg.cut_bound is not None and self.flow > cfg.cut_bound:
                return self._finish(None, "flow exceeds the original cut")
            self._absorb_isolated()
            found = self.best_bipartition(sr, tr)
            if found is not None:
                self.best = found
                self.dp_frozen = True
                if cfg.use_mbc:
                    self._most_balanced_sweep(sr, tr)
                return self._finish(self.best, "")

            side = SOURCE if sr.weight(fh.vertex_weight) <= tr.weight(fh.vertex_weight) else TARGET
            picked = self._pierce(side, sr, tr, avoid_only=False)
            if picked is None:
                return self._finish(None, DEAD_END)
            v, _, creates = picked
            self.stats.pierce_steps += 1
            if creates:
                self.stats.augmenting_pierces += 1
                self.flow += restart_from_piercing(fh, v)
                self.stats.flow_problems += 1
            if self.stats.pierce_steps > fh.num_vertices:
                raise HfcInvariantError("more piercing steps than vertices")

    def _finish(self, best: Bipartition | None, reason: str) -> HfcResult:
        return HfcResult(best, self.flow, self.stats, reason)

    # -- most balanced cut ---------------------------------------------------------

    def _snapshot(self):
        return (
            self.fh.terminal.copy(), self.src_pins.copy(), self.tgt_pins.copy(),
            self.mixed.copy(), self.isolated.copy(), copy.deepcopy(self.queues),
        )

    def _restore(self, snap) -> None:
        terminal, src, tgt, mixed, isolated, queues = snap
        self.fh.terminal[:] = terminal
        self.src_pins[:] = src
        self.tgt_pins[:] = tgt
        self.mixed[:] = mixed
        self.isolated[:] = isolated
        self.queues = copy.deepcopy(queues)
        self._pending = []

    def _most_balanced_sweep(self, sr0: ReachabilitySets, tr0: ReachabilitySets) -> None:
        """Keep piercing without creating augmenting paths; every visited
        state is a cut of the same weight, keep the most balanced one."""
        w = self.fh.vertex_weight
        snap = self._snapshot()
        for rep in range(self.config.mbc_repetitions):
            if rep:
                self._restore(snap)
            sr, tr = sr0, tr0
            while True:
                side = SOURCE if sr.weight(w) <= tr.weight(w) else TARGET
                picked = self._pierce(side, sr, tr, avoid_only=True)
                if picked is None:
                    break
                _, s, _ = picked
                self.stats.mbc_steps += 1
                if s == SOURCE:
                    sr = compute_reachable(self.fh, "source")
                else:
                    tr = compute_reachable(self.fh, "target")
                found = self.best_bipartition(sr, tr)
                if found is not None and found.score < self.best.score:
                    self.best = found
                    self.stats.mbc_improvements += 1
        self._pending = []


def run_hfc(
    fh: FlowHypergraph,
    config: HfcConfig,
    distance: np.ndarray | None = None,
    origin: np.ndarray | None = None,
    on_flow: Callable[[HyperFlowCutter], None] | None = None,
) -> HfcResult:
    return HyperFlowCutter(fh, config, distance, origin, on_flow).run()
