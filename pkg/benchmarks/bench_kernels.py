"""Time the flow kernels compiled with numba against the plain Python fallback.

The fallback is selected by WHFC_DISABLE_NUMBA at import time, so each
backend runs in its own subprocess on the same seeded instances.

    python benchmarks/bench_kernels.py --sizes 200 1000 4000 --repeats 3
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def instance(n: int, seed: int):
    rng = np.random.default_rng(seed)
    m = 2 * n
    edges = [rng.choice(n, size=int(rng.integers(2, 7)), replace=False).tolist() for _ in range(m)]
    caps = rng.integers(1, 21, m)
    perm = rng.permutation(n)
    k = max(1, n // 20)
    return edges, caps, perm[:k].tolist(), perm[k : 2 * k].tolist()


def worker(sizes: list[int], repeats: int) -> dict:
    from whfc._jit import NUMBA_ENABLED
    from whfc.dinic import compute_reachable, exhaust_flow
    from whfc.flow_hypergraph import FlowHypergraph

    # warm-up also triggers compilation (or loads the cache)
    edges, caps, s, t = instance(50, 0)
    exhaust_flow(FlowHypergraph(50, edges, caps, sources=s, targets=t))
    rows = []
    for n in sizes:
        edges, caps, s, t = instance(n, n)
        best, flow = float("inf"), None
        for _ in range(repeats):
            fh = FlowHypergraph(n, edges, caps, sources=s, targets=t)
            start = time.perf_counter()
            flow = exhaust_flow(fh)
            compute_reachable(fh, "source")
            compute_reachable(fh, "target")
            best = min(best, time.perf_counter() - start)
        rows.append({"n": n, "flow": int(flow), "seconds": best})
    return {"numba": NUMBA_ENABLED, "rows": rows}


def run_backend(disable: bool, sizes: list[int], repeats: int) -> dict:
    env = dict(os.environ)
    env["WHFC_DISABLE_NUMBA"] = "1" if disable else "0"
    cmd = [sys.executable, __file__, "--worker", "--repeats", str(repeats), "--sizes", *map(str, sizes)]
    out = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 4000])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(worker(args.sizes, args.repeats)))
        return 0

    fast = run_backend(False, args.sizes, args.repeats)
    slow = run_backend(True, args.sizes, args.repeats)
    print(f"{'n':>7} {'flow':>8} {'numba s':>10} {'python s':>10} {'speedup':>8}")
    for a, b in zip(fast["rows"], slow["rows"]):
        if a["flow"] != b["flow"]:
            print(f"backends disagree at n={a['n']}: {a['flow']} vs {b['flow']}", file=sys.stderr)
            return 1
        print(f"{a['n']:>7} {a['flow']:>8} {a['seconds']:>10.4f} {b['seconds']:>10.4f} {b['seconds'] / a['seconds']:>8.1f}")
    if not fast["numba"]:
        print("note: numba is not available, both columns ran the Python fallback")
    return 0


if __name__ == "__main__":
    sys.exit(main())
