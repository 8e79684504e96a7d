"""Command-line front end: load, partition or refine, verify, report."""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .flow_hypergraph import FlowInvariantError
from .hfc import HfcInvariantError
from .hmetis import ParseError, parse_partition, read_hmetis, write_partition
from .hypergraph import Hypergraph, Partition, connectivity_metric, imbalance, is_balanced
from .refinement import MODES, RefineConfig, greedy_initial_partition, refine_kway

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE_K = 4
EXIT_IMBALANCED_INPUT = 5
EXIT_INVARIANT = 6


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="whfc", description="Flow-based k-way hypergraph partition refinement.")
    ap.add_argument("--hypergraph", required=True, help="hMetis hypergraph file")
    ap.add_argument("-k", type=int, required=True, help="number of blocks")
    ap.add_argument("-e", "--epsilon", type=float, default=0.03, help="allowed imbalance (default 0.03)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=[m for m in MODES if m != "whole"], default="hfc")
    ap.add_argument("--input-partition", help="start from this partition instead of a greedy one")
    ap.add_argument("--output-partition", help="write the refined partition here")
    ap.add_argument("--stats", help="append a JSON line with the run report here")
    ap.add_argument("--no-iso-dp", action="store_true", help="disable the isolated-vertex subset-sum table")
    ap.add_argument("--no-distance", action="store_true", help="disable distance-based piercing")
    ap.add_argument("--no-mbc", action="store_true", help="disable the most-balanced-cut sweep")
    ap.add_argument("--mbc-repetitions", type=int, default=7)
    ap.add_argument("--max-rounds", type=int, default=100)
    ap.add_argument(
        "--repair-tolerance", type=float, default=0.1,
        help="extra imbalance tolerated in an input partition (default 0.1)",
    )
    ap.add_argument("--timings", action="store_true", help="include wall-clock times in the report")
    return ap


def _load(args) -> tuple[Hypergraph, Partition]:
    try:
        h = read_hmetis(args.hypergraph)
    except ParseError as exc:
        raise CliError(EXIT_PARSE, f"{args.hypergraph}: {exc}") from exc
    except OSError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    if args.k < 2 or args.k > h.num_vertices:
        raise CliError(EXIT_INFEASIBLE_K, f"k={args.k} is infeasible for {h.num_vertices} vertices")
    if args.input_partition is None:
        return h, greedy_initial_partition(h, args.k, args.epsilon, args.seed)
    try:
        p = parse_partition(Path(args.input_partition), h, args.k)
    except ParseError as exc:
        raise CliError(EXIT_PARSE, f"{args.input_partition}: {exc}") from exc
    except OSError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    if float(imbalance(h, p)) > args.epsilon + args.repair_tolerance:
        raise CliError(EXIT_IMBALANCED_INPUT, "input partition is too imbalanced to repair")
    return h, p


def run(args) -> dict:
    clock = time.perf_counter()
    h, p = _load(args)
    loaded = time.perf_counter()
    config = RefineConfig(
        k=args.k,
        epsilon=args.epsilon,
        mode=args.mode,
        seed=args.seed,
        use_iso_dp=not args.no_iso_dp,
        use_distance=not args.no_distance,
        use_mbc=not args.no_mbc,
        mbc_repetitions=args.mbc_repetitions,
        max_rounds=args.max_rounds,
    )
    initial_cut = connectivity_metric(h, p)
    initial_balanced = is_balanced(h, p, args.epsilon)
    q, stats = refine_kway(h, p, config)
    refined = time.perf_counter()

    text = write_partition(q)
    # the report is checked against the written file, not the in-memory state
    final = parse_partition(text, h, args.k)
    final_cut = connectivity_metric(h, final)
    if final_cut > initial_cut or initial_cut - final_cut != stats.total_gain:
        raise CliError(EXIT_INVARIANT, "connectivity bookkeeping does not match recomputation")
    if initial_balanced and not is_balanced(h, final, args.epsilon):
        raise CliError(EXIT_INVARIANT, "refinement broke the balance constraint")
    if args.output_partition:
        Path(args.output_partition).write_text(text)

    sizes = stats.flow_problem_sizes
    report = {
        "hypergraph": args.hypergraph,
        "input_partition": args.input_partition,
        "num_vertices": h.num_vertices,
        "num_hyperedges": h.num_hyperedges,
        "k": args.k,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "mode": args.mode,
        "iso_dp": config.use_iso_dp,
        "distance": config.use_distance,
        "mbc": config.use_mbc,
        "mbc_repetitions": config.mbc_repetitions,
        "initial_connectivity": initial_cut,
        "final_connectivity": final_cut,
        "initial_imbalance": str(imbalance(h, p)),
        "final_imbalance": str(imbalance(h, final)),
        "balanced": is_balanced(h, final, args.epsilon),
        "rounds": stats.rounds,
        "hfc_runs": stats.hfc_runs,
        "flow_problems": stats.flow_problems,
        "pierce_steps": stats.pierce_steps,
        "dp_activations": stats.dp_vertices,
        "mbc_improvements": stats.mbc_improvements,
        "improvements": stats.improvements,
        "flow_problem_vertices_total": sum(sizes),
        "flow_problem_vertices_max": max(sizes, default=0),
    }
    if args.timings:
        report["time_load_s"] = loaded - clock
        report["time_refine_s"] = refined - loaded
        report["time_total_s"] = time.perf_counter() - clock
    return report


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = run(args)
    except CliError as exc:
        print(f"whfc: {exc}", file=sys.stderr)
        return exc.code
    except (FlowInvariantError, HfcInvariantError, AssertionError) as exc:
        print(f"whfc: internal invariant failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    line = json.dumps(report, sort_keys=True)
    if args.stats:
        with open(args.stats, "a") as fh:
            fh.write(line + "\n")
    print(
        f"connectivity {report['initial_connectivity']} -> {report['final_connectivity']}, "
        f"imbalance {float(Fraction(report['final_imbalance'])):.4f}, balanced={report['balanced']}"
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
