"""Weighted HyperFlowCutter: flow-based refinement for hypergraph partitions."""
from __future__ import annotations

from .dinic import compute_reachable, exhaust_flow, restart_from_piercing
from .flow_hypergraph import FlowHypergraph
from .hfc import HfcConfig, HfcResult, HyperFlowCutter, run_hfc
from .hmetis import parse_hmetis, parse_partition, read_hmetis, write_hmetis, write_partition
from .hypergraph import Hypergraph, Partition, connectivity_metric, imbalance, is_balanced, max_block_weight
from .isolated import IsolatedDP
from .refinement import RefineConfig, extract_flow_problem, greedy_initial_partition, refine_kway

__all__ = [
    "FlowHypergraph",
    "HfcConfig",
    "HfcResult",
    "Hypergraph",
    "HyperFlowCutter",
    "IsolatedDP",
    "Partition",
    "RefineConfig",
    "compute_reachable",
    "connectivity_metric",
    "exhaust_flow",
    "extract_flow_problem",
    "greedy_initial_partition",
    "imbalance",
    "is_balanced",
    "max_block_weight",
    "parse_hmetis",
    "parse_partition",
    "read_hmetis",
    "refine_kway",
    "restart_from_piercing",
    "run_hfc",
    "write_hmetis",
    "write_partition",
]
