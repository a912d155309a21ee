"""Deterministic connected components via minimum-label edge propagation.

Three engines share one step semantics: a shared-memory engine over
dense arrays, a stream-sort engine with constant per-pass state, and a
two-round MapReduce-style engine.  A union-find oracle and a family of
property checkers validate their output and their per-step behavior.
"""

from .graph import (
    EdgeListParseError,
    EdgeMultiset,
    Graph,
    LabelArray,
    generate_gnp,
    generate_seq_path,
    generate_shuffled_path,
    generate_star_pair,
    load_edge_list,
    parse_gen_spec,
    read_labels,
    to_initial_state,
    write_edge_list,
    write_labels,
)
from .results import (
    ConvergenceError,
    InvariantError,
    MapReduceRunResult,
    RoundLedger,
    RunHistory,
    RunResult,
    StepStats,
    StreamRunResult,
    write_stats,
)
from .atomics import AtomicCell, AtomicCounter, min_combine
from .pram import lp_step, run
from .stream import (
    StageCounters,
    StreamOrderError,
    StreamState,
    run_streamsort,
    sort_pass,
    stage1_pass,
    stage2_pass,
)
from .mapreduce import reduce1, reduce2, run_mapreduce, shuffle
from .oracle import (
    CheckFailure,
    DuplicationReport,
    assert_same_partition,
    check_fib_profile,
    check_connectivity_preserved,
    check_step_bounds,
    duplication_stress,
    gap_at,
    gap_sequence,
    oracle_components,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicCell",
    "AtomicCounter",
    "CheckFailure",
    "ConvergenceError",
    "DuplicationReport",
    "EdgeListParseError",
    "EdgeMultiset",
    "Graph",
    "InvariantError",
    "LabelArray",
    "MapReduceRunResult",
    "RoundLedger",
    "RunHistory",
    "RunResult",
    "StageCounters",
    "StepStats",
    "StreamOrderError",
    "StreamRunResult",
    "StreamState",
    "assert_same_partition",
    "check_connectivity_preserved",
    "check_fib_profile",
    "check_step_bounds",
    "duplication_stress",
    "gap_at",
    "gap_sequence",
    "generate_gnp",
    "generate_seq_path",
    "generate_shuffled_path",
    "generate_star_pair",
    "load_edge_list",
    "lp_step",
    "min_combine",
    "oracle_components",
    "parse_gen_spec",
    "read_labels",
    "reduce1",
    "reduce2",
    "run",
    "run_mapreduce",
    "run_streamsort",
    "shuffle",
    "sort_pass",
    "stage1_pass",
    "stage2_pass",
    "to_initial_state",
    "write_edge_list",
    "write_labels",
    "write_stats",
]
