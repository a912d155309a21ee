"""Run results, per-step statistics, and the stats CSV format.

All three engines report through the same row shape so their outputs
can be diffed column by column.  Columns an engine has no figure for
are written as zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .graph import LabelArray

STATS_FIELDS = (
    "step",
    "edges_in",
    "edges_out",
    "lp_count",
    "sym_count",
    "label_changes",
    "dups_removed",
    "comm_pairs",
    "wall_ms",
)

STATS_HEADER = ",".join(STATS_FIELDS)


@dataclass
class StepStats:
    """Counters for one rewriting step."""

    step: int
    edges_in: int
    edges_out: int
    lp_count: int
    sym_count: int
    label_changes: int = 0
    dups_removed: int = 0
    comm_pairs: int = 0
    wall_ms: float = 0.0

    def as_row(self) -> str:
        return (
            f"{self.step},{self.edges_in},{self.edges_out},{self.lp_count},"
            f"{self.sym_count},{self.label_changes},{self.dups_removed},"
            f"{self.comm_pairs},{self.wall_ms:.3f}"
        )


def write_stats(per_step: Sequence[StepStats], sink: str | Path | IO[str]) -> None:
    """Write the per-step counter table as CSV with a fixed header."""
    def _emit(handle: IO[str]) -> None:
        handle.write(STATS_HEADER + "\n")
        for row in per_step:
            handle.write(row.as_row() + "\n")

    if hasattr(sink, "write"):
        _emit(sink)  # type: ignore[arg-type]
    else:
        with open(sink, "w", encoding="utf-8") as handle:
            _emit(handle)


@dataclass
class RunHistory:
    """Optional per-step snapshots for property checks.

    ``edges[k]`` holds the multiset at the start of step k+1 (so index 0
    is the initial expansion).  Entries are either lists of (src, dst)
    tuples or a pair of numpy arrays; ``edge_pairs`` normalizes.
    ``labels[k]`` is the label map after k steps (index 0 is initial).
    """

    edges: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    def edge_pairs(self, k: int) -> list[tuple[int, int]]:
        entry = self.edges[k]
        if isinstance(entry, tuple):
            src, dst = entry
            return sorted(zip(src.tolist(), dst.tolist()))
        return sorted(entry)

    def num_steps_recorded(self) -> int:
        return len(self.edges)


@dataclass
class RunResult:
    """Outcome of one engine run."""

    labeling: LabelArray
    steps: int
    per_step: list[StepStats]
    labels_stable_step: int | None = None
    history: RunHistory | None = None
    wall_seconds: float = 0.0

    @property
    def num_components(self) -> int:
        return int(np.unique(self.labeling.values).shape[0])


@dataclass
class StreamRunResult(RunResult):
    """Adds the pass ledger of the stream engine."""

    streaming_passes: int = 0
    sorting_passes: int = 0
    peak_state_records: int = 0
    # Steps whose deduplicated output exceeded 2m records, as
    # (step, records) pairs.  Deduplication keeps streams near 2m but
    # cycles and some permuted paths transiently overshoot by a few
    # percent; runs flag this instead of hiding it.
    dedup_overshoot: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class RoundLedger:
    """Communication accounting for one shuffle round."""

    round: int
    phase: str
    pairs_routed: int
    pairs_emitted: int
    reducer_max_group: int


@dataclass
class MapReduceRunResult(RunResult):
    """Adds round-level communication accounting."""

    rounds: list[RoundLedger] = field(default_factory=list)
    # Same contract as StreamRunResult.dedup_overshoot.
    dedup_overshoot: list[tuple[int, int]] = field(default_factory=list)

    @property
    def total_pairs_emitted(self) -> int:
        return sum(r.pairs_emitted for r in self.rounds)


class ConvergenceError(RuntimeError):
    """Raised when a run hits its step cap before the halting test fires."""

    def __init__(self, message: str, partial: RunResult | None = None):
        super().__init__(message)
        self.partial = partial


class InvariantError(RuntimeError):
    """An internal invariant (loop-freedom, conservation) was violated."""
