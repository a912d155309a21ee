"""Shared-memory engine: per-step directed-edge rewriting with min-combine.

One step scans the current edge multiset once.  For a record (v, u)
with label map L:

* if u != L[v], the record propagates: emit (u, L[v]) and combine
  L[u] := min(L[u], L[v]);
* otherwise it symmetrizes: emit (u, v).

Both branches emit exactly one record, so a step maps 2m records to 2m
records.  The run halts after the first step whose propagation events
all had L[v] == v; at that point every label names the minimum vertex
of its component.

The hot path works on dense int64 arrays.  Vertex ids are used directly
as array indexes when the id range is close to the vertex count and are
compacted through a sorted lookup otherwise.  Edge records live in one
4m buffer whose two 2m halves swap reader and writer roles each step,
and the new labels of a step are min-combined into a separate array
(double buffering) unless eager mode is requested.
"""

from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .atomics import AtomicCounter
from .graph import EdgeMultiset, Graph, LabelArray, to_initial_state
from .results import (
    ConvergenceError,
    InvariantError,
    RunHistory,
    RunResult,
    StepStats,
)

# Compact ids into 0..n-1 when the raw id range is much larger than the
# vertex count; below this slack a dense array indexed by raw id wins.
_DENSE_SLACK = 4
_MIN_DENSE = 1024


@dataclass
class _Space:
    """Mapping between raw vertex ids and dense array cells."""

    ids: np.ndarray
    direct: bool
    size: int

    @classmethod
    def for_ids(cls, ids: np.ndarray) -> "_Space":
        if ids.shape[0] == 0:
            return cls(ids=ids, direct=True, size=0)
        span = int(ids[-1]) + 1
        if span <= max(_DENSE_SLACK * ids.shape[0], _MIN_DENSE):
            return cls(ids=ids, direct=True, size=span)
        return cls(ids=ids, direct=False, size=int(ids.shape[0]))

    def cells(self, raw: np.ndarray) -> np.ndarray:
        if self.direct:
            return raw
        return np.searchsorted(self.ids, raw)

    def raw(self, cells: np.ndarray) -> np.ndarray:
        if self.direct:
            return cells
        return self.ids[cells]

    def dense_identity(self) -> np.ndarray:
        if self.direct:
            return np.arange(self.size, dtype=np.int64)
        return self.ids.copy()


def default_max_steps(n: int) -> int:
    """Generous step cap: convergence needs O(log n) steps."""
    return 4 * (int(math.log2(max(n, 2))) + 8)


def lp_step(
    edges: EdgeMultiset, labels: LabelArray
) -> tuple[EdgeMultiset, LabelArray, StepStats]:
    """Apply one rewriting step to an explicit multiset and label map.

    This is the reference entry point for a single step over arbitrary
    (possibly sparse) vertex ids; the run loop below implements the same
    transition on its internal dense buffers.
    """
    if np.any(edges.src == edges.dst):
        raise InvariantError("self loop in edge multiset")
    s_pos = np.searchsorted(labels.ids, edges.src)
    d_pos = np.searchsorted(labels.ids, edges.dst)
    if edges.src.shape[0]:
        if np.any(s_pos >= len(labels.ids)) or np.any(labels.ids[np.minimum(s_pos, len(labels.ids) - 1)] != edges.src):
            raise ValueError("edge source outside label universe")
        if np.any(d_pos >= len(labels.ids)) or np.any(labels.ids[np.minimum(d_pos, len(labels.ids) - 1)] != edges.dst):
            raise ValueError("edge target outside label universe")
    t0 = time.perf_counter()
    lv = labels.values[s_pos]
    prop = edges.dst != lv
    out_src = edges.dst.copy()
    out_dst = np.where(prop, lv, edges.src)
    new_values = labels.values.copy()
    np.minimum.at(new_values, d_pos[prop], lv[prop])
    lp_count = int(np.count_nonzero(prop))
    stats = StepStats(
        step=edges.step,
        edges_in=len(edges),
        edges_out=int(out_src.shape[0]),
        lp_count=lp_count,
        sym_count=len(edges) - lp_count,
        label_changes=int(np.count_nonzero(prop & (lv != edges.src))),
        wall_ms=(time.perf_counter() - t0) * 1000.0,
    )
    return (
        EdgeMultiset(src=out_src, dst=out_dst, step=edges.step + 1),
        LabelArray(ids=labels.ids, values=new_values),
        stats,
    )


def _chunk_bounds(total: int, threads: int) -> list[tuple[int, int]]:
    if total == 0:
        return []
    pieces = max(1, min(threads * 4, total))
    size = -(-total // pieces)
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def run(
    graph: Graph,
    *,
    threads: int = 1,
    max_steps: int | None = None,
    eager_labels: bool = False,
    record_history: bool = False,
    record_labels: bool = False,
    shuffle_seed: int | None = None,
) -> RunResult:
    """Run the rewriting process on a graph until it halts.

    ``threads`` splits each step's scan into chunks handled by a pool;
    label updates min-combine through a shared array and output records
    land in blocks reserved off an atomic cursor, so the per-step edge
    multiset and all counters are the same for every thread count.
    ``eager_labels`` drops the label double buffer and lets a step read
    labels its own chunks already lowered; the final labeling is still
    correct but intermediate traces lose their determinism guarantee and
    step counts can move in either direction.  The zero-counter halting
    rule is only proven for buffered reads, so eager runs halt on two
    consecutive steps with no counted events and no label writes: such a
    step provably maps the record multiset to its exact reversal, and two
    in a row pin the system in a cycle that can never change labels again.
    ``shuffle_seed`` permutes the initial record order, which must not
    affect anything observable.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    t_run = time.perf_counter()
    edges0, labels0 = to_initial_state(graph)
    n = graph.num_vertices
    if max_steps is None:
        max_steps = default_max_steps(n)
    space = _Space.for_ids(graph.vertices)

    m2 = len(edges0)
    labels = space.dense_identity()
    labels[space.cells(labels0.ids)] = labels0.values
    # raw labels live in the dense array too, so compacted spaces store
    # raw label values at compacted positions
    buf_src = np.empty(2 * m2, dtype=np.int64)
    buf_dst = np.empty(2 * m2, dtype=np.int64)
    buf_src[:m2] = edges0.src
    buf_dst[:m2] = edges0.dst
    if shuffle_seed is not None and m2:
        order = np.random.default_rng(shuffle_seed).permutation(m2)
        buf_src[:m2] = buf_src[:m2][order]
        buf_dst[:m2] = buf_dst[:m2][order]

    history = RunHistory() if (record_history or record_labels) else None
    if history is not None:
        if record_history:
            history.edges.append((buf_src[:m2].copy(), buf_dst[:m2].copy()))
        history.labels.append(labels0.copy())

    def _extract(dense: np.ndarray) -> LabelArray:
        return LabelArray(ids=graph.vertices, values=dense[space.cells(graph.vertices)].copy())

    per_step: list[StepStats] = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    combine_lock = threading.Lock()
    last_label_change_step = 0
    steps = 0
    prev_quiet = False
    try:
        k = 0
        while True:
            k += 1
            if k > max_steps:
                partial = RunResult(
                    labeling=_extract(labels),
                    steps=k - 1,
                    per_step=per_step,
                    history=history,
                    wall_seconds=time.perf_counter() - t_run,
                )
                raise ConvergenceError(
                    f"no halt within {max_steps} steps", partial=partial
                )
            t0 = time.perf_counter()
            read_lo = ((k - 1) % 2) * m2
            write_lo = (k % 2) * m2
            if eager_labels:
                labels_read = labels_write = labels
                labels_before = labels.copy()
            else:
                labels_read = labels
                labels_write = labels.copy()
                labels_before = labels_read
            cursor = AtomicCounter(write_lo)

            def _work(lo: int, hi: int) -> tuple[int, int]:
                raw_s = buf_src[read_lo + lo : read_lo + hi]
                raw_d = buf_dst[read_lo + lo : read_lo + hi]
                s = space.cells(raw_s)
                d = space.cells(raw_d)
                lv = labels_read[s]
                prop = raw_d != lv
                out_dst = np.where(prop, lv, raw_s)
                with combine_lock:
                    np.minimum.at(labels_write, d[prop], lv[prop])
                base = cursor.reserve(hi - lo)
                buf_src[base : base + (hi - lo)] = raw_d
                buf_dst[base : base + (hi - lo)] = out_dst
                lp = int(np.count_nonzero(prop))
                changed = int(np.count_nonzero(prop & (lv != raw_s)))
                return lp, changed

            bounds = _chunk_bounds(m2, threads)
            if pool is None:
                results = [_work(lo, hi) for lo, hi in bounds]
            else:
                results = list(pool.map(lambda b: _work(*b), bounds))
            lp_count = sum(r[0] for r in results)
            label_changes = sum(r[1] for r in results)

            if cursor.value() != write_lo + m2:
                raise InvariantError("record count not conserved across a step")
            out_s = buf_src[write_lo : write_lo + m2]
            out_d = buf_dst[write_lo : write_lo + m2]
            if np.any(out_s == out_d):
                raise InvariantError("step emitted a self loop")
            if not eager_labels and np.any(labels_write > labels_read):
                raise InvariantError("label increased during a step")

            arrays_changed = not np.array_equal(labels_write, labels_before)
            if arrays_changed:
                last_label_change_step = k
            labels = labels_write

            per_step.append(
                StepStats(
                    step=k,
                    edges_in=m2,
                    edges_out=m2,
                    lp_count=lp_count,
                    sym_count=m2 - lp_count,
                    label_changes=label_changes,
                    wall_ms=(time.perf_counter() - t0) * 1000.0,
                )
            )
            if history is not None:
                if record_history:
                    history.edges.append((out_s.copy(), out_d.copy()))
                history.labels.append(_extract(labels))
            if eager_labels:
                quiet = label_changes == 0 and not arrays_changed
                if quiet and prev_quiet:
                    steps = k
                    break
                prev_quiet = quiet
            elif label_changes == 0:
                steps = k
                break
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    return RunResult(
        labeling=_extract(labels),
        steps=steps,
        per_step=per_step,
        labels_stable_step=last_label_change_step + 1 if last_label_change_step else 1,
        history=history,
        wall_seconds=time.perf_counter() - t_run,
    )
