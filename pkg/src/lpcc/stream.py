"""Stream-sort engine: two streaming stages plus a sorting pass per step.

The engine consumes a sorted stream of directed records and produces
the next sorted stream.  Stage one scans one group of records per
source vertex, learns the group label l(v) = min(v, first u), and
emits tagged records: the first edge symmetrizes when its target is
the group label, every later edge of a labeled group propagates the
label and re-emits itself tagged OLD.  A sorting pass groups NEW and
OLD copies of the same record, and stage two keeps one copy of every
record that was produced this step and not carried in from the last
one.  Each stage holds a constant number of records of mutable state,
so the whole step is two streaming passes plus the sort.

The run halts when a step's output stream equals its input stream;
that comparison rides along inside stage two, reading the input in
lockstep with the emitted output, so it costs no extra pass.
"""

from __future__ import annotations

import heapq
import struct
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .graph import Graph, LabelArray, to_initial_state
from .pram import default_max_steps
from .results import (
    ConvergenceError,
    InvariantError,
    RunHistory,
    StepStats,
    StreamRunResult,
)

OLD, NEW = 0, 1

TaggedEdge = tuple[int, int, int]

# Mutable records of lookahead state a single stage holds at once:
# stage one keeps the record in hand, stage two additionally holds one
# record of the previous stream for the fixed-point comparison.
STAGE1_STATE_RECORDS = 1
STAGE2_STATE_RECORDS = 2


class StreamOrderError(ValueError):
    """Input stream violated the sort order a stage relies on."""


@dataclass
class StreamState:
    """Cross-record state of the stage-one scan."""

    last_v: int | None = None
    l_v: int | None = None


@dataclass
class StageCounters:
    """Filled in by a stage while its generator is drained."""

    records_in: int = 0
    records_out: int = 0
    lp_count: int = 0
    sym_count: int = 0
    dups_removed: int = 0
    fixed_point: bool = False


def stage1_pass(
    records: Iterable[tuple[int, int]],
    state: StreamState | None = None,
    counters: StageCounters | None = None,
) -> Iterator[TaggedEdge]:
    """First stage: label propagation and symmetrization over one scan.

    ``records`` must be sorted ascending.  The first record of a group
    fixes the group label; it emits both symmetrized twins when its
    target is that label.  Later records of a group whose label is not
    the group vertex emit the propagated record tagged NEW plus the
    input record tagged OLD.  Streams with duplicate records (the
    no-dedup stress mode) are handled by branching every record on
    target-equals-label, which reduces to the first-edge rule on
    duplicate-free streams.
    """
    state = state if state is not None else StreamState()
    counters = counters if counters is not None else StageCounters()
    last_u: int | None = None
    for v, u in records:
        counters.records_in += 1
        if v == u:
            raise InvariantError(f"self loop ({v},{u}) in stream")
        if state.last_v is not None:
            if v < state.last_v or (v == state.last_v and last_u is not None and u < last_u):
                raise StreamOrderError(
                    f"stream not sorted at ({v},{u}) after ({state.last_v},{last_u})"
                )
        if v != state.last_v:
            state.last_v = v
            state.l_v = min(v, u)
        last_u = u
        if u == state.l_v:
            counters.sym_count += 1
            counters.records_out += 2
            yield (v, u, NEW)
            yield (u, v, NEW)
        elif v != state.l_v:
            counters.lp_count += 1
            counters.records_out += 2
            yield (u, state.l_v, NEW)
            yield (v, u, OLD)


def sort_pass(tagged: Iterable[TaggedEdge]) -> list[TaggedEdge]:
    """Canonical in-memory sort: OLD copies land before NEW copies."""
    return sorted(tagged)


def stage2_pass(
    tagged: Iterable[TaggedEdge],
    previous: Iterable[tuple[int, int]] | None = None,
    counters: StageCounters | None = None,
    dedup: bool = True,
) -> Iterator[tuple[int, int]]:
    """Second stage: duplicate elimination over a sorted tagged stream.

    A record group survives when it has a NEW copy and no OLD copy;
    survivors are emitted once.  When ``previous`` is given it must be
    the sorted input stream of this step; it is consumed in lockstep
    with the output and ``counters.fixed_point`` reports whether output
    and input were identical.  With ``dedup`` off every NEW record is
    passed through unchanged, which exposes the duplicate growth the
    tagging scheme exists to prevent.
    """
    counters = counters if counters is not None else StageCounters()
    prev_iter = iter(previous) if previous is not None else None
    matched = prev_iter is not None
    new_in = 0

    def _compare(pair: tuple[int, int]) -> None:
        nonlocal matched
        if prev_iter is None:
            return
        if next(prev_iter, None) != pair:
            matched = False

    pending: tuple[int, int] | None = None
    pending_old = False
    pending_new = False
    last_rec: TaggedEdge | None = None
    for rec in tagged:
        counters.records_in += 1
        v, u, tag = rec
        if last_rec is not None and rec < last_rec:
            raise StreamOrderError(f"tagged stream not sorted at {rec} after {last_rec}")
        last_rec = rec
        if tag == NEW:
            new_in += 1
            if not dedup:
                counters.records_out += 1
                _compare((v, u))
                yield (v, u)
                continue
        if not dedup:
            continue
        if (v, u) != pending:
            if pending is not None and pending_new and not pending_old:
                counters.records_out += 1
                _compare(pending)
                yield pending
            pending = (v, u)
            pending_old = False
            pending_new = False
        if tag == OLD:
            pending_old = True
        else:
            pending_new = True
    if dedup and pending is not None and pending_new and not pending_old:
        counters.records_out += 1
        _compare(pending)
        yield pending
    if prev_iter is not None and next(prev_iter, None) is not None:
        matched = False
    counters.dups_removed = new_in - counters.records_out if dedup else 0
    counters.fixed_point = matched


def labels_from_sorted_pairs(
    pairs: Iterable[tuple[int, int]], universe: np.ndarray
) -> LabelArray:
    """Read group labels l(v) = min(v, first u) off a sorted stream.

    Vertices of the universe that never appear as a source keep their
    own id, which covers isolated vertices and component minima whose
    groups carry only larger targets.
    """
    labels = LabelArray.identity(np.asarray(universe, dtype=np.int64))
    last_v: int | None = None
    collected: dict[int, int] = {}
    for v, u in pairs:
        if v != last_v:
            last_v = v
            collected[v] = min(v, u)
    if collected:
        ids = np.fromiter(collected.keys(), dtype=np.int64, count=len(collected))
        vals = np.fromiter(collected.values(), dtype=np.int64, count=len(collected))
        pos = np.searchsorted(labels.ids, ids)
        if np.any(pos >= len(labels.ids)) or np.any(labels.ids[np.minimum(pos, len(labels.ids) - 1)] != ids):
            raise ValueError("stream mentions a vertex outside the universe")
        labels.values[pos] = np.minimum(labels.values[pos], vals)
    return labels


_RECORD = struct.Struct("<qqB")


class MemoryBackend:
    """Streams are plain lists; sorting is one sorted() call."""

    def write_pairs(self, records: Iterable[tuple[int, int]]) -> list:
        return list(records)

    def read_pairs(self, handle: list) -> Iterator[tuple[int, int]]:
        return iter(handle)

    write_tagged = write_pairs
    read_tagged = read_pairs

    def sort_tagged(self, handle: list) -> list:
        return sorted(handle)

    def delete(self, handle: list) -> None:
        handle.clear()


class FileBackend:
    """Streams are flat files of fixed-width records; sorting spills.

    Records are little-endian (v, u, tag) packs of 17 bytes.  The sort
    reads bounded chunks, sorts each in memory, and merges the sorted
    chunk files, so stream size is bounded by disk, not RAM.
    """

    def __init__(self, workdir: str | Path | None = None, chunk_records: int = 1 << 16):
        if workdir is None:
            self._tmp = tempfile.TemporaryDirectory(prefix="lpcc-stream-")
            self._dir = Path(self._tmp.name)
        else:
            self._tmp = None
            self._dir = Path(workdir)
            self._dir.mkdir(parents=True, exist_ok=True)
        self._chunk_records = chunk_records
        self._serial = 0

    def _new_path(self, stem: str) -> Path:
        self._serial += 1
        return self._dir / f"{stem}-{self._serial:06d}.rec"

    def write_tagged(self, records: Iterable[TaggedEdge]) -> Path:
        path = self._new_path("tagged")
        with open(path, "wb") as handle:
            for v, u, tag in records:
                handle.write(_RECORD.pack(v, u, tag))
        return path

    def read_tagged(self, path: Path) -> Iterator[TaggedEdge]:
        with open(path, "rb") as handle:
            while True:
                blob = handle.read(_RECORD.size * 4096)
                if not blob:
                    return
                for off in range(0, len(blob), _RECORD.size):
                    yield _RECORD.unpack_from(blob, off)

    def write_pairs(self, records: Iterable[tuple[int, int]]) -> Path:
        return self.write_tagged((v, u, 0) for v, u in records)

    def read_pairs(self, path: Path) -> Iterator[tuple[int, int]]:
        return ((v, u) for v, u, _ in self.read_tagged(path))

    def sort_tagged(self, path: Path) -> Path:
        chunks: list[Path] = []
        buffer: list[TaggedEdge] = []
        for rec in self.read_tagged(path):
            buffer.append(rec)
            if len(buffer) >= self._chunk_records:
                buffer.sort()
                chunks.append(self.write_tagged(buffer))
                buffer = []
        if buffer or not chunks:
            buffer.sort()
            chunks.append(self.write_tagged(buffer))
        if len(chunks) == 1:
            return chunks[0]
        merged = self.write_tagged(
            heapq.merge(*[self.read_tagged(c) for c in chunks])
        )
        for c in chunks:
            self.delete(c)
        return merged

    def delete(self, path: Path) -> None:
        path.unlink(missing_ok=True)


def _make_backend(backend: str | object, workdir: str | Path | None):
    if backend == "memory":
        return MemoryBackend()
    if backend == "file":
        return FileBackend(workdir)
    if isinstance(backend, str):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def run_streamsort(
    graph: Graph,
    *,
    backend: str | object = "memory",
    max_steps: int | None = None,
    dedup: bool = True,
    record_history: bool = False,
    workdir: str | Path | None = None,
) -> StreamRunResult:
    """Run the stream-sort process on a graph until the stream is fixed.

    The pass ledger counts every traversal of a stream: two streaming
    passes per step (the two stages) plus one final pass that reads the
    labels off the converged stream.  Sorting passes are tracked apart:
    one to sort the initial records and one per step.
    """
    t_run = time.perf_counter()
    be = _make_backend(backend, workdir)
    if max_steps is None:
        max_steps = default_max_steps(graph.num_vertices)
    edges0, _ = to_initial_state(graph)
    if len(edges0):
        order = np.lexsort((edges0.dst, edges0.src))
        initial = list(zip(edges0.src[order].tolist(), edges0.dst[order].tolist()))
    else:
        initial = []
    sorting_passes = 1
    streaming_passes = 0
    current = be.write_pairs(initial)
    current_len = len(initial)

    history = RunHistory() if record_history else None
    if history is not None:
        history.edges.append(list(initial))

    per_step: list[StepStats] = []
    overshoot: list[tuple[int, int]] = []
    record_cap = 2 * graph.num_edges

    def _result(steps: int, labeling: LabelArray) -> StreamRunResult:
        return StreamRunResult(
            labeling=labeling,
            steps=steps,
            per_step=per_step,
            history=history,
            wall_seconds=time.perf_counter() - t_run,
            streaming_passes=streaming_passes,
            sorting_passes=sorting_passes,
            peak_state_records=max(STAGE1_STATE_RECORDS, STAGE2_STATE_RECORDS),
            dedup_overshoot=overshoot,
        )

    k = 0
    while True:
        k += 1
        if k > max_steps:
            labels = labels_from_sorted_pairs(be.read_pairs(current), graph.vertices)
            streaming_passes += 1
            be.delete(current)
            raise ConvergenceError(
                f"stream not fixed within {max_steps} steps",
                partial=_result(k - 1, labels),
            )
        t0 = time.perf_counter()
        c1 = StageCounters()
        tagged = be.write_tagged(stage1_pass(be.read_pairs(current), counters=c1))
        streaming_passes += 1
        tagged_sorted = be.sort_tagged(tagged)
        sorting_passes += 1
        if tagged_sorted is not tagged:
            be.delete(tagged)
        c2 = StageCounters()
        next_stream = be.write_pairs(
            stage2_pass(
                be.read_tagged(tagged_sorted),
                previous=be.read_pairs(current),
                counters=c2,
                dedup=dedup,
            )
        )
        streaming_passes += 1
        be.delete(tagged_sorted)
        per_step.append(
            StepStats(
                step=k,
                edges_in=current_len,
                edges_out=c2.records_out,
                lp_count=c1.lp_count,
                sym_count=c1.sym_count,
                dups_removed=c2.dups_removed,
                wall_ms=(time.perf_counter() - t0) * 1000.0,
            )
        )
        if dedup and c2.records_out > record_cap:
            overshoot.append((k, c2.records_out))
        if history is not None:
            history.edges.append(list(be.read_pairs(next_stream)))
        fixed = c2.fixed_point
        be.delete(current)
        current = next_stream
        current_len = c2.records_out
        if fixed:
            steps = k
            break

    labels = labels_from_sorted_pairs(be.read_pairs(current), graph.vertices)
    streaming_passes += 1
    be.delete(current)
    return _result(steps, labels)
