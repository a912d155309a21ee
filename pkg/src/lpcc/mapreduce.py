"""MapReduce-round engine: two reduce rounds per rewriting step.

Maps are identities, so a step is two shuffle-reduce rounds.  The
first round groups the directed records by source and applies label
propagation and symmetrization to each group at once, tagging produced
records NEW and re-emitted input records OLD.  The second round groups
the tagged records by source and keeps one copy of every record that
has a NEW copy and no OLD copy.  Per-key value lists are sorted, which
puts OLD copies in front of NEW copies of the same record and lets
both reducers run with constant working state per key.

Emissions are independent per key, so distributing keys over more
reducers cannot change the merged, sorted round output; the engine
asserts nothing about scheduling and produces identical results for
any reducer count.  The run halts when a step's output pair list
equals its input.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Hashable, Iterable

from .graph import Graph, to_initial_state
from .pram import default_max_steps
from .results import (
    ConvergenceError,
    MapReduceRunResult,
    RoundLedger,
    RunHistory,
    StepStats,
)
from .stream import NEW, OLD, labels_from_sorted_pairs


def shuffle(pairs: Iterable[tuple[Hashable, object]]) -> dict:
    """Group (key, value) pairs by key and sort each value list."""
    groups: dict = {}
    for key, value in pairs:
        groups.setdefault(key, []).append(value)
    for values in groups.values():
        values.sort()
    return groups


def reduce1(v: int, values: list[int]) -> list[tuple[int, tuple[int, int]]]:
    """Label propagation and symmetrization for one source group.

    ``values`` holds the record targets of v, strictly ascending; the
    group label is the least of v and its targets.  A group whose label
    is v itself emits nothing.  Otherwise the label edge is emitted in
    both directions tagged NEW, and every other target gets the label
    propagated to it (NEW) while the input record rides along (OLD).
    """
    prev: int | None = None
    for u in values:
        if u == v:
            raise ValueError(f"key {v} appears among its own values")
        if prev is not None and u <= prev:
            raise ValueError(f"values of key {v} not strictly ascending at {u}")
        prev = u
    if not values:
        return []
    label = min(v, values[0])
    if v == label:
        return []
    out: list[tuple[int, tuple[int, int]]] = [
        (v, (label, NEW)),
        (label, (v, NEW)),
    ]
    for u in values:
        if u != label:
            out.append((u, (label, NEW)))
            out.append((v, (u, OLD)))
    return out


def reduce2(v: int, values: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Duplicate elimination for one target group.

    ``values`` holds (u, tag) entries sorted ascending, so OLD copies
    of a record precede NEW copies.  A record (v, u) is emitted once
    when some copy is NEW and none is OLD.
    """
    out: list[tuple[int, int]] = []
    prev: tuple[int, int] | None = None
    cur_u: int | None = None
    has_old = False
    has_new = False

    def _flush() -> None:
        if cur_u is not None and has_new and not has_old:
            out.append((v, cur_u))

    for entry in values:
        if prev is not None and entry < prev:
            raise ValueError(f"values of key {v} not sorted at {entry}")
        prev = entry
        u, tag = entry
        if u != cur_u:
            _flush()
            cur_u = u
            has_old = False
            has_new = False
        if tag == OLD:
            has_old = True
        else:
            has_new = True
    _flush()
    return out


def _execute(
    groups: dict,
    fn: Callable,
    reducers: int,
    pool: ThreadPoolExecutor | None,
) -> tuple[list, int]:
    """Run a reducer over every group; returns (emissions, max group)."""
    keys = sorted(groups)
    max_group = max((len(groups[k]) for k in keys), default=0)
    if pool is None or reducers <= 1 or len(keys) <= 1:
        out: list = []
        for key in keys:
            out.extend(fn(key, groups[key]))
        return out, max_group

    def _part(part_keys: list) -> list:
        collected: list = []
        for key in part_keys:
            collected.extend(fn(key, groups[key]))
        return collected

    partitions = [keys[i::reducers] for i in range(reducers)]
    out = []
    for chunk in pool.map(_part, partitions):
        out.extend(chunk)
    return out, max_group


def run_mapreduce(
    graph: Graph,
    *,
    reducers: int = 1,
    max_steps: int | None = None,
    record_history: bool = False,
) -> MapReduceRunResult:
    """Run the two-round process on a graph until the pair set is fixed."""
    if reducers < 1:
        raise ValueError("reducers must be >= 1")
    t_run = time.perf_counter()
    if max_steps is None:
        max_steps = default_max_steps(graph.num_vertices)
    edges0, _ = to_initial_state(graph)
    pairs = sorted(zip(edges0.src.tolist(), edges0.dst.tolist()))

    history = RunHistory() if record_history else None
    if history is not None:
        history.edges.append(list(pairs))

    per_step: list[StepStats] = []
    rounds: list[RoundLedger] = []
    overshoot: list[tuple[int, int]] = []
    record_cap = 2 * graph.num_edges
    pool = ThreadPoolExecutor(max_workers=reducers) if reducers > 1 else None

    def _result(steps: int) -> MapReduceRunResult:
        return MapReduceRunResult(
            labeling=labels_from_sorted_pairs(iter(pairs), graph.vertices),
            steps=steps,
            per_step=per_step,
            history=history,
            wall_seconds=time.perf_counter() - t_run,
            rounds=rounds,
            dedup_overshoot=overshoot,
        )

    try:
        k = 0
        while True:
            k += 1
            if k > max_steps:
                raise ConvergenceError(
                    f"pair set not fixed within {max_steps} steps",
                    partial=_result(k - 1),
                )
            t0 = time.perf_counter()
            groups1 = shuffle(pairs)
            sym_count = sum(
                1 for v, values in groups1.items() if values and min(v, values[0]) != v
            )
            emitted1, max_group1 = _execute(groups1, reduce1, reducers, pool)
            emitted1.sort()
            rounds.append(
                RoundLedger(
                    round=2 * k - 1,
                    phase="reduce1",
                    pairs_routed=len(pairs),
                    pairs_emitted=len(emitted1),
                    reducer_max_group=max_group1,
                )
            )
            groups2 = shuffle(emitted1)
            emitted2, max_group2 = _execute(groups2, reduce2, reducers, pool)
            new_pairs = sorted(emitted2)
            rounds.append(
                RoundLedger(
                    round=2 * k,
                    phase="reduce2",
                    pairs_routed=len(emitted1),
                    pairs_emitted=len(new_pairs),
                    reducer_max_group=max_group2,
                )
            )
            lp_count = (len(emitted1) - 2 * sym_count) // 2
            new_into_r2 = 2 * sym_count + lp_count
            per_step.append(
                StepStats(
                    step=k,
                    edges_in=len(pairs),
                    edges_out=len(new_pairs),
                    lp_count=lp_count,
                    sym_count=sym_count,
                    dups_removed=new_into_r2 - len(new_pairs),
                    comm_pairs=len(emitted1) + len(new_pairs),
                    wall_ms=(time.perf_counter() - t0) * 1000.0,
                )
            )
            if len(new_pairs) > record_cap:
                overshoot.append((k, len(new_pairs)))
            if history is not None:
                history.edges.append(list(new_pairs))
            fixed = new_pairs == pairs
            pairs = new_pairs
            if fixed:
                steps = k
                break
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    return _result(steps)
