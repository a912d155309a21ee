"""Ground-truth components and property checkers.

The oracle computes component labelings by union-find, which shares no
machinery with the engines, and the checkers encode the structural
facts the engines are expected to reproduce: minimum-label partitions,
the Fibonacci-gap label profile on sequential paths, step-count bounds
per graph family, connectivity preservation of intermediate states,
and the duplicate growth that appears when deduplication is disabled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, LabelArray, generate_seq_path
from .results import ConvergenceError, RunHistory
from . import pram as _pram
from . import stream as _stream

PHI = (1.0 + math.sqrt(5.0)) / 2.0


class CheckFailure(AssertionError):
    """A property checker found a violation."""


def gap_sequence(count: int) -> list[int]:
    """First ``count`` label gaps on a sequential path: 2, 3, 5, 8, ...

    Consecutive gaps sum like Fibonacci numbers; gap k is what every
    vertex far enough from the path start subtracts from its own id
    after k steps.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    gaps: list[int] = []
    a, b = 2, 3
    for _ in range(count):
        gaps.append(a)
        a, b = b, a + b
    return gaps


def gap_at(k: int) -> int:
    """Gap value after k steps (k >= 1)."""
    if k < 1:
        raise ValueError("step index must be >= 1")
    return gap_sequence(k)[-1]


def _union_find_labels(universe: np.ndarray, pairs: Iterable[tuple[int, int]]) -> LabelArray:
    """Minimum-id component labels from an explicit edge list."""
    ids = np.asarray(universe, dtype=np.int64)
    index = {int(v): i for i, v in enumerate(ids)}
    parent = list(range(len(ids)))

    def find(x: int) -> int:
        # path halving
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        try:
            ru, rv = find(index[int(u)]), find(index[int(v)])
        except KeyError as exc:
            raise ValueError(f"edge endpoint {exc.args[0]} outside universe") from None
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)

    mins = ids.copy()
    for i in range(len(ids)):
        r = find(i)
        if ids[i] < mins[r]:
            mins[r] = ids[i]
    values = np.array([mins[find(i)] for i in range(len(ids))], dtype=np.int64)
    return LabelArray(ids=ids, values=values)


def oracle_components(graph: Graph) -> LabelArray:
    """Component labeling by union-find; labels are component minima."""
    return _union_find_labels(graph.vertices, graph.edge_pairs())


def assert_same_partition(actual: LabelArray, expected: LabelArray) -> None:
    """Require two labelings to agree vertex by vertex.

    Both sides label components by their minimum vertex, so agreement
    of the maps is the partition check.  Raises ValueError when the
    universes differ and CheckFailure listing up to 100 mismatches.
    """
    if not np.array_equal(actual.ids, expected.ids):
        raise ValueError("label universes differ")
    if np.array_equal(actual.values, expected.values):
        return
    bad = np.flatnonzero(actual.values != expected.values)
    lines = [
        f"  vertex {int(actual.ids[i])}: got {int(actual.values[i])}, "
        f"expected {int(expected.values[i])}"
        for i in bad[:100]
    ]
    more = f"\n  ... and {bad.size - 100} more" if bad.size > 100 else ""
    raise CheckFailure(
        f"labelings disagree on {bad.size} of {len(actual.ids)} vertices:\n"
        + "\n".join(lines)
        + more
    )


def check_fib_profile(n: int, k: int, labels: LabelArray) -> None:
    """Check the gap profile on the sequential path 1..n after k steps.

    Every vertex v with v - 1 >= gap(k) must carry label v - gap(k);
    every closer vertex must have reached label 1.
    """
    gap = gap_at(k)
    ids = np.arange(1, n + 1, dtype=np.int64)
    if not np.array_equal(labels.ids, ids):
        raise ValueError("labels are not over the path universe 1..n")
    expected = np.where(ids - 1 >= gap, ids - gap, 1)
    if np.array_equal(labels.values, expected):
        return
    i = int(np.flatnonzero(labels.values != expected)[0])
    raise CheckFailure(
        f"gap profile violated after {k} steps (gap {gap}): vertex {int(ids[i])} "
        f"has label {int(labels.values[i])}, expected {int(expected[i])}"
    )


def check_step_bounds(graph_kind: str, n: int, observed_steps: int) -> float:
    """Check a step count against the bound for a graph family.

    Families: ``four_path`` and ``star_pair`` settle within 3 steps,
    ``seq_path`` within ceil(log_phi n) + 3, ``path`` (arbitrary
    numbering) within 3 + 3*log2 n.  Returns the bound; raises
    CheckFailure when observed_steps exceeds it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if graph_kind == "four_path":
        bound: float = 3.0
    elif graph_kind == "star_pair":
        bound = 3.0
    elif graph_kind == "seq_path":
        bound = float(math.ceil(math.log(max(n, 2)) / math.log(PHI) - 1e-9) + 3)
    elif graph_kind == "path":
        bound = 3.0 + 3.0 * math.log2(max(n, 2))
    else:
        raise ValueError(f"unknown graph kind {graph_kind!r}")
    if observed_steps > bound + 1e-9:
        raise CheckFailure(
            f"{graph_kind} with n={n} took {observed_steps} steps, bound {bound:g}"
        )
    return bound


def check_connectivity_preserved(history: RunHistory, graph: Graph) -> None:
    """Check that every recorded state preserves component structure.

    For each recorded step, the recorded edge multiset together with
    one edge from every vertex to its current label must induce exactly
    the components of the input graph.
    """
    if not history.labels or not history.edges:
        raise ValueError("history must carry both edges and labels")
    expected = oracle_components(graph)
    for k in range(min(len(history.edges), len(history.labels))):
        pairs = history.edge_pairs(k)
        labels_k = history.labels[k]
        augmented = pairs + [
            (int(v), int(l))
            for v, l in zip(labels_k.ids.tolist(), labels_k.values.tolist())
            if v != l
        ]
        got = _union_find_labels(graph.vertices, augmented)
        try:
            assert_same_partition(got, expected)
        except CheckFailure as exc:
            raise CheckFailure(f"connectivity broken at recorded step {k}: {exc}") from None


@dataclass
class DuplicationReport:
    """Outcome of the duplicate-growth stress on a sequential path."""

    n: int
    m: int
    with_dedup_sizes: list[int]
    without_dedup_sizes: list[int]
    with_steps: int
    without_steps: int | None
    label2_holders: list[int | None]
    expected_holders: list[int | None]

    def validate(self) -> None:
        cap = 2 * self.m
        for i, size in enumerate(self.with_dedup_sizes, start=1):
            if size > cap:
                raise CheckFailure(
                    f"deduplicated stream grew to {size} > 2m={cap} at step {i}"
                )
        if len(self.without_dedup_sizes) < 4:
            raise CheckFailure("stress run too short to observe growth")
        for i in range(3):
            if self.without_dedup_sizes[i + 1] <= self.without_dedup_sizes[i]:
                raise CheckFailure(
                    "stream without deduplication failed to grow at step "
                    f"{i + 1}: {self.without_dedup_sizes[: i + 2]}"
                )
        if max(self.without_dedup_sizes) <= max(self.with_dedup_sizes):
            raise CheckFailure("disabling deduplication did not increase stream size")
        if self.label2_holders != self.expected_holders:
            raise CheckFailure(
                "label-2 holder sequence mismatch:\n"
                f"  got      {self.label2_holders}\n"
                f"  expected {self.expected_holders}"
            )


def _label2_holder(labels: LabelArray) -> int | None:
    holders = labels.ids[labels.values == 2]
    if holders.size == 0:
        return None
    if holders.size > 1:
        raise CheckFailure(f"label 2 held by several vertices: {holders.tolist()}")
    return int(holders[0])


def duplication_stress(n: int = 64, nodedup_cap: int = 16) -> DuplicationReport:
    """Run the extended operations on a path with and without dedup.

    The stream engine runs twice to collect per-step record counts:
    deduplicated streams stay within 2m records per step, while with
    deduplication disabled the stream grows step over step (that run is
    capped because it may take long to settle, and the sizes collected
    up to the cap are what the report needs).  The report also tracks
    which vertex holds label 2 over the steps of the underlying label
    process: vertex 3 initially, then 2 + gap(k) after k steps until
    that vertex falls off the path.
    """
    if n < 16:
        raise ValueError("stress needs n >= 16 to show growth")
    graph = generate_seq_path(n)
    m = graph.num_edges
    with_res = _stream.run_streamsort(graph, dedup=True)
    try:
        without_res = _stream.run_streamsort(graph, dedup=False, max_steps=nodedup_cap)
        without_steps: int | None = without_res.steps
    except ConvergenceError as exc:
        partial = exc.partial
        assert partial is not None
        without_res = partial  # type: ignore[assignment]
        without_steps = None

    label_run = _pram.run(graph, record_labels=True)
    assert label_run.history is not None
    holders = [_label2_holder(lab) for lab in label_run.history.labels]
    expected: list[int | None] = [3 if n >= 3 else None]
    for k in range(1, len(holders)):
        want = 2 + gap_at(k)
        expected.append(want if want <= n else None)

    return DuplicationReport(
        n=n,
        m=m,
        with_dedup_sizes=[s.edges_out for s in with_res.per_step],
        without_dedup_sizes=[s.edges_out for s in without_res.per_step],
        with_steps=with_res.steps,
        without_steps=without_steps,
        label2_holders=holders,
        expected_holders=expected,
    )
