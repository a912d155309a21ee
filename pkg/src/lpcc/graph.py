"""Graph containers, edge-list I/O, and deterministic generators.

The package works on undirected graphs that are stored canonically
(each edge once, endpoints ordered, no self loops) and then expanded
into a directed-edge multiset plus a label map when an engine run
starts.  This module owns the canonical form, the text formats, and
the generator family used by the tests and the benchmark harness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

# Vertex ids must fit in a signed 64-bit int so numpy arrays can hold
# them; ids are non-negative, which leaves 63 usable bits.
MAX_VERTEX_ID = 2**63 - 1


class EdgeListParseError(ValueError):
    """Raised for malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(eq=False)
class Graph:
    """Canonical undirected graph.

    ``vertices`` is the sorted universe (isolated vertices included when
    the source provides them).  ``edges`` is an (m, 2) array with each
    row ordered (low, high), rows lexicographically sorted and unique.
    """

    vertices: np.ndarray
    edges: np.ndarray
    dropped_loops: int = 0
    dropped_duplicates: int = 0
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_edges(
        cls,
        pairs: Iterable[tuple[int, int]],
        extra_vertices: Iterable[int] = (),
        meta: dict | None = None,
    ) -> "Graph":
        """Build the canonical form from raw (u, v) pairs.

        Self loops are dropped, duplicates (in either orientation)
        collapse to one edge, and both drop counts are recorded.
        """
        raw = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
        if raw.size and raw.min() < 0:
            raise ValueError("vertex ids must be non-negative")
        loops = raw[:, 0] == raw[:, 1]
        dropped_loops = int(np.count_nonzero(loops))
        kept = raw[~loops]
        low = np.minimum(kept[:, 0], kept[:, 1])
        high = np.maximum(kept[:, 0], kept[:, 1])
        canon = np.stack([low, high], axis=1) if kept.size else kept.reshape(0, 2)
        if canon.shape[0]:
            canon = np.unique(canon, axis=0)
        dropped_duplicates = kept.shape[0] - canon.shape[0]
        extra = np.array(sorted(set(extra_vertices)), dtype=np.int64)
        universe = np.union1d(canon.reshape(-1), extra) if extra.size else np.unique(canon.reshape(-1))
        return cls(
            vertices=universe.astype(np.int64),
            edges=canon.astype(np.int64),
            dropped_loops=dropped_loops,
            dropped_duplicates=dropped_duplicates,
            meta=dict(meta or {}),
        )

    @property
    def num_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return bool(
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.edges, other.edges)
        )

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]


@dataclass
class EdgeMultiset:
    """Directed edge multiset for one step, stored as parallel arrays."""

    src: np.ndarray
    dst: np.ndarray
    step: int = 1

    def __len__(self) -> int:
        return int(self.src.shape[0])

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def sorted_pairs(self) -> list[tuple[int, int]]:
        """Multiset canonical form: pairs sorted lexicographically."""
        return sorted(self.pairs())


@dataclass
class LabelArray:
    """Label map over a fixed vertex universe.

    ``ids`` is the sorted universe and ``values[i]`` is the label of
    ``ids[i]``.  Lookups go through a binary search so the universe can
    be sparse in id space.
    """

    ids: np.ndarray
    values: np.ndarray

    @classmethod
    def identity(cls, ids: np.ndarray) -> "LabelArray":
        ids = np.asarray(ids, dtype=np.int64)
        return cls(ids=ids, values=ids.copy())

    @classmethod
    def from_dict(cls, mapping: dict[int, int]) -> "LabelArray":
        ids = np.array(sorted(mapping), dtype=np.int64)
        values = np.array([mapping[int(v)] for v in ids], dtype=np.int64)
        return cls(ids=ids, values=values)

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    def __getitem__(self, vertex: int) -> int:
        pos = int(np.searchsorted(self.ids, vertex))
        if pos >= len(self.ids) or self.ids[pos] != vertex:
            raise KeyError(vertex)
        return int(self.values[pos])

    def to_dict(self) -> dict[int, int]:
        return dict(zip(self.ids.tolist(), self.values.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelArray):
            return NotImplemented
        return bool(
            np.array_equal(self.ids, other.ids)
            and np.array_equal(self.values, other.values)
        )

    def copy(self) -> "LabelArray":
        return LabelArray(ids=self.ids, values=self.values.copy())


def _iter_lines(source: str | Path | IO[str]) -> Iterator[str]:
    if hasattr(source, "read"):
        yield from source  # type: ignore[misc]
    else:
        with open(source, "r", encoding="utf-8") as handle:
            yield from handle


def load_edge_list(source: str | Path | IO[str]) -> Graph:
    """Parse whitespace-separated vertex pairs into a canonical Graph.

    Accepts a path or an open text handle.  Blank lines and lines whose
    first non-space character is ``#`` are skipped.  Every other line
    must hold exactly two non-negative integers below 2**63; anything
    else raises EdgeListParseError with the offending line number.
    """
    pairs: list[tuple[int, int]] = []
    for line_no, line in enumerate(_iter_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 2:
            raise EdgeListParseError(
                f"expected two fields, got {len(fields)}", line_no
            )
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise EdgeListParseError(
                f"non-integer field in {stripped!r}", line_no
            ) from None
        if u < 0 or v < 0:
            raise EdgeListParseError("negative vertex id", line_no)
        if u > MAX_VERTEX_ID or v > MAX_VERTEX_ID:
            raise EdgeListParseError("vertex id exceeds 63 bits", line_no)
        pairs.append((u, v))
    return Graph.from_edges(pairs)


def write_edge_list(graph: Graph, sink: str | Path | IO[str]) -> None:
    """Write the canonical edge list, one "u v" line per edge.

    The text format carries no isolated vertices; reloading the output
    reproduces the graph exactly only when every vertex has an edge.
    """
    def _emit(handle: IO[str]) -> None:
        handle.write(f"# undirected edge list: {graph.num_vertices} vertices, {graph.num_edges} edges\n")
        for u, v in graph.edges:
            handle.write(f"{int(u)} {int(v)}\n")

    if hasattr(sink, "write"):
        _emit(sink)  # type: ignore[arg-type]
    else:
        with open(sink, "w", encoding="utf-8") as handle:
            _emit(handle)


def generate_seq_path(n: int) -> Graph:
    """Path 1-2-3-...-n with vertices numbered along the path."""
    if n < 1:
        raise ValueError("path needs at least one vertex")
    ids = np.arange(1, n + 1, dtype=np.int64)
    if n == 1:
        return Graph(vertices=ids, edges=np.empty((0, 2), dtype=np.int64),
                     meta={"kind": "seq_path", "n": n})
    edges = np.stack([ids[:-1], ids[1:]], axis=1)
    return Graph(vertices=ids, edges=edges,
                 meta={"kind": "seq_path", "n": n})


def generate_shuffled_path(n: int, seed: int) -> Graph:
    """Path over 1..n whose vertex numbering is a seeded permutation.

    The permutation is a Fisher-Yates shuffle driven by
    ``random.Random(seed).randrange`` so a (n, seed) pair names the same
    graph everywhere.
    """
    if n < 1:
        raise ValueError("path needs at least one vertex")
    rng = random.Random(seed)
    perm = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    pairs = [(perm[i], perm[i + 1]) for i in range(n - 1)]
    graph = Graph.from_edges(pairs, extra_vertices=perm[:1] if n == 1 else ())
    graph.meta.update({"kind": "path", "n": n, "seed": seed})
    return graph


def generate_star_pair(left: int, right: int, link_direction: str = "lr") -> Graph:
    """Two stars joined root-to-root.

    ``left`` and ``right`` are the leaf counts.  The left star uses the
    lowest ids (root 1), the right star follows it.  ``link_direction``
    records which root the joining edge is written from; the canonical
    form stores the edge once either way, so the choice is metadata.
    """
    if left < 1 or right < 1:
        raise ValueError("each star needs at least one leaf")
    if link_direction not in ("lr", "rl"):
        raise ValueError("link_direction must be 'lr' or 'rl'")
    left_root = 1
    right_root = left + 2
    pairs = [(left_root, left_root + i) for i in range(1, left + 1)]
    pairs += [(right_root, right_root + i) for i in range(1, right + 1)]
    link = (left_root, right_root) if link_direction == "lr" else (right_root, left_root)
    pairs.append(link)
    graph = Graph.from_edges(pairs)
    graph.meta.update({
        "kind": "star_pair",
        "left": left,
        "right": right,
        "link_direction": link_direction,
    })
    return graph


def generate_gnp(n: int, p: float, seed: int, id_base: int = 0) -> Graph:
    """Sparse Erdos-Renyi style graph over ids id_base..id_base+n-1."""
    if n < 1:
        raise ValueError("need at least one vertex")
    rng = random.Random(seed)
    pairs = [
        (id_base + i, id_base + j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    ids = range(id_base, id_base + n)
    graph = Graph.from_edges(pairs, extra_vertices=ids)
    graph.meta.update({"kind": "gnp", "n": n, "p": p, "seed": seed})
    return graph


def parse_gen_spec(spec: str) -> Graph:
    """Build a graph from a compact text spec.

    Forms: ``seqpath:20`` (path of 2**20 vertices), ``path:n=1000:seed=7``
    (shuffled path), ``starpair:3:3`` (leaf counts).
    """
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "seqpath":
            (log2n,) = parts[1:]
            return generate_seq_path(2 ** int(log2n))
        if kind == "path":
            kv = dict(item.split("=", 1) for item in parts[1:])
            return generate_shuffled_path(int(kv["n"]), int(kv.get("seed", "0")))
        if kind == "starpair":
            left, right = parts[1:]
            return generate_star_pair(int(left), int(right))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown generator kind {kind!r}")


def to_initial_state(graph: Graph) -> tuple[EdgeMultiset, LabelArray]:
    """Expand a graph into the step-1 edge multiset and label map.

    Every undirected edge contributes both directed twins, so the
    multiset holds 2m records.  Each vertex starts at the minimum of its
    closed neighborhood; isolated vertices keep their own id.
    """
    m = graph.num_edges
    src = np.concatenate([graph.edges[:, 0], graph.edges[:, 1]]) if m else np.empty(0, dtype=np.int64)
    dst = np.concatenate([graph.edges[:, 1], graph.edges[:, 0]]) if m else np.empty(0, dtype=np.int64)
    labels = LabelArray.identity(graph.vertices)
    if m:
        positions = np.searchsorted(labels.ids, src)
        np.minimum.at(labels.values, positions, dst)
    return EdgeMultiset(src=src.astype(np.int64), dst=dst.astype(np.int64), step=1), labels


def write_labels(labels: LabelArray, sink: str | Path | IO[str]) -> None:
    """Write "vertex<TAB>label" lines in ascending vertex order."""
    def _emit(handle: IO[str]) -> None:
        for v, lab in zip(labels.ids.tolist(), labels.values.tolist()):
            handle.write(f"{v}\t{lab}\n")

    if hasattr(sink, "write"):
        _emit(sink)  # type: ignore[arg-type]
    else:
        with open(sink, "w", encoding="utf-8") as handle:
            _emit(handle)


def read_labels(source: str | Path | IO[str]) -> LabelArray:
    """Inverse of write_labels; validates the two-column tab format."""
    mapping: dict[int, int] = {}
    for line_no, line in enumerate(_iter_lines(source), start=1):
        stripped = line.rstrip("\n")
        if not stripped:
            continue
        fields = stripped.split("\t")
        if len(fields) != 2:
            raise EdgeListParseError("expected 'vertex<TAB>label'", line_no)
        try:
            mapping[int(fields[0])] = int(fields[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer field in {stripped!r}", line_no) from None
    return LabelArray.from_dict(mapping)
