"""Shared fixtures: the graph corpus and a one-shot three-engine sweep."""

from __future__ import annotations

import random
from dataclasses import dataclass

import pytest

from lpcc import (
    Graph,
    MapReduceRunResult,
    RunResult,
    StreamRunResult,
    generate_gnp,
    generate_seq_path,
    generate_shuffled_path,
    generate_star_pair,
    run,
    run_mapreduce,
    run_streamsort,
)


def traced_path_graph() -> Graph:
    """The 4-vertex path 1-3-4-2 used by the worked traces."""
    return Graph.from_edges([(1, 3), (3, 4), (4, 2)])


def cycle_graph(n: int, base: int = 1) -> Graph:
    ids = list(range(base, base + n))
    pairs = [(ids[i], ids[(i + 1) % n]) for i in range(n)]
    return Graph.from_edges(pairs)


def star_graph(leaves: int, root: int = 1) -> Graph:
    return Graph.from_edges([(root, root + i) for i in range(1, leaves + 1)])


def fixture_graphs() -> list[tuple[str, Graph]]:
    """Hand-picked shapes covering the format and engine edge cases."""
    return [
        ("traced_path", traced_path_graph()),
        ("single_edge", Graph.from_edges([(0, 1)])),
        ("two_components", Graph.from_edges([(1, 2), (2, 3), (10, 11)])),
        ("triangle", Graph.from_edges([(1, 2), (2, 3), (1, 3)])),
        ("cycle8", cycle_graph(8)),
        ("cycle9_offset", cycle_graph(9, base=100)),
        ("star10", star_graph(10)),
        ("star_pair_3_4", generate_star_pair(3, 4)),
        ("star_pair_1_1", generate_star_pair(1, 1)),
        ("with_isolated", Graph.from_edges([(5, 6)], extra_vertices=[1, 2, 3])),
        ("edgeless", Graph.from_edges([], extra_vertices=[7, 9])),
        ("empty", Graph.from_edges([])),
        ("seq17", generate_seq_path(17)),
        ("seq64", generate_seq_path(64)),
        ("shuffled40", generate_shuffled_path(40, 11)),
        ("sparse_ids", Graph.from_edges([(10**12, 10**12 + 5), (10**12 + 5, 3)])),
        ("dense16", generate_gnp(16, 0.5, seed=5)),
    ]


def seeded_corpus(count: int = 1000) -> list[tuple[str, Graph]]:
    """Deterministic family of sparse random and structured graphs."""
    sizes = [16, 16, 24, 32, 32, 48, 64, 64, 96, 128, 192, 256]
    out: list[tuple[str, Graph]] = []
    i = 0
    while len(out) < count:
        n = sizes[i % len(sizes)]
        seed = 10_000 + i
        kind = i % 6
        if kind <= 2:
            p = (1.0, 2.0, 8.0)[kind] / n
            g = generate_gnp(n, p, seed=seed)
            name = f"gnp_{n}_{kind}_{seed}"
        elif kind == 3:
            g = generate_shuffled_path(n, seed)
            name = f"path_{n}_{seed}"
        elif kind == 4:
            rng = random.Random(seed)
            g = generate_star_pair(rng.randint(1, n // 2), rng.randint(1, n // 2))
            name = f"starpair_{n}_{seed}"
        else:
            rng = random.Random(seed)
            base = rng.randint(0, 50)
            g = cycle_graph(n, base=base)
            name = f"cycle_{n}_{seed}"
        out.append((name, g))
        i += 1
    return out


@dataclass
class CorpusEntry:
    name: str
    graph: Graph
    pram: RunResult
    stream: StreamRunResult
    mr: MapReduceRunResult


@pytest.fixture(scope="session")
def corpus() -> list[tuple[str, Graph]]:
    return fixture_graphs() + seeded_corpus(1000)


@pytest.fixture(scope="session")
def corpus_results(corpus) -> list[CorpusEntry]:
    """All three engines over the whole corpus, computed once."""
    entries = []
    for name, g in corpus:
        entries.append(
            CorpusEntry(
                name=name,
                graph=g,
                pram=run(g),
                stream=run_streamsort(g),
                mr=run_mapreduce(g),
            )
        )
    return entries
