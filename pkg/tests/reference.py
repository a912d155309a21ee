"""Plain-dict reference interpreter of the rewriting step.

Kept deliberately naive and independent of the package internals: no
numpy, no shared helpers.  Tests drive it next to the engines to check
the per-step dynamics, not just final answers.
"""

from __future__ import annotations


def initial_state(
    edge_pairs: list[tuple[int, int]], vertices: list[int]
) -> tuple[list[tuple[int, int]], dict[int, int]]:
    """Directed twin records and closed-neighborhood minimum labels."""
    edges: list[tuple[int, int]] = []
    for u, v in edge_pairs:
        edges.append((u, v))
        edges.append((v, u))
    labels = {v: v for v in vertices}
    for v, u in edges:
        if u < labels[v]:
            labels[v] = u
    return edges, labels


def step(
    edges: list[tuple[int, int]], labels: dict[int, int]
) -> tuple[list[tuple[int, int]], dict[int, int], int]:
    """One rewriting step; returns (next edges, next labels, halt counter).

    Labels are read from the incoming map and combined into a fresh
    copy, mirroring the double-buffered engine.
    """
    out: list[tuple[int, int]] = []
    new_labels = dict(labels)
    counter = 0
    for v, u in edges:
        lv = labels[v]
        if u != lv:
            out.append((u, lv))
            if lv < new_labels[u]:
                new_labels[u] = lv
            if lv != v:
                counter += 1
        else:
            out.append((u, v))
    return out, new_labels, counter


def run(
    edge_pairs: list[tuple[int, int]],
    vertices: list[int],
    max_steps: int = 500,
) -> tuple[dict[int, int], int, list[list[tuple[int, int]]], list[dict[int, int]]]:
    """Run to the halting condition; returns labels, steps, histories."""
    edges, labels = initial_state(edge_pairs, vertices)
    edge_history = [list(edges)]
    label_history = [dict(labels)]
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise RuntimeError("reference run exceeded step budget")
        edges, labels, counter = step(edges, labels)
        edge_history.append(list(edges))
        label_history.append(dict(labels))
        if counter == 0:
            return labels, steps, edge_history, label_history
