"""Shared builders for the test suite."""
from __future__ import annotations

import random

from locdec.gen import clique_graph, cycle_graph, path_graph
from locdec.graphs import Graph, IdAssignment, InputAssignment, Instance


def plain_instance(graph: Graph, ids: IdAssignment | None = None) -> Instance:
    return Instance(graph,
                    ids if ids is not None else IdAssignment.default(graph.n),
                    InputAssignment((None,) * graph.n))


def asymmetric6() -> Graph:
    # Five-node path with a pendant attached to its second and third nodes.
    return Graph(6, frozenset({(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (2, 5)}))


def id_variants(n: int, seed: int = 0) -> list[IdAssignment]:
    """Three distinct identity assignments for the same n nodes."""
    N = max(n * n, 3)  # even a single node gets three choices
    first = IdAssignment(tuple(range(1, n + 1)), N)
    second = IdAssignment(tuple(range(N, N - n, -1)), N)
    rng = random.Random(seed)
    while True:
        sampled = tuple(rng.sample(range(1, N + 1), n))
        if sampled not in (first.ids, second.ids):
            break
    third = IdAssignment(sampled, N)
    return [first, second, third]


def p3() -> Graph:
    return path_graph(3)

def c4() -> Graph:
    return cycle_graph(4)

def k4() -> Graph:
    return clique_graph(4)
