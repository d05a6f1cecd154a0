"""Centralized ground-truth computations for test-scale instances.

Everything here is global and exhaustive on purpose: these functions
are the reference answers that the local machinery is measured
against, so they favour the most direct enumeration that fits the
size guards.
"""
from __future__ import annotations

from itertools import combinations, product
from typing import Iterator, Optional, Sequence

from .formulas import Formula
from .graphs import Edge, Graph, Instance, Ptr, _norm_edge


# ---------------------------------------------------------------- trees

def _spans(n: int, edges: Sequence[Edge]) -> bool:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    joined = 0
    for (u, v) in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
        joined += 1
    return joined == n - 1


def _as_graph(g) -> Graph:
    return g.graph if isinstance(g, Instance) else g


def oracle_spanning_tree(g, fset: frozenset[Edge]) -> bool:
    graph = _as_graph(g)
    for (u, v) in fset:
        if not graph.has_edge(u, v):
            raise ValueError(f"edge {(u, v)} not in the graph")
    if len(fset) != graph.n - 1:
        return False
    return _spans(graph.n, sorted(fset))


def spanning_trees(graph: Graph) -> Iterator[frozenset[Edge]]:
    if graph.n == 1:
        yield frozenset()
        return
    for combo in combinations(sorted(graph.edges), graph.n - 1):
        if _spans(graph.n, combo):
            yield frozenset(combo)


def oracle_mst_weight(g) -> int:
    graph = _as_graph(g)
    if graph.weights is None:
        raise ValueError("mst needs edge weights")
    return min(sum(graph.weight(u, v) for (u, v) in t) for t in spanning_trees(graph))


def oracle_pointer_tree(instance: Instance) -> bool:
    """Do the node inputs spell out a spanning tree by parent pointer?

    Requires every input to be a pointer, exactly one of them null,
    and the pointer edges to form a tree on the whole graph.
    """
    roots = []
    edges = []
    for v in range(instance.n):
        x = instance.inputs.value(v)
        if not isinstance(x, Ptr):
            return False
        if x.to is None:
            roots.append(v)
        else:
            edges.append(_norm_edge(v, instance.node_of(x.to)))
    if len(roots) != 1:
        return False
    return _spans(instance.n, edges)


# ---------------------------------------------------------------- cycles

def simple_cycles(graph: Graph) -> list[tuple[int, ...]]:
    """All simple cycles of length >= 3, each once.

    A cycle comes back as a node tuple starting at its smallest node;
    of the two directions the one with the smaller second node is kept.
    """
    out: list[tuple[int, ...]] = []
    for start in range(graph.n):
        stack: list[tuple[int, ...]] = [(start,)]
        while stack:
            path = stack.pop()
            for w in graph.neighbours(path[-1]):
                if w == start and len(path) >= 3:
                    if path[1] < path[-1]:
                        out.append(path)
                elif w > start and w not in path:
                    stack.append(path + (w,))
    out.sort()
    return out


def hamiltonian_cycles(graph: Graph) -> list[tuple[int, ...]]:
    return [c for c in simple_cycles(graph) if len(c) == graph.n]


def oracle_tsp_weight(g) -> Optional[int]:
    graph = _as_graph(g)
    if graph.weights is None:
        raise ValueError("tsp needs edge weights")
    best: Optional[int] = None
    for cyc in hamiltonian_cycles(graph):
        w = sum(graph.weight(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))
        if best is None or w < best:
            best = w
    return best


def cycle_node_sets(graph: Graph) -> list[frozenset[int]]:
    return sorted(set(frozenset(c) for c in simple_cycles(graph)), key=sorted)


def oracle_cycle_vc(graph: Graph, k: int) -> bool:
    """Is there an X with |X| >= k such that every S inside X lies on a
    cycle that avoids the rest of X?  The empty S asks for nothing."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return True
    cycles = cycle_node_sets(graph)
    nodes = range(graph.n)
    for r in range(k, graph.n + 1):
        for xs in combinations(nodes, r):
            xset = frozenset(xs)
            ok = True
            for m in range(1, len(xs) + 1):
                for ss in combinations(xs, m):
                    sset = frozenset(ss)
                    rest = xset - sset
                    if not any(sset <= c and not (rest & c) for c in cycles):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return True
    return False


# ---------------------------------------------------------------- set problems

def subsets(n: int) -> Iterator[frozenset[int]]:
    for mask in range(1 << n):
        yield frozenset(v for v in range(n) if mask >> v & 1)


def is_independent(graph: Graph, s: frozenset[int]) -> bool:
    return not any(u in s and v in s for (u, v) in graph.edges)

def is_dominating(graph: Graph, s: frozenset[int]) -> bool:
    return all(v in s or any(w in s for w in graph.neighbours(v)) for v in range(graph.n))

def is_matching(edges: frozenset[Edge]) -> bool:
    seen: set[int] = set()
    for (u, v) in edges:
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return True

def cut_size(graph: Graph, side: frozenset[int]) -> int:
    return sum(1 for (u, v) in graph.edges if (u in side) != (v in side))


def oracle_max_independent(graph: Graph) -> int:
    return max(len(s) for s in subsets(graph.n) if is_independent(graph, s))

def oracle_min_dominating(graph: Graph) -> int:
    return min(len(s) for s in subsets(graph.n) if is_dominating(graph, s))

def oracle_max_matching(graph: Graph) -> int:
    best = 0
    for r in range(len(graph.edges), 0, -1):
        if r <= best:
            break
        for combo in combinations(sorted(graph.edges), r):
            if is_matching(frozenset(combo)):
                best = r
                break
    return best

def oracle_max_cut(graph: Graph) -> int:
    return max(cut_size(graph, s) for s in subsets(graph.n))

def oracle_min_cut(graph: Graph) -> int:
    return min(cut_size(graph, s) for s in subsets(graph.n))


def oracle_three_colourable(graph: Graph) -> bool:
    for colouring in product(range(3), repeat=graph.n):
        if all(colouring[u] != colouring[v] for (u, v) in graph.edges):
            return True
    return False


# ---------------------------------------------------------------- symmetry

def oracle_automorphisms(graph: Graph) -> list[tuple[int, ...]]:
    if graph.n > 8:
        raise ValueError("automorphism search is capped at 8 nodes")
    out = []
    for perm in product(*[range(graph.n)] * graph.n):
        if len(set(perm)) != graph.n:
            continue
        if all(graph.has_edge(perm[u], perm[v]) for (u, v) in graph.edges):
            out.append(perm)
    return out


def has_nontrivial_automorphism(graph: Graph) -> bool:
    ident = tuple(range(graph.n))
    return any(p != ident for p in oracle_automorphisms(graph))


# ---------------------------------------------------------------- formulas

def oracle_qbf(formula: Formula) -> bool:
    names = formula.variables()
    if len(names) > 12:
        raise ValueError("qbf evaluation is capped at 12 variables")
    val: dict[str, bool] = {}

    def clause_true(cl: frozenset) -> bool:
        return any(val[v] == (s > 0) for (v, s) in cl)

    def go(bi: int) -> bool:
        if bi == len(formula.blocks):
            return all(clause_true(cl) for cl in formula.clauses)
        exist = bi % 2 == 0
        block = formula.blocks[bi]
        for bits in product((False, True), repeat=len(block)):
            for v, b in zip(block, bits):
                val[v] = b
            r = go(bi + 1)
            if r == exist:
                return exist
        return not exist

    return go(0)


# ------------------------------------------------------- graph enumeration

def _connected_mask(n: int, edges: list[Edge]) -> bool:
    if n == 1:
        return True
    return len(edges) >= n - 1 and _spans_relaxed(n, edges)

def _spans_relaxed(n: int, edges: list[Edge]) -> bool:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = n
    for (u, v) in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def connected_graphs(n: int) -> Iterator[Graph]:
    """Every connected graph on nodes 0..n-1, one per labelled edge set."""
    all_edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for mask in range(1 << len(all_edges)):
        chosen = [e for i, e in enumerate(all_edges) if mask >> i & 1]
        if _connected_mask(n, chosen):
            yield Graph(n, frozenset(chosen))


_REP_CACHE: dict[int, tuple[Graph, ...]] = {}

def iso_representatives(n: int) -> tuple[Graph, ...]:
    """One connected graph per isomorphism class, smallest labelling first."""
    if n in _REP_CACHE:
        return _REP_CACHE[n]
    perms = [p for p in product(*[range(n)] * n) if len(set(p)) == n]
    seen: set[frozenset[Edge]] = set()
    reps: list[Graph] = []
    for g in connected_graphs(n):
        canon = min(
            (frozenset(_norm_edge(p[u], p[v]) for (u, v) in g.edges) for p in perms),
            key=sorted)
        if canon not in seen:
            seen.add(canon)
            reps.append(Graph(n, canon))
    reps.sort(key=lambda g: (len(g.edges), sorted(g.edges)))
    _REP_CACHE[n] = tuple(reps)
    return _REP_CACHE[n]
