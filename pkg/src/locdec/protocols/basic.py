"""Single-level protocols for the directly certified languages.

Each protocol wraps one certificate scheme: the prover's strategy runs the
honest builder, the cover offers that single certificate (or nothing when
the builder has no witness to encode), and the verifier is the scheme's.
"""

from __future__ import annotations

from ..graphs import Instance, Ptr
from ..labels import Labelling, nst_cert_domain, size_cert_domain, tree_cert_domain
from ..oracles import oracle_spanning_tree
from ..protocol import (PROVER, LanguageSpec, Level, Protocol,
                        canonical_labelling)
from ..runtime import LocalVerifier
from ..schemes import (SchemeError, _pointer_structure, build_bfs_spanning_tree,
                       build_non_spanning_tree_cert, build_size_cert,
                       build_spanning_tree_cert, verify_non_spanning_tree_cert,
                       verify_size_cert, verify_spanning_tree_cert)


# ---------------------------------------------------------------------------
# proper 3-colouring: no labels at all, the input is the whole story


def properly_three_coloured(instance: Instance) -> bool:
    colours = [instance.input_of(v) for v in range(instance.n)]
    if any(not isinstance(c, int) or not 1 <= c <= 3 for c in colours):
        return False
    return all(colours[u] != colours[v] for u, v in instance.graph.edges)


def _colour_check(ball) -> bool:
    own = ball.own_input
    if not isinstance(own, int) or not 1 <= own <= 3:
        return False
    return all(ball.input_of(w) != own
               for w in ball.neighbours(ball.centre))


def protocol_proper_3colouring() -> Protocol:
    return Protocol(
        "3col", PROVER, (),
        LocalVerifier(1, 0, _colour_check),
        LanguageSpec("3col", properly_three_coloured, "decision-0"))


# ---------------------------------------------------------------------------
# spanning tree encoded by the pointer inputs


def _pointer_tree(instance: Instance):
    """Pointer edge set and the unique root, or SchemeError."""
    targets, edges = _pointer_structure(instance)
    roots = [v for v in range(instance.n) if targets[v] is None]
    if len(roots) != 1:
        raise SchemeError("pointer inputs need exactly one root")
    return edges, roots[0]


def spanning_tree_inputs(instance: Instance) -> bool:
    """Do the pointer inputs encode a spanning tree rooted at their one
    bottom node?"""
    try:
        edges, _root = _pointer_tree(instance)
    except SchemeError:
        return False
    return oracle_spanning_tree(instance.graph, edges)


def protocol_spanning_tree() -> Protocol:
    def cover(instance: Instance, earlier):
        try:
            edges, root = _pointer_tree(instance)
            yield build_spanning_tree_cert(instance, edges, root)
        except SchemeError:
            return

    def strategy(instance: Instance, earlier) -> Labelling:
        try:
            edges, root = _pointer_tree(instance)
            return build_spanning_tree_cert(instance, edges, root)
        except SchemeError:
            return canonical_labelling(tree_cert_domain(instance))

    return Protocol(
        "spanning-tree", PROVER,
        (Level(tree_cert_domain, cover, strategy),),
        LocalVerifier(1, 1, verify_spanning_tree_cert),
        LanguageSpec("spanning-tree", spanning_tree_inputs, "existential-1"))


# ---------------------------------------------------------------------------
# every node's input equals the node count


def inputs_equal_size(instance: Instance) -> bool:
    return all(instance.input_of(v) == instance.n
               for v in range(instance.n))


def protocol_size() -> Protocol:
    def honest(instance: Instance) -> Labelling:
        tree, root = build_bfs_spanning_tree(instance)
        return build_size_cert(instance, tree, root)

    def cover(instance: Instance, earlier):
        yield honest(instance)

    def strategy(instance: Instance, earlier) -> Labelling:
        return honest(instance)

    return Protocol(
        "size", PROVER,
        (Level(size_cert_domain, cover, strategy),),
        LocalVerifier(1, 1, verify_size_cert),
        LanguageSpec("size", inputs_equal_size, "existential-1"))


# ---------------------------------------------------------------------------
# the complement: pointer inputs that fail to encode a spanning tree


def non_spanning_tree_inputs(instance: Instance) -> bool:
    """All inputs are pointers but they do not encode a spanning tree."""
    if any(not isinstance(instance.input_of(v), Ptr)
           for v in range(instance.n)):
        return False
    return not spanning_tree_inputs(instance)


def protocol_non_spanning_tree() -> Protocol:
    def cover(instance: Instance, earlier):
        try:
            _targets, edges = _pointer_structure(instance)
            yield build_non_spanning_tree_cert(instance, edges)
        except SchemeError:
            return

    def strategy(instance: Instance, earlier) -> Labelling:
        try:
            _targets, edges = _pointer_structure(instance)
            return build_non_spanning_tree_cert(instance, edges)
        except SchemeError:
            return canonical_labelling(nst_cert_domain(instance))

    return Protocol(
        "non-spanning-tree", PROVER,
        (Level(nst_cert_domain, cover, strategy),),
        LocalVerifier(1, 1, verify_non_spanning_tree_cert),
        LanguageSpec("non-spanning-tree", non_spanning_tree_inputs, "dual-1"))
