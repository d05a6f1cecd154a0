"""Protocol certifying that the graph has a nontrivial symmetry.

The first level (prover) names an image identity for every node: a
claimed non-identity adjacency-preserving bijection.  The remaining two
levels check that claim as the complement lift of a single-level
protocol whose certificates expose a defect of the map; the map itself
is handed to the lifted machinery as reinterpreted node inputs.  The
defect certificates pack up to four rooted spanning trees behind a
leading branch flag:

* identity: every node's image is its own identity,
* shared image: two distinct witness nodes claim the same image,
* lost edge: two adjacent witnesses have non-adjacent images,
* gained edge: two non-adjacent witnesses have adjacent images.

A map whose images all name existing identities and that has none of
these defects is a nontrivial automorphism, so refuting every
certificate proves the claim.  Witness duties are read at tree roots:
a root compares its own input with the image tree's root identity, and
adjacency claims are checked against neighbour identities.
"""

from __future__ import annotations

from itertools import permutations
from typing import Iterable, NamedTuple, Optional

from ..engine import complement_lift
from ..graphs import BallView, Instance
from ..labels import (LabelDomain, Labelling, TreeCert, flag_field, id_field,
                      sub_field, tree_cert_domain)
from ..oracles import has_nontrivial_automorphism, oracle_automorphisms
from ..protocol import (PROVER, LanguageSpec, Level, Protocol,
                        canonical_labelling, pattern_tag)
from ..runtime import LocalVerifier
from ..schemes import _MALFORMED, _cert_tree_ok, _tree_fields

IDENTITY_MAP = 0
SHARED_IMAGE = 1
LOST_EDGE = 2
GAINED_EDGE = 3


class MapDefect(NamedTuple):
    flag: int
    ta: object
    tb: object
    tc: object
    td: object


class NodeImage(NamedTuple):
    image: int


def node_image_domain(instance: Instance) -> LabelDomain:
    return LabelDomain("node-image", 1, instance,
                       (id_field("image", instance.N),), NodeImage)


def map_defect_domain(instance: Instance) -> LabelDomain:
    tdom = tree_cert_domain(instance)
    return LabelDomain("map-defect", 14, instance,
                       (flag_field("flag", 4),
                        sub_field("ta", tdom), sub_field("tb", tdom),
                        sub_field("tc", tdom), sub_field("td", tdom)),
                       MapDefect)


def _part_tree_ok(b: BallView, part: str) -> bool:
    def triple(v: int):
        lbl = b.label(0, v)
        val = getattr(lbl, part) if isinstance(lbl, MapDefect) else None
        return (val.root, val.parent, val.dist) \
            if isinstance(val, TreeCert) else _MALFORMED

    return _cert_tree_ok(b, triple)


def verify_map_defect(b: BallView) -> bool:
    own = b.own_label(0)
    if not isinstance(own, MapDefect):
        return False
    for w in b.neighbours(b.centre):
        lbl = b.label(0, w)
        if not isinstance(lbl, MapDefect) or lbl.flag != own.flag:
            return False
    image = b.own_input
    if own.flag == IDENTITY_MAP:
        return image == b.own_id
    parts = ("ta", "tb", "tc") if own.flag == SHARED_IMAGE \
        else ("ta", "tb", "tc", "td")
    for part in parts:
        if not _part_tree_ok(b, part):
            return False
    if own.ta.root == own.tb.root:
        return False
    nbr_ids = {b.id_of(w) for w in b.neighbours(b.centre)}
    ok = True
    if own.flag == SHARED_IMAGE:
        if own.ta.parent is None or own.tb.parent is None:
            ok = image == own.tc.root
        return ok
    if own.ta.parent is None:
        adjacent = own.tb.root in nbr_ids
        ok = ok and image == own.tc.root
        ok = ok and (adjacent if own.flag == LOST_EDGE else not adjacent)
    if own.tb.parent is None:
        ok = ok and image == own.td.root
    if own.tc.parent is None:
        linked = own.td.root in nbr_ids
        ok = ok and (not linked if own.flag == LOST_EDGE else linked)
    return ok


def _first_map_defect(instance: Instance) -> Optional[Labelling]:
    """The lowest-identity defect of the input map, honestly certified."""
    n = instance.n
    phi = [instance.input_of(v) for v in range(n)]
    order = sorted(range(n), key=instance.id_of)
    filler = canonical_labelling(tree_cert_domain(instance))

    def image_node(v: int) -> Optional[int]:
        img = phi[v]
        if isinstance(img, int) and not isinstance(img, bool):
            return instance.node_of(img)
        return None

    def tree(root: int) -> list:
        return [TreeCert(*t) for t in _tree_fields(instance, root)]

    def packed(flag: int, *roots: int) -> Labelling:
        trees = [tree(r) for r in roots]
        while len(trees) < 4:
            trees.append(list(filler))
        return Labelling(MapDefect(flag, trees[0][v], trees[1][v],
                                   trees[2][v], trees[3][v])
                         for v in range(n))

    if all(phi[v] == instance.id_of(v) for v in range(n)):
        return packed(IDENTITY_MAP)
    for u in order:
        for v in order:
            if instance.id_of(u) >= instance.id_of(v):
                continue
            if phi[u] != phi[v]:
                continue
            w = image_node(u)
            if w is not None:
                return packed(SHARED_IMAGE, u, v, w)
    for u, v in sorted(((min(p, q, key=instance.id_of),
                         max(p, q, key=instance.id_of))
                        for p, q in instance.graph.edges),
                       key=lambda e: (instance.id_of(e[0]),
                                      instance.id_of(e[1]))):
        w1, w2 = image_node(u), image_node(v)
        if w1 is not None and w2 is not None \
                and not instance.graph.has_edge(w1, w2):
            return packed(LOST_EDGE, u, v, w1, w2)
    for u in order:
        for v in order:
            if instance.id_of(u) >= instance.id_of(v):
                continue
            if instance.graph.has_edge(u, v):
                continue
            w1, w2 = image_node(u), image_node(v)
            if w1 is not None and w2 is not None \
                    and instance.graph.has_edge(w1, w2):
                return packed(GAINED_EDGE, u, v, w1, w2)
    return None


def map_defect_exists(instance: Instance) -> bool:
    """Does the input map show one of the four certifiable defects?"""
    return _first_map_defect(instance) is not None


def protocol_map_defect() -> Protocol:
    def cover(instance: Instance, earlier) -> Iterable[Labelling]:
        move = _first_map_defect(instance)
        if move is not None:
            yield move

    def strategy(instance: Instance, earlier) -> Labelling:
        move = _first_map_defect(instance)
        return move if move is not None \
            else canonical_labelling(map_defect_domain(instance))

    return Protocol(
        "map-defect", PROVER, (Level(map_defect_domain, cover, strategy),),
        LocalVerifier(1, 1, verify_map_defect),
        LanguageSpec("map-defect", map_defect_exists, "existential-1"))


def protocol_nontrivial_automorphism() -> Protocol:
    lifted = complement_lift(protocol_map_defect())
    refute_lv, rebut_lv = lifted.levels

    def map_inputs(instance: Instance, move: Labelling) -> Instance:
        return instance.with_inputs(tuple(
            lbl.image if isinstance(lbl, NodeImage) else None
            for lbl in move))

    def image_cover(instance: Instance, earlier) -> Iterable[Labelling]:
        idents = sorted(instance.id_of(v) for v in range(instance.n))
        for perm in permutations(idents):
            yield Labelling(NodeImage(i) for i in perm)

    def image_strategy(instance: Instance, earlier) -> Labelling:
        identity = tuple(range(instance.n))
        for perm in sorted(oracle_automorphisms(instance.graph)):
            if perm != identity:
                return Labelling(NodeImage(instance.id_of(perm[v]))
                                 for v in range(instance.n))
        return Labelling(NodeImage(instance.id_of(v))
                         for v in range(instance.n))

    def refute_cover(instance: Instance, earlier) -> Iterable[Labelling]:
        yield from refute_lv.cover(map_inputs(instance, earlier[0]), ())

    def rebut_cover(instance: Instance, earlier) -> Iterable[Labelling]:
        yield from rebut_lv.cover(map_inputs(instance, earlier[0]),
                                  (earlier[1],))

    def rebut_strategy(instance: Instance, earlier) -> Labelling:
        return rebut_lv.strategy(map_inputs(instance, earlier[0]),
                                 (earlier[1],))

    def decide(b: BallView) -> bool:
        images = {}
        for v in b.members:
            lbl = b.label(0, v)
            images[v] = lbl.image if isinstance(lbl, NodeImage) else None
        rest = tuple({v: b.label(i, v) for v in b.members} for i in (1, 2))
        return bool(lifted.verifier.decide(
            b.with_inputs(images).with_layers(rest)))

    return Protocol(
        "nta", PROVER,
        (Level(node_image_domain, image_cover, image_strategy),
         Level(refute_lv.domain_of, refute_cover, None),
         Level(rebut_lv.domain_of, rebut_cover, rebut_strategy)),
        LocalVerifier(lifted.verifier.radius, 3, decide),
        LanguageSpec("nta",
                     lambda inst: has_nontrivial_automorphism(inst.graph),
                     pattern_tag(PROVER, 3)))
