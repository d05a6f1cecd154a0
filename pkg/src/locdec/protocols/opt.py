"""Protocols certifying that an input is not an optimal admissible solution.

The single prover level carries a flagged composite label.  Flag 0 claims
the input is inadmissible and embeds a certificate for the complement of
the admissibility language.  Flag 1 claims a strictly better admissible
substitute input exists: it embeds admissibility certificates for both the
given input and the substitute, the substitute's per-node values, and two
summing gathering certificates whose shared root compares the totals.
Per-node objective contributions are doubled where the natural objective
halves an incident sum, keeping every aggregate integral.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

from ..engine import shrink_ball
from ..graphs import (MAX_MARKS, BallView, Instance, InstanceError, InputValue,
                      Marks, Ptr, ball)
from ..labels import (INVALID, GatherCert, LabelDomain, Labelling, TreeCert,
                      flag_field, gather_cert_domain, ham_cert_domain,
                      input_value_field, non_ham_cert_domain, sub_field,
                      tree_cert_domain)
from ..oracles import hamiltonian_cycles, is_matching, spanning_trees
from ..protocol import (PROVER, LanguageSpec, Level, Protocol, ProtocolError,
                        canonical_labelling, pattern_tag)
from ..runtime import LocalVerifier
from ..schemes import (SchemeError, _cert_tree_ok, _MALFORMED, _mutual_pair,
                       _tree_fields, _tree_in_subgraph, build_bfs_spanning_tree,
                       build_gathering_cert, build_hamiltonian_cert,
                       build_non_hamiltonian_cert, verify_gathering_cert,
                       verify_hamiltonian_cert, verify_non_hamiltonian_cert)
from .basic import protocol_non_spanning_tree, protocol_spanning_tree

LocalValue = Callable[[BallView], int]
Candidates = Callable[[Instance], Iterable[tuple[InputValue, ...]]]

_VALUE_ERRORS = (SchemeError, InstanceError, ValueError, TypeError, KeyError)


class OptLabel(NamedTuple):
    flag: int
    no_part: object
    yes_x: object
    xprime: object
    yes_xp: object
    agg_x: object
    agg_xp: object


# ---------------------------------------------------------------------------
# small single-level admissibility protocols


class UnitVal(NamedTuple):
    tag: int


def unit_domain(instance: Instance) -> LabelDomain:
    return LabelDomain("unit", 1, instance, (flag_field("tag", 1),), UnitVal)


def _node_view(instance: Instance, v: int) -> BallView:
    return ball(instance, (), v, 1)


def _all_nodes(instance: Instance, rule: Callable[[BallView], bool]) -> bool:
    return all(rule(_node_view(instance, v)) for v in range(instance.n))


def _local_rule_protocol(name: str,
                         rule: Callable[[BallView], bool]) -> Protocol:
    """Level-1 protocol with a contentless label: accepts iff every node
    satisfies the radius-1 rule on its own input."""

    def cover(instance: Instance, earlier) -> Iterable[Labelling]:
        yield canonical_labelling(unit_domain(instance))

    def strategy(instance: Instance, earlier) -> Labelling:
        return canonical_labelling(unit_domain(instance))

    return Protocol(
        name, PROVER, (Level(unit_domain, cover, strategy),),
        LocalVerifier(1, 1, lambda b: bool(rule(b))),
        LanguageSpec(name, lambda inst: _all_nodes(inst, rule),
                     "existential-1"))


def _honest_tree(instance: Instance, root: int) -> Labelling:
    return Labelling(TreeCert(*_tree_fields(instance, root)[v])
                     for v in range(instance.n))


def _defect_protocol(name: str,
                     rule: Callable[[BallView], bool]) -> Protocol:
    """Level-1 protocol accepting iff some node violates the radius-1 rule;
    the certificate is a tree rooted at a violating node."""

    def decide(b: BallView) -> bool:
        def triple(v: int):
            val = b.label(0, v)
            return (val.root, val.parent, val.dist) \
                if isinstance(val, TreeCert) else _MALFORMED

        if not _cert_tree_ok(b, triple):
            return False
        if b.own_label(0).parent is None:
            return not rule(b)
        return True

    def cover(instance: Instance, earlier) -> Iterable[Labelling]:
        for v in sorted(range(instance.n), key=instance.id_of):
            if not rule(_node_view(instance, v)):
                yield _honest_tree(instance, v)
                return

    def strategy(instance: Instance, earlier) -> Labelling:
        for v in sorted(range(instance.n), key=instance.id_of):
            if not rule(_node_view(instance, v)):
                return _honest_tree(instance, v)
        return canonical_labelling(tree_cert_domain(instance))

    return Protocol(
        name, PROVER, (Level(tree_cert_domain, cover, strategy),),
        LocalVerifier(1, 1, decide),
        LanguageSpec(name, lambda inst: not _all_nodes(inst, rule), "dual-1"))


# ---------------------------------------------------------------------------
# Hamiltonian-cycle admissibility pair (marks inputs)


def _marked_cycle_edges(instance: Instance) -> frozenset:
    pairs = []
    for v in range(instance.n):
        pair = _mutual_pair(instance, v)
        if pair is None:
            raise SchemeError(f"node {v} does not mark a reciprocated pair")
        pairs.append(pair)
    return frozenset((min(v, w), max(v, w))
                     for v, pair in enumerate(pairs) for w in pair)


def _honest_ham_cert(instance: Instance) -> Labelling:
    edges = _marked_cycle_edges(instance)
    root = min(range(instance.n), key=instance.id_of)
    return build_hamiltonian_cert(instance, edges, root)


def hamiltonian_inputs(instance: Instance) -> bool:
    """Do the marks inputs trace out one Hamiltonian cycle?"""
    try:
        _honest_ham_cert(instance)
    except SchemeError:
        return False
    return True


def protocol_hamiltonian_cycle() -> Protocol:
    def cover(instance: Instance, earlier) -> Iterable[Labelling]:
        try:
            yield _honest_ham_cert(instance)
        except SchemeError:
            return

    def strategy(instance: Instance, earlier) -> Labelling:
        try:
            return _honest_ham_cert(instance)
        except SchemeError:
            return canonical_labelling(ham_cert_domain(instance))

    return Protocol(
        "hamiltonian-cycle", PROVER, (Level(ham_cert_domain, cover, strategy),),
        LocalVerifier(1, 1, verify_hamiltonian_cert),
        LanguageSpec("hamiltonian-cycle", hamiltonian_inputs, "existential-1"))


def protocol_non_hamiltonian() -> Protocol:
    def cover(instance: Instance, earlier) -> Iterable[Labelling]:
        try:
            yield build_non_hamiltonian_cert(instance)
        except SchemeError:
            yield canonical_labelling(non_ham_cert_domain(instance))

    def strategy(instance: Instance, earlier) -> Labelling:
        try:
            return build_non_hamiltonian_cert(instance)
        except SchemeError:
            return canonical_labelling(non_ham_cert_domain(instance))

    return Protocol(
        "non-hamiltonian", PROVER,
        (Level(non_ham_cert_domain, cover, strategy),),
        LocalVerifier(1, 1, verify_non_hamiltonian_cert),
        LanguageSpec("non-hamiltonian",
                     lambda inst: not hamiltonian_inputs(inst), "dual-1"))


# ---------------------------------------------------------------------------
# substitute-input enumeration


def _default_pool(instance: Instance, v: int) -> Sequence[InputValue]:
    x = instance.input_of(v)
    nbr_ids = sorted(instance.id_of(w)
                     for w in instance.graph.neighbours(v))
    if isinstance(x, Ptr):
        return [Ptr(None)] + [Ptr(i) for i in nbr_ids]
    if isinstance(x, Marks):
        pool: list[InputValue] = [Marks(())]
        for r in range(1, MAX_MARKS + 1):
            pool.extend(Marks(c) for c in combinations(nbr_ids, r))
        return pool
    if isinstance(x, int) and not isinstance(x, bool):
        return [0, 1]
    if x is None:
        return [None]
    raise ProtocolError("input x' not expressible in the input encoding")


def _default_candidates(instance: Instance) -> Iterable[tuple[InputValue, ...]]:
    pools = [_default_pool(instance, v) for v in range(instance.n)]
    yield from product(*pools)


def _tree_candidates(instance: Instance) -> Iterable[tuple[InputValue, ...]]:
    """One parent-pointer encoding per spanning tree, rooted at the
    smallest identity."""
    root = min(range(instance.n), key=instance.id_of)
    for tree in spanning_trees(instance.graph):
        parent, _ = _tree_in_subgraph(instance, tree, root)
        yield tuple(Ptr(None) if parent[v] is None
                    else Ptr(instance.id_of(parent[v]))
                    for v in range(instance.n))


def _cycle_candidates(instance: Instance) -> Iterable[tuple[InputValue, ...]]:
    """The marks encoding of every Hamiltonian cycle."""
    for cyc in hamiltonian_cycles(instance.graph):
        length = len(cyc)
        marks: list[list[int]] = [[] for _ in range(instance.n)]
        for i, v in enumerate(cyc):
            marks[v] = [instance.id_of(cyc[i - 1]),
                        instance.id_of(cyc[(i + 1) % length])]
        yield tuple(Marks(m) for m in marks)


def _subset_candidates(instance: Instance) -> Iterable[tuple[InputValue, ...]]:
    yield from product((0, 1), repeat=instance.n)


def _matching_candidates(instance: Instance) -> Iterable[tuple[InputValue, ...]]:
    """The mutual-pointer encoding of every matching, empty one included."""
    edges = sorted(instance.graph.edges)
    for r in range(instance.n // 2 + 1):
        for combo in combinations(edges, r):
            if not is_matching(frozenset(combo)):
                continue
            xp: list[InputValue] = [Ptr(None)] * instance.n
            for (u, v) in combo:
                xp[u] = Ptr(instance.id_of(v))
                xp[v] = Ptr(instance.id_of(u))
            yield tuple(xp)


# ---------------------------------------------------------------------------
# the composite protocol


def protocol_opt(adm_yes: Protocol, adm_no: Protocol,
                 local_value: LocalValue, sense: str, *,
                 candidates: Optional[Candidates] = None,
                 name: Optional[str] = None) -> Protocol:
    """Protocol for "the input is not an optimal admissible solution".

    ``adm_yes`` and ``adm_no`` must be single-level prover-first protocols
    certifying admissibility and its complement; ``local_value`` maps a
    radius-1 view to the node's objective contribution; ``sense`` says
    whether smaller or larger totals win.  ``candidates`` enumerates the
    substitute input assignments the prover may propose (default: the
    product of per-node values shaped like the current input).
    """
    if sense not in ("min", "max"):
        raise ProtocolError(f"unknown objective sense {sense!r}")
    for q in (adm_yes, adm_no):
        if q.level_count != 1 or q.first != PROVER:
            raise ProtocolError(
                f"optimality needs single-level prover-first admissibility"
                f" protocols, {q.name} is {pattern_tag(q.first, q.level_count)}")
        if q.levels[0].cover is None:
            raise ProtocolError(f"{q.name} has no move cover to embed")
    propose = candidates if candidates is not None else _default_candidates
    ry = adm_yes.verifier.radius
    rn = adm_no.verifier.radius
    radius = max(ry, rn, 1)
    if sense == "min":
        better = lambda a, b: a < b
    else:
        better = lambda a, b: a > b
    pname = name or f"opt:{adm_yes.name}"

    def domain_of(instance: Instance) -> LabelDomain:
        ydom = adm_yes.levels[0].domain_of(instance)
        ndom = adm_no.levels[0].domain_of(instance)
        gdom = gather_cert_domain(instance)
        return LabelDomain(
            f"opt:{ydom.name}|{ndom.name}",
            1 + ndom.c + 2 * ydom.c + 6 + 2 * gdom.c, instance,
            (flag_field("flag", 2),
             sub_field("no_part", ndom),
             sub_field("yes_x", ydom),
             input_value_field("xprime", instance),
             sub_field("yes_xp", ydom),
             sub_field("agg_x", gdom),
             sub_field("agg_xp", gdom)),
            OptLabel)

    def _part_layer(b: BallView, part: str) -> dict[int, object]:
        out = {}
        for v in b.members:
            lbl = b.label(0, v)
            out[v] = getattr(lbl, part) if isinstance(lbl, OptLabel) else INVALID
        return out

    def _sub_view(b: BallView, part: str, r: int,
                  inputs: Optional[dict[int, InputValue]] = None) -> BallView:
        sub = b.with_layers((_part_layer(b, part),))
        if inputs is not None:
            sub = sub.with_inputs(inputs)
        if r < radius:
            sub = shrink_ball(sub, r)
        return sub

    def decide(b: BallView) -> bool:
        own = b.own_label(0)
        if not isinstance(own, OptLabel):
            return False
        for w in b.neighbours(b.centre):
            lbl = b.label(0, w)
            if not isinstance(lbl, OptLabel) or lbl.flag != own.flag:
                return False
        if own.flag == 0:
            return bool(adm_no.verifier.decide(_sub_view(b, "no_part", rn)))
        xp_inputs = {v: (b.label(0, v).xprime
                         if isinstance(b.label(0, v), OptLabel) else None)
                     for v in b.members}
        if not adm_yes.verifier.decide(_sub_view(b, "yes_x", ry)):
            return False
        if not adm_yes.verifier.decide(_sub_view(b, "yes_xp", ry, xp_inputs)):
            return False

        def at_root(total_x: int) -> bool:
            rival = own.agg_xp
            return (isinstance(rival, GatherCert) and rival.parent is None
                    and better(rival.agg, total_x))

        if not verify_gathering_cert(b.with_layers((_part_layer(b, "agg_x"),)),
                                     "sum", local_value, at_root):
            return False
        rival_view = b.with_layers(
            (_part_layer(b, "agg_xp"),)).with_inputs(xp_inputs)
        return verify_gathering_cert(rival_view, "sum", local_value,
                                     lambda total: True)

    def _values(instance: Instance) -> list[int]:
        return [local_value(_node_view(instance, v))
                for v in range(instance.n)]

    def _first_move(p: Protocol, instance: Instance) -> Optional[Labelling]:
        for mv in p.levels[0].cover(instance, ()):
            return mv
        return None

    def _fillers(instance: Instance):
        return (canonical_labelling(adm_no.levels[0].domain_of(instance)),
                canonical_labelling(adm_yes.levels[0].domain_of(instance)),
                canonical_labelling(gather_cert_domain(instance)))

    def _packed(instance: Instance, flag: int, no_mv, yes_mv, xp,
                yes_xp_mv, ax, axp) -> Labelling:
        return Labelling(OptLabel(flag, no_mv[v], yes_mv[v], xp[v],
                                  yes_xp_mv[v], ax[v], axp[v])
                         for v in range(instance.n))

    def cover(instance: Instance, earlier) -> Iterable[Labelling]:
        fill_no, fill_yes, fill_g = _fillers(instance)
        no_xp = (None,) * instance.n
        for nm in adm_no.levels[0].cover(instance, ()):
            yield _packed(instance, 0, nm, fill_yes, no_xp, fill_yes,
                          fill_g, fill_g)
        yx = _first_move(adm_yes, instance)
        if yx is None:
            return
        try:
            tree, root = build_bfs_spanning_tree(instance)
            agg_x = build_gathering_cert(instance, tree, root,
                                         _values(instance), "sum")
        except _VALUE_ERRORS:
            return
        for xp in propose(instance):
            inst2 = instance.with_inputs(xp)
            yxp = _first_move(adm_yes, inst2)
            if yxp is None:
                continue
            try:
                agg_xp = build_gathering_cert(inst2, tree, root,
                                              _values(inst2), "sum")
            except _VALUE_ERRORS:
                continue
            yield _packed(instance, 1, fill_no, yx, xp, yxp, agg_x, agg_xp)

    def strategy(instance: Instance, earlier) -> Labelling:
        if adm_yes.language is None:
            raise ProtocolError(
                f"{pname}: constructive play needs an admissibility oracle")
        fill_no, fill_yes, fill_g = _fillers(instance)
        no_xp = (None,) * instance.n
        if not adm_yes.language.oracle(instance):
            nstrat = adm_no.levels[0].strategy
            nm = nstrat(instance, ()) if nstrat is not None \
                else _first_move(adm_no, instance)
            if nm is None:
                nm = fill_no
            return _packed(instance, 0, nm, fill_yes, no_xp, fill_yes,
                           fill_g, fill_g)
        ystrat = adm_yes.levels[0].strategy

        def honest_yes(inst: Instance) -> Labelling:
            mv = ystrat(inst, ()) if ystrat is not None \
                else _first_move(adm_yes, inst)
            return mv if mv is not None else fill_yes

        try:
            tree, root = build_bfs_spanning_tree(instance)
            vals_x = _values(instance)
            agg_x = build_gathering_cert(instance, tree, root, vals_x, "sum")
        except _VALUE_ERRORS:
            return _packed(instance, 1, fill_no, fill_yes, no_xp, fill_yes,
                           fill_g, fill_g)
        base = sum(vals_x)
        best: Optional[tuple[tuple[InputValue, ...], int]] = None
        for xp in propose(instance):
            inst2 = instance.with_inputs(xp)
            if not adm_yes.language.oracle(inst2):
                continue
            try:
                obj = sum(_values(inst2))
            except _VALUE_ERRORS:
                continue
            if not better(obj, base):
                continue
            if best is None or better(obj, best[1]):
                best = (xp, obj)
        if best is None:
            # The input is optimal: play it against itself and lose honestly.
            xp = tuple(instance.input_of(v) for v in range(instance.n))
            return _packed(instance, 1, fill_no, honest_yes(instance), xp,
                           honest_yes(instance), agg_x, agg_x)
        xp = best[0]
        inst2 = instance.with_inputs(xp)
        agg_xp = build_gathering_cert(inst2, tree, root, _values(inst2), "sum")
        return _packed(instance, 1, fill_no, honest_yes(instance), xp,
                       honest_yes(inst2), agg_x, agg_xp)

    language = None
    if adm_yes.language is not None and adm_no.language is not None:
        y_oracle = adm_yes.language.oracle
        n_oracle = adm_no.language.oracle

        def not_optimal(instance: Instance) -> bool:
            if n_oracle(instance):
                return True
            if not y_oracle(instance):
                return False
            try:
                base = sum(_values(instance))
            except _VALUE_ERRORS:
                return False
            for xp in propose(instance):
                inst2 = instance.with_inputs(xp)
                if not y_oracle(inst2):
                    continue
                try:
                    obj = sum(_values(inst2))
                except _VALUE_ERRORS:
                    continue
                if better(obj, base):
                    return True
            return False

        language = LanguageSpec(pname, not_optimal, "dual-1")

    return Protocol(pname, PROVER, (Level(domain_of, cover, strategy),),
                    LocalVerifier(radius, 1, decide), language)


# ---------------------------------------------------------------------------
# objective readings


def _selected(x: InputValue) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x == 1


def _bit_typed(x: InputValue) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x in (0, 1)


def _mst_value(b: BallView) -> int:
    # Each selected edge contributes its weight at both endpoints.
    own = b.own_input
    total = 0
    for w in b.neighbours(b.centre):
        xw = b.input_of(w)
        if ((isinstance(own, Ptr) and own.to == b.id_of(w))
                or (isinstance(xw, Ptr) and xw.to == b.own_id)):
            total += b.weight(b.centre, w)
    return total

def _tsp_value(b: BallView) -> int:
    own = b.own_input
    if not isinstance(own, Marks):
        return 0
    total = 0
    for w in b.neighbours(b.centre):
        back = b.input_of(w)
        if (b.id_of(w) in own.ids and isinstance(back, Marks)
                and b.own_id in back.ids):
            total += b.weight(b.centre, w)
    return total

def _membership_value(b: BallView) -> int:
    return 1 if _selected(b.own_input) else 0

def _matched_partner(b: BallView, v: int) -> Optional[int]:
    x = b.input_of(v)
    if not isinstance(x, Ptr) or x.to is None:
        return None
    w = b.node_of(x.to)
    if w is None or not b.has_edge(v, w):
        return None
    back = b.input_of(w)
    if isinstance(back, Ptr) and back.to == b.id_of(v):
        return w
    return None

def _matching_value(b: BallView) -> int:
    return 1 if _matched_partner(b, b.centre) is not None else 0

def _cut_side(x: InputValue) -> int:
    return 1 if _selected(x) else 0

def _cut_value(b: BallView) -> int:
    own = _cut_side(b.own_input)
    return sum(1 for w in b.neighbours(b.centre)
               if _cut_side(b.input_of(w)) != own)


# ---------------------------------------------------------------------------
# admissibility rules for the set problems


def _mis_rule(b: BallView) -> bool:
    own = b.own_input
    if not _bit_typed(own):
        return False
    if own != 1:
        return True
    return not any(_selected(b.input_of(w))
                   for w in b.neighbours(b.centre))

def _mds_rule(b: BallView) -> bool:
    own = b.own_input
    if not _bit_typed(own):
        return False
    return _selected(own) or any(_selected(b.input_of(w))
                                 for w in b.neighbours(b.centre))

def _matching_rule(b: BallView) -> bool:
    own = b.own_input
    if not isinstance(own, Ptr):
        return False
    return own.to is None or _matched_partner(b, b.centre) is not None

def _any_input_rule(b: BallView) -> bool:
    return True


_SET_PROBLEMS = {
    "mis": (_mis_rule, _membership_value, "max", _subset_candidates),
    "mds": (_mds_rule, _membership_value, "min", _subset_candidates),
    "matching": (_matching_rule, _matching_value, "max",
                 _matching_candidates),
    "maxcut": (_any_input_rule, _cut_value, "max", _subset_candidates),
    "mincut": (_any_input_rule, _cut_value, "min", _subset_candidates),
}


# ---------------------------------------------------------------------------
# the concrete optimization protocols


def protocol_minimum_spanning_tree() -> Protocol:
    return protocol_opt(protocol_spanning_tree(),
                        protocol_non_spanning_tree(),
                        _mst_value, "min",
                        candidates=_tree_candidates, name="mst")


def protocol_travelling_salesman() -> Protocol:
    return protocol_opt(protocol_hamiltonian_cycle(),
                        protocol_non_hamiltonian(),
                        _tsp_value, "min",
                        candidates=_cycle_candidates, name="tsp")


def protocol_set_problem(kind: str) -> Protocol:
    if kind not in _SET_PROBLEMS:
        raise ProtocolError(f"unknown set problem {kind!r}")
    rule, value, sense, cand = _SET_PROBLEMS[kind]
    adm_yes = _local_rule_protocol(f"{kind}-admissible", rule)
    adm_no = _defect_protocol(f"{kind}-defect", rule)
    return protocol_opt(adm_yes, adm_no, value, sense,
                        candidates=cand, name=kind)
