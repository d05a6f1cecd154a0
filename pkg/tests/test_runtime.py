from __future__ import annotations

import pytest

from locdec.graphs import Graph, IdAssignment
from locdec.runtime import (Decision, LocalVerifier, VerifierError, decide_ld,
                            evaluate, evaluate_verdict)

from corpus import c4, p3, plain_instance


def colour_verifier(palette: int = 3) -> LocalVerifier:
    def decide(ball):
        c = ball.own_input
        if not isinstance(c, int) or not 1 <= c <= palette:
            return False
        return all(ball.input_of(u) != c for u in ball.neighbours(ball.centre))
    return LocalVerifier(radius=1, layer_count=0, decide=decide)


def triangle_with_colours(colours):
    g = Graph(3, frozenset({(0, 1), (1, 2), (0, 2)}))
    return plain_instance(g).with_inputs(colours)


def test_proper_colouring_accepts():
    d = decide_ld(colour_verifier(), triangle_with_colours((1, 2, 3)))
    assert d.accepts == (True, True, True)
    assert d.verdict is True
    assert d.rejecting_nodes == ()


def test_monochromatic_edge_rejects_both_endpoints():
    d = decide_ld(colour_verifier(), triangle_with_colours((1, 1, 2)))
    assert d.accepts == (False, False, True)
    assert d.verdict is False
    assert d.rejecting_nodes == (0, 1)


def test_out_of_palette_rejects_at_that_node():
    g = Graph(5, frozenset({(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}))
    good = plain_instance(g).with_inputs((1, 2, 1, 2, 3))
    assert decide_ld(colour_verifier(), good).verdict is True
    bad = plain_instance(g).with_inputs((1, 2, 1, 2, 4))
    d = decide_ld(colour_verifier(), bad)
    assert d.rejecting_nodes == (4,)


def test_decide_ld_refuses_label_reading_verifier():
    v = LocalVerifier(radius=0, layer_count=1, decide=lambda b: True)
    with pytest.raises(VerifierError, match="expects 1 labelling"):
        decide_ld(v, plain_instance(p3()))


def test_layer_count_mismatch():
    inst = plain_instance(p3())
    v = LocalVerifier(radius=1, layer_count=1, decide=lambda b: True)
    with pytest.raises(VerifierError, match="reads 1 labelling"):
        evaluate(v, inst, ())
    with pytest.raises(VerifierError, match="reads 1 labelling"):
        evaluate(v, inst, ((0, 0, 0), (0, 0, 0)))


def test_partial_labelling_rejected():
    inst = plain_instance(p3())
    v = LocalVerifier(radius=1, layer_count=1, decide=lambda b: True)
    with pytest.raises(VerifierError, match="covers 2 nodes"):
        evaluate(v, inst, ((0, 0),))


def test_label_reading_verifier():
    # Layer holds id parity; radius 0 suffices to check it.
    inst = plain_instance(p3())
    v = LocalVerifier(radius=0, layer_count=1,
                      decide=lambda b: b.own_label(0) == b.own_id % 2)
    assert evaluate(v, inst, ((1, 0, 1),)).verdict is True
    d = evaluate(v, inst, ((1, 1, 1),))
    assert d.rejecting_nodes == (1,)


def test_bad_verifier_parameters():
    with pytest.raises(VerifierError):
        LocalVerifier(radius=-1, layer_count=0, decide=lambda b: True)
    with pytest.raises(VerifierError):
        LocalVerifier(radius=0, layer_count=-2, decide=lambda b: True)


def test_verdict_is_conjunction():
    assert Decision((True, True, True)).verdict is True
    for flip in range(3):
        accepts = tuple(i != flip for i in range(3))
        assert Decision(accepts).verdict is False


def test_decision_at():
    d = Decision((True, False))
    assert d.at(0) is True and d.at(1) is False


def test_decisions_ignore_ids_outside_ball():
    # Radius-1 decision at a node is blind to the antipodal identity on C4.
    def decide(ball):
        return (ball.own_id + sum(ball.id_of(u) for u in ball.neighbours(ball.centre))) % 2 == 0
    v = LocalVerifier(radius=1, layer_count=0, decide=decide)
    a = plain_instance(c4(), IdAssignment((1, 2, 3, 4), 16))
    b = plain_instance(c4(), IdAssignment((1, 2, 9, 4), 16))
    assert evaluate(v, a).at(0) == evaluate(v, b).at(0)


def test_evaluate_is_deterministic():
    inst = triangle_with_colours((1, 1, 2))
    assert decide_ld(colour_verifier(), inst) == decide_ld(colour_verifier(), inst)


def test_verdict_early_exit_and_charging():
    inst = plain_instance(p3())
    calls = []
    reject_all = LocalVerifier(radius=0, layer_count=0, decide=lambda b: False)
    assert evaluate_verdict(reject_all, inst, (), charge=lambda: calls.append(1)) is False
    assert len(calls) == 1
    calls.clear()
    accept_all = LocalVerifier(radius=0, layer_count=0, decide=lambda b: True)
    assert evaluate_verdict(accept_all, inst, (), charge=lambda: calls.append(1)) is True
    assert len(calls) == 3
