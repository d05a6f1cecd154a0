"""Formula encodings and the alternating truth game."""

import pytest

from locdec import gen
from locdec.engine import (CONSTRUCTIVE, EXHAUSTIVE, EvalMode, check_protocol,
                           game_evaluate)
from locdec.formulas import Formula, FormulaError, parse_formula
from locdec.graphs import (Cls, Graph, IdAssignment, InputAssignment,
                           Instance, InstanceError, Lit)
from locdec.labels import Labelling
from locdec.oracles import oracle_qbf
from locdec.protocol import ProtocolError, all_invalid_labelling
from locdec.protocols import resolve
from locdec.protocols.qbf import (TruthLabel, decode_qbf, encode_qbf,
                                  protocol_qbf_k)
from locdec.runtime import evaluate

WIDE = EvalMode(node_cap=32)


# ---------------------------------------------------------------------------
# encoding and decoding


class TestEncoding:
    def test_single_positive_clause(self):
        inst = encode_qbf(parse_formula("∃y:(y)"))
        assert inst.n == 3
        assert inst.graph.edges == frozenset({(0, 1), (0, 2)})
        assert inst.inputs.values == (Lit(1, 1), Lit(1, -1), Cls())

    def test_contradiction_pair(self):
        inst = encode_qbf(parse_formula("∃y:(y)∧(¬y)"))
        assert inst.n == 4
        assert inst.graph.edges == frozenset({(0, 1), (0, 2), (1, 3)})
        assert inst.inputs.values == (Lit(1, 1), Lit(1, -1), Cls(), Cls())

    def test_two_level_formula_marks_levels(self):
        inst = encode_qbf(parse_formula("∃y1∀y2:(y1∨y2)∧(y1∨¬y2)"))
        assert inst.inputs.values[:4] == (Lit(1, 1), Lit(1, -1),
                                          Lit(2, 1), Lit(2, -1))

    def test_empty_clause_is_unrepresentable(self):
        with pytest.raises(FormulaError):
            Formula((("y",),), (frozenset(),))

    def test_split_formula_has_no_connected_encoding(self):
        with pytest.raises(InstanceError):
            encode_qbf(parse_formula("∃a b:(a)∧(b)"))

    def test_decode_round_trip(self):
        f = parse_formula("∃y1∀y2:(y1∨y2)∧(y1∨¬y2)")
        g = decode_qbf(encode_qbf(f))
        assert tuple(len(b) for b in g.blocks) == (1, 1)
        assert oracle_qbf(g) == oracle_qbf(f)
        assert g.to_text() == "∃x1 ∀x2: (x1 ∨ x2) ∧ (x1 ∨ ¬x2)"

    def test_decode_rejects_plain_graphs(self):
        inst = Instance(gen.path_graph(3), IdAssignment((1, 2, 3), 3),
                        InputAssignment((None, None, None)))
        with pytest.raises(FormulaError):
            decode_qbf(inst)

    def test_decode_rejects_unpartnered_literals(self):
        inst = Instance(Graph(2, frozenset({(0, 1)})),
                        IdAssignment((1, 2), 2),
                        InputAssignment((Lit(1, 1), Cls())))
        with pytest.raises(FormulaError):
            decode_qbf(inst)


# ---------------------------------------------------------------------------
# games


class TestGames:
    def test_single_clause_accepts_with_true(self):
        inst = encode_qbf(parse_formula("∃y:(y)"))
        out = game_evaluate(protocol_qbf_k(1), inst, EXHAUSTIVE)
        assert out.verdict
        assert list(out.line[0]) == [TruthLabel(1), TruthLabel(0),
                                     TruthLabel(None)]

    def test_contradiction_rejects_all_assignments(self):
        inst = encode_qbf(parse_formula("∃y:(y)∧(¬y)"))
        assert not game_evaluate(protocol_qbf_k(1), inst, EXHAUSTIVE).verdict

    def test_two_level_example_accepts(self):
        inst = encode_qbf(parse_formula("∃y1∀y2:(y1∨y2)∧(y1∨¬y2)"))
        assert game_evaluate(resolve("qbf"), inst, EXHAUSTIVE).verdict
        assert game_evaluate(resolve("qbf"), inst, CONSTRUCTIVE).verdict

    def test_deeper_formula_than_game_is_an_error(self):
        inst = encode_qbf(parse_formula("∃y1∀y2:(y1∨y2)∧(y1∨¬y2)"))
        with pytest.raises(ProtocolError):
            game_evaluate(protocol_qbf_k(1), inst, EXHAUSTIVE)

    def test_levels_beyond_depth_carry_blank_labels(self):
        inst = encode_qbf(parse_formula("∃y:(y)"))
        out = game_evaluate(protocol_qbf_k(3), inst, EXHAUSTIVE)
        assert out.verdict
        assert all(lbl == TruthLabel(None) for lbl in out.line[1])

    def test_verdict_matches_oracle_on_generated_formulas(self):
        p = resolve("qbf")
        tested = 0
        for seed in range(120):
            f = gen.random_formula(seed, max_vars=4, max_clauses=3, k=2)
            try:
                inst = encode_qbf(f)
            except InstanceError:
                continue
            tested += 1
            want = oracle_qbf(f)
            assert game_evaluate(p, inst, WIDE).verdict == want, f.to_text()
        assert tested >= 40

    def test_six_variable_two_block_formula(self):
        f = parse_formula("∃a b c∀d e f:(a∨d)∧(b∨¬e)∧(c∨f)∧(¬a∨¬d)"
                          "∧(a∨b∨¬c)∧(d∨e∨¬f)")
        inst = encode_qbf(f)
        assert not oracle_qbf(f)
        assert not game_evaluate(resolve("qbf"), inst, WIDE).verdict

    def test_verdict_is_identity_invariant(self):
        inst = encode_qbf(parse_formula("∃y1∀y2:(y1∨y2)∧(y1∨¬y2)"))
        report = check_protocol(resolve("qbf"), [inst])
        assert report.ok, report.disagreements


# ---------------------------------------------------------------------------
# verifier readings


class TestVerifier:
    def setup_method(self):
        self.f = Formula((("a",), ("b",)),
                         (frozenset({("b", 1), ("b", -1)}),
                          frozenset({("a", 1), ("b", 1)})))
        self.inst = encode_qbf(self.f)
        self.verifier = resolve("qbf").verifier
        # nodes: a+ a- b+ b- c1 c2
        self.a_true = Labelling([TruthLabel(1), TruthLabel(0),
                                 TruthLabel(None), TruthLabel(None),
                                 TruthLabel(None), TruthLabel(None)])

    def test_consistent_universal_assignment_reads_as_played(self):
        b_false = Labelling([TruthLabel(None), TruthLabel(None),
                             TruthLabel(0), TruthLabel(1),
                             TruthLabel(None), TruthLabel(None)])
        d = evaluate(self.verifier, self.inst, (self.a_true, b_false))
        assert d.verdict

    def test_one_sided_universal_values_read_true(self):
        # both polarities false would falsify the tautological clause;
        # the clause node reads the broken pair as true instead
        b_broken = Labelling([TruthLabel(None), TruthLabel(None),
                              TruthLabel(0), TruthLabel(0),
                              TruthLabel(None), TruthLabel(None)])
        d = evaluate(self.verifier, self.inst, (self.a_true, b_broken))
        assert d.verdict

    def test_damaged_universal_level_reads_true(self):
        d = evaluate(self.verifier, self.inst,
                     (self.a_true, all_invalid_labelling(self.inst.n)))
        assert d.verdict

    def test_existential_nodes_enforce_opposite_values(self):
        a_doubled = Labelling([TruthLabel(1), TruthLabel(1),
                               TruthLabel(None), TruthLabel(None),
                               TruthLabel(None), TruthLabel(None)])
        b_false = Labelling([TruthLabel(None), TruthLabel(None),
                             TruthLabel(0), TruthLabel(1),
                             TruthLabel(None), TruthLabel(None)])
        d = evaluate(self.verifier, self.inst, (a_doubled, b_false))
        assert not d.verdict
        assert set(d.rejecting_nodes) == {0, 1}

    def test_true_literal_satisfies_its_clauses(self):
        b_true = Labelling([TruthLabel(None), TruthLabel(None),
                            TruthLabel(1), TruthLabel(0),
                            TruthLabel(None), TruthLabel(None)])
        a_false = Labelling([TruthLabel(0), TruthLabel(1),
                             TruthLabel(None), TruthLabel(None),
                             TruthLabel(None), TruthLabel(None)])
        d = evaluate(self.verifier, self.inst, (a_false, b_true))
        assert d.verdict
