"""Tests for the statement list closure and trace export"""
import pytest

from src.errors import ContractViolationError, InconsistentInputError
from src.logic.statement_list import StatementList
from src.logic.trace import format_trace, trace_to_dict
from src.models.ci_fact import CiFact, CiQuery
from src.models.graph import NodeId
from src.models.statement import (
    SELECTION,
    CausalAtom,
    CausalStatement,
    StepKind,
    Verdict,
)


def make_nodes(labels):
    return [NodeId(i, label) for i, label in enumerate(labels)]


@pytest.fixture
def xuzy():
    return make_nodes(["X", "U", "Z", "Y"])


@pytest.fixture
def y_structure_list(xuzy):
    """Statements from the three minimal independences of X -> Z <- U, Z -> Y"""
    x, u, z, y = xuzy
    marginal = CiFact(CiQuery(x, u), True, True, {z, y})
    statements = StatementList()
    statements.assert_from_marginal_independence(marginal)
    for w in (z, y):
        statements.assert_from_destroyer(marginal, w)
    statements.assert_from_minimal_independence(CiFact(CiQuery(x, y, {z}), True, True))
    statements.assert_from_minimal_independence(CiFact(CiQuery(u, y, {z}), True, True))
    return statements.close()


class TestStatementGeneration:
    """Statements asserted from CI facts"""

    def test_minimal_independence_gives_disjunctions(self, xuzy):
        x, _, z, y = xuzy
        added = StatementList().assert_from_minimal_independence(
            CiFact(CiQuery(x, y, {z}), True, True)
        )
        assert [str(s) for s in added] == ["disj Z => {X,Y} + S"]

    def test_marginal_independence_gives_two_negations(self, xuzy):
        x, u, _, _ = xuzy
        added = StatementList().assert_from_marginal_independence(CiFact(CiQuery(x, u), True, True))
        assert [str(s) for s in added] == ["neg X => U", "neg U => X"]

    def test_destroyer_refutes_every_target(self, xuzy):
        x, u, z, y = xuzy
        fact = CiFact(CiQuery(x, y, {z}), True, True, {u})
        added = StatementList().assert_from_destroyer(fact, u)
        assert [str(s) for s in added] == ["neg U => X", "neg U => Y", "neg U => Z", "neg U => S"]
        assert added[0].trace.step is StepKind.DESTROYER_DEPENDENCE

    def test_contract_violations(self, xuzy):
        x, u, z, y = xuzy
        statements = StatementList()
        with pytest.raises(ContractViolationError):
            statements.assert_from_minimal_independence(CiFact(CiQuery(x, y, {z}), True))
        with pytest.raises(ContractViolationError):
            statements.assert_from_marginal_independence(CiFact(CiQuery(x, y, {z}), True, True))
        with pytest.raises(ContractViolationError):
            statements.assert_from_destroyer(CiFact(CiQuery(x, u), True, True), z)
        with pytest.raises(ContractViolationError):
            statements.assert_inferred_blocking(z, z, y)

    def test_inferred_blocking(self, xuzy):
        x, _, z, y = xuzy
        statement = StatementList().assert_inferred_blocking(z, x, y)
        assert str(statement) == "disj Z => {X,Y} + S"
        assert statement.trace.blocking == (z, x, y)


class TestClosure:
    """Substitute and reduce rules"""

    def test_y_structure_establishes_tail(self, y_structure_list, xuzy):
        x, u, z, y = xuzy
        assert y_structure_list.query(CausalAtom(z, y)) is Verdict.ESTABLISHED
        for target in (z, x, u, SELECTION):
            assert y_structure_list.query(CausalAtom(y, target)) is Verdict.REFUTED
        assert y_structure_list.query(CausalAtom(x, z)) is Verdict.UNKNOWN
        assert y_structure_list.entails_tail(z, y)
        assert not y_structure_list.entails_tail(x, z)

    def test_fact_trace_shares_destroyer_leaf(self, y_structure_list, xuzy):
        _, _, z, y = xuzy
        trace = y_structure_list.statement_for(CausalAtom(z, y)).trace
        assert trace.step is StepKind.REDUCE_ELIMINATE
        assert len(trace.premises) == 3
        assert trace.premises[1] is trace.premises[2]
        assert [leaf.step for leaf in trace.leaves()] == [
            StepKind.MINIMAL_INDEPENDENCE,
            StepKind.DESTROYER_DEPENDENCE,
        ]

    def test_back_substitution(self):
        x, z1, y = make_nodes(["X", "Z1", "Y"])
        statements = StatementList()
        statements.assert_premise(CausalStatement.disjunction(x, {z1}, True))
        statements.assert_premise(CausalStatement.disjunction(z1, {y}, True))
        statements.close()
        found = [s for s in statements.disjunctions() if str(s) == "disj X => {Y} + S"]
        assert len(found) == 1
        assert found[0].trace.step is StepKind.SUBSTITUTE

    def test_transitivity(self):
        a, b, c = make_nodes("ABC")
        statements = StatementList()
        statements.assert_premise(CausalStatement.disjunction(a, {b}, False))
        statements.assert_premise(CausalStatement.disjunction(b, {c}, False))
        statements.close()
        assert statements.query(CausalAtom(a, c)) is Verdict.ESTABLISHED
        assert statements.statement_for(CausalAtom(a, c)).trace.step is StepKind.REDUCE_TRANSITIVE
        assert statements.query(CausalAtom(c, a)) is Verdict.REFUTED

    def test_subsumed_statement_retired(self):
        a, b, c = make_nodes("ABC")
        statements = StatementList()
        statements.assert_premise(CausalStatement.disjunction(a, {b, c}, True))
        statements.assert_premise(CausalStatement.disjunction(a, {b}, False))
        statements.close()
        assert [str(s) for s in statements.retired] == ["disj A => {B,C} + S"]
        assert statements.disjunctions() == []
        assert statements.summary()["retired"] == 1

    def test_wide_results_dropped_by_default(self):
        a, b, c, d, e = make_nodes("ABCDE")
        premises = [
            CausalStatement.disjunction(a, {b, c}, False),
            CausalStatement.disjunction(b, {d, e}, False),
        ]
        narrow, wide = StatementList(), StatementList(keep_wide=True)
        for statements in (narrow, wide):
            for premise in premises:
                statements.assert_premise(premise)
            statements.close()
        assert "disj A => {C,D,E}" not in narrow.statement_log()
        assert "disj A => {C,D,E}" in wide.statement_log()

    def test_contradiction_reports_both_traces(self):
        x, y = make_nodes("XY")
        statements = StatementList()
        statements.assert_premise(CausalStatement.disjunction(x, {y}, False))
        statements.assert_premise(CausalStatement.negation(CausalAtom(x, y)))
        with pytest.raises(InconsistentInputError) as info:
            statements.close()
        assert len(info.value.traces) == 2

    def test_cycle_is_inconsistent(self):
        a, b = make_nodes("AB")
        statements = StatementList()
        statements.assert_premise(CausalStatement.disjunction(a, {b}, False))
        statements.assert_premise(CausalStatement.disjunction(b, {a}, False))
        with pytest.raises(InconsistentInputError):
            statements.close()

    def test_summary_counts(self, y_structure_list):
        summary = y_structure_list.summary()
        assert summary["facts"] == 1
        assert summary["steps"] > 0
        assert len(y_structure_list) >= summary["facts"] + summary["negatives"]

    def test_second_close_adds_nothing(self, y_structure_list):
        before = (y_structure_list.statement_log(), y_structure_list.summary(), len(y_structure_list))
        assert y_structure_list.pending == 0
        assert y_structure_list.close() is y_structure_list
        after = (y_structure_list.statement_log(), y_structure_list.summary(), len(y_structure_list))
        assert after == before

    def test_reasserted_facts_change_nothing(self, y_structure_list, xuzy):
        x, u, z, y = xuzy
        log = y_structure_list.statement_log()
        retired = len(y_structure_list.retired)
        y_structure_list.assert_from_marginal_independence(CiFact(CiQuery(x, u), True, True))
        y_structure_list.assert_from_minimal_independence(CiFact(CiQuery(x, y, {z}), True, True))
        y_structure_list.close()
        assert y_structure_list.statement_log() == log
        assert len(y_structure_list.retired) == retired


class TestTraceExport:
    """Trace documents and indented text"""

    def test_trace_to_dict(self, y_structure_list, xuzy):
        _, _, z, y = xuzy
        document = trace_to_dict(y_structure_list.statement_for(CausalAtom(z, y)).trace)
        assert document["root"] == 0
        steps = document["steps"]
        assert [s["id"] for s in steps] == [0, 1, 2]
        assert steps[0]["step"] == "reduce-eliminate"
        assert steps[0]["premises"] == [1, 2, 2]
        assert steps[1]["fact"] == "indep X Y | Z minimal"
        assert steps[2]["destroyer"] == "Z"

    def test_format_trace_back_references(self, y_structure_list, xuzy):
        _, _, z, y = xuzy
        text = format_trace(y_structure_list.statement_for(CausalAtom(z, y)).trace)
        assert text.splitlines() == [
            "#0 [reduce-eliminate] fact Z => Y",
            "  #1 [minimal-independence] indep X Y | Z minimal",
            "  #2 [destroyer-dependence] dep X U | Z",
            "  #2 (see above)",
        ]
