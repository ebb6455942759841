"""Tests for the LoCI driver"""
import pytest

from graph_helpers import edge_text
from src.discovery.loci import (
    LociConfig,
    derivation_of,
    reconstruct_pag,
    run,
    run_from_facts,
    summary_dict,
)
from src.errors import InvalidArgumentError, NotFoundError
from src.fixtures import list_fixtures, load_fixture
from src.generator.campaign import check_soundness, compare_on_dag
from src.generator.random_dag import DagSpec, random_dag
from src.graphs.text_format import parse_graph
from src.models.statement import SELECTION, CausalAtom, StepKind, Verdict
from src.oracles import CachingOracle, DagOracle, ReplayOracle


def loci(dag, **options):
    return run(DagOracle(dag), LociConfig(**options))


class TestYStructure:
    """The smallest graph with an established tail"""

    @pytest.fixture
    def result(self, y_structure):
        return loci(y_structure)

    def test_facts(self, result):
        assert [str(f) for f in result.ci_facts] == [
            "indep X U | minimal destroyers=Z,Y",
            "indep X Y | Z minimal",
            "indep U Y | Z minimal",
        ]

    def test_pag(self, result):
        pag = result.pag
        assert edge_text(pag, "X", "Z") == "X o> Z"
        assert edge_text(pag, "U", "Z") == "U o> Z"
        assert edge_text(pag, "Z", "Y") == "Z -> Y"
        assert len(pag.edges()) == 3

    def test_verdicts(self, result, y_structure):
        x, u, z, y = (y_structure.node(s) for s in "XUZY")
        assert result.statements.query(CausalAtom(z, y)) is Verdict.ESTABLISHED
        for target in (z, x, u, SELECTION):
            assert result.statements.query(CausalAtom(y, target)) is Verdict.REFUTED

    def test_derivation_of(self, result, y_structure):
        z, y, x = (y_structure.node(s) for s in "ZYX")
        assert derivation_of(result, CausalAtom(z, y)).step is StepKind.REDUCE_ELIMINATE
        with pytest.raises(NotFoundError):
            derivation_of(result, CausalAtom(x, z))

    def test_summary(self, result):
        summary = summary_dict(result)
        assert summary["observed"] == 4
        assert summary["independences"] == 3
        assert summary["edges"] == 3
        assert summary["complete"] is True
        assert summary["oracle_queries"] == result.oracle_query_count > 0

    def test_existing_cache_reused(self, y_structure):
        cache = CachingOracle(DagOracle(y_structure))
        result = run(cache)
        assert result.oracle_query_count == cache.query_count


class TestFixtures:
    """Bundled rule fixtures"""

    @pytest.mark.parametrize("name", list_fixtures())
    def test_matches_reference(self, name):
        trial = compare_on_dag(load_fixture(name))
        assert trial.ok, trial.first_difference or trial.error or trial.unsound

    @pytest.mark.parametrize("name", list_fixtures())
    def test_blocking_pass_adds_no_arrowheads(self, name):
        result = loci(load_fixture(name))
        assert result.arrowheads_before_blocking == result.arrowheads()

    def test_diamond_keeps_selection_disjunction(self, diamond):
        result = loci(diamond)
        log = result.statements.statement_log()
        assert "disj X => {Y} + S" in log
        assert "disj Z => {Y} + S" in log
        assert edge_text(result.pag, "X", "Z") == "X oo Z"
        assert edge_text(result.pag, "Z", "Y") == "Z -> Y"
        assert edge_text(result.pag, "W", "Y") == "W -> Y"

    def test_discriminating_path_needs_blocking_premise(self):
        dag = load_fixture("discriminating_path_r4a")
        result = loci(dag)
        z, z1, y = (dag.node(s) for s in ("Z", "Z1", "Y"))
        assert result.premises == [(z, z1, y)]
        assert edge_text(result.pag, "Z", "Y") == "Z -> Y"

    def test_discriminating_path_collider(self):
        result = loci(load_fixture("discriminating_path_r4b"))
        assert edge_text(result.pag, "Z", "Y") == "Z <> Y"

    def test_selection_circle(self):
        dag = load_fixture("selection_circle")
        result = loci(dag)
        assert result.statements.query(CausalAtom(dag.node("A"), SELECTION)) is Verdict.ESTABLISHED
        for a, b in (("A", "B"), ("B", "C"), ("C", "D"), ("A", "D")):
            assert edge_text(result.pag, a, b) == f"{a} -- {b}"
        assert edge_text(result.pag, "A", "Y") == "A -o Y"



class TestSelectionWithChildren:
    """Selection variables that have children of their own"""

    @pytest.fixture
    def dag(self):
        """X0 -> X2 -> Sel0 -> X4: conditioning on Sel0 cuts X0 from X4"""
        return parse_graph(
            "node X0\nnode X2\nnode X4\nselection Sel0\n"
            "edge X0 -> X2\nedge X2 -> Sel0\nedge Sel0 -> X4\n"
        )

    def test_marginal_independence_refutes_nothing(self, dag):
        result = loci(dag)
        x0, x4 = dag.node("X0"), dag.node("X4")
        assert not result.selection_sinks
        assert [str(f) for f in result.ci_facts][0].startswith("indep X0 X4 |")
        assert result.statements.query(CausalAtom(x0, x4)) is not Verdict.REFUTED
        assert result.statements.negatives() == []
        assert check_soundness(result, dag) == []

    def test_replay_honours_flag(self, dag):
        live = loci(dag)
        replayed = run_from_facts(
            live.ci_facts, live.observed, complete=True, selection_sinks=False
        )
        assert replayed.pag == live.pag
        assert check_soundness(replayed, dag) == []
        assert check_soundness(run_from_facts(live.ci_facts, live.observed), dag) != []

    @pytest.mark.parametrize("seed", range(40))
    def test_random_dags_stay_sound(self, seed):
        spec = DagSpec(
            n_observed=5,
            n_latent=1,
            n_selection=1,
            edge_probability=0.35,
            selection_sinks=False,
        )
        dag = random_dag(spec, seed)
        assert check_soundness(loci(dag), dag) == []

class TestRunOptions:
    """Order independence, batching, replay and budgets"""

    @pytest.mark.parametrize("name", ["y_structure", "diamond_r9", "discriminating_path_r4a"])
    def test_pair_order_does_not_matter(self, name):
        dag = load_fixture(name)
        baseline = loci(dag)
        for seed in range(20):
            shuffled = loci(dag, seed=seed)
            assert shuffled.pag == baseline.pag
            assert [str(s) for s in shuffled.statements.facts()] == [
                str(s) for s in baseline.statements.facts()
            ]
            assert [str(s) for s in shuffled.statements.negatives()] == [
                str(s) for s in baseline.statements.negatives()
            ]

    def test_batch_closure_same_pag(self, diamond):
        assert loci(diamond, batch_closure=True).pag == loci(diamond).pag

    def test_strict_blocking_same_pag(self):
        dag = load_fixture("discriminating_path_r4a")
        assert loci(dag, strict_blocking=True).pag == loci(dag).pag

    def test_replay_of_complete_log(self):
        dag = load_fixture("discriminating_path_r4a")
        live = loci(dag)
        replayed = run_from_facts(live.ci_facts, live.observed, complete=True)
        assert replayed.pag == live.pag
        assert replayed.premises == live.premises

    def test_partial_replay_skips_blocking(self):
        dag = load_fixture("discriminating_path_r4a")
        live = loci(dag)
        partial = run_from_facts(live.ci_facts[:1], live.observed)
        assert not partial.complete
        assert partial.premises == []
        assert check_soundness(partial, dag) == []

    def test_anytime_budget(self, y_structure):
        result = loci(y_structure, anytime_budget=1)
        assert not result.complete
        assert len(result.ci_facts) == 1
        assert check_soundness(result, y_structure) == []

    def test_max_cond_zero_keeps_extra_edges(self, y_structure):
        result = loci(y_structure, max_cond=0)
        assert len(result.ci_facts) == 1
        assert len(result.pag.edges()) == 5

    def test_reconstruct_pag_without_statements(self, y_structure):
        from src.logic.statement_list import StatementList

        pag = reconstruct_pag(StatementList(), [], y_structure.observed)
        assert len(pag.edges()) == 6
        assert edge_text(pag, "X", "Y") == "X oo Y"


class TestLociConfig:
    """Option validation"""

    @pytest.mark.parametrize("options", [{"max_cond": -1}, {"anytime_budget": -2}])
    def test_negative_values_rejected(self, options):
        with pytest.raises(InvalidArgumentError):
            LociConfig(**options)

    def test_empty_oracle_rejected(self):
        with pytest.raises(InvalidArgumentError):
            run(ReplayOracle([]))
