"""Tests for the FCI reference and its path searches"""
import pytest

from graph_helpers import edge_text
from src.discovery.fci import (
    COVERAGE_GROUPS,
    FciState,
    RuleApplication,
    SepsetTable,
    rule_coverage,
    run_fci,
)
from src.discovery.paths import (
    find_discriminating_path,
    find_uncovered_circle_path,
    find_uncovered_pd_path,
)
from src.errors import RuleConflictError
from src.fixtures import list_fixtures, load_fixture
from src.generator.random_dag import DagSpec, random_dag
from src.graphs.text_format import parse_graph
from src.models.graph import EndMark, MixedGraph, NodeId
from src.oracles import DagOracle


def fci(dag, **options):
    return run_fci(DagOracle(dag), **options)


def rules_fired(result):
    return {entry.rule for entry in result.log}


def mixed(*edges, nodes):
    text = "graph mixed\n" + "".join(f"node {n}\n" for n in nodes)
    return parse_graph(text + "".join(f"edge {e}\n" for e in edges))


MONOTONE_SPEC = DagSpec(n_observed=6, n_latent=2, n_selection=1)


def circle_count(graph):
    return sum((ma is EndMark.CIRCLE) + (mb is EndMark.CIRCLE) for _, _, ma, mb in graph.edges())


class TestRunFci:
    """Skeleton, orientation and logging"""

    def test_y_structure(self, y_structure):
        result = fci(y_structure)
        assert edge_text(result.pag, "X", "Z") == "X o> Z"
        assert edge_text(result.pag, "Z", "Y") == "Z -> Y"
        assert "R0a: remove X - U (sepset {})" in result.log_lines()
        assert "R1: orient Z -> Y (path X,Z,Y)" in result.log_lines()
        x, y, z = (y_structure.node(s) for s in "XYZ")
        assert result.sepsets.get(y, x) == {z}
        assert len(result.sepsets) == 3
        assert result.oracle_query_count > 0

    @pytest.mark.parametrize(
        "name, rules",
        [
            ("double_triangle_r3", {"R3"}),
            ("discriminating_path_r4a", {"R4a"}),
            ("discriminating_path_r4b", {"R4b"}),
            ("selection_circle", {"R5", "R6", "R7"}),
            ("chain_r8", {"R1", "R9", "R8a"}),
            ("two_paths_r10", {"R9", "R10"}),
        ],
    )
    def test_fixture_fires_rules(self, name, rules):
        assert rules <= rules_fired(fci(load_fixture(name)))

    def test_fixture_marks(self):
        r3 = fci(load_fixture("double_triangle_r3")).pag
        assert r3.mark(r3.node("Z"), r3.node("W")) is EndMark.ARROW
        assert edge_text(fci(load_fixture("discriminating_path_r4a")).pag, "Z", "Y") == "Z -> Y"
        assert edge_text(fci(load_fixture("discriminating_path_r4b")).pag, "Z", "Y") == "Z <> Y"
        r10 = fci(load_fixture("two_paths_r10")).pag
        assert edge_text(r10, "A", "Y") == "A -> Y"
        assert edge_text(r10, "A", "B") == "A oo B"
        assert edge_text(r10, "C", "Y") == "C -> Y"

    def test_chain_fixture_uses_r8(self):
        result = fci(load_fixture("chain_r8"))
        assert "R9: orient B -> Y (path B,C,D,Y)" in result.log_lines()
        assert "R8a: orient A -> Y (path A,B,Y)" in result.log_lines()
        assert edge_text(result.pag, "U", "Y") == "U o> Y"

    @pytest.mark.parametrize("name", list_fixtures())
    def test_edge_order_does_not_matter(self, name):
        dag = load_fixture(name)
        baseline = fci(dag).pag
        for seed in range(5):
            assert fci(dag, shuffle_seed=seed).pag == baseline

    def test_phases_are_ordered(self):
        result = fci(load_fixture("selection_circle"))
        phases = [entry.phase for entry in result.log]
        assert phases == sorted(phases)

    @pytest.mark.parametrize(
        "dag",
        [load_fixture(name) for name in list_fixtures()]
        + [random_dag(MONOTONE_SPEC, seed) for seed in range(15)],
    )
    def test_circle_count_never_increases(self, dag, monkeypatch):
        counts = []
        apply = FciState.apply

        def counting_apply(state, *args, **kwargs):
            changed = apply(state, *args, **kwargs)
            counts.append(circle_count(state.graph))
            return changed

        monkeypatch.setattr(FciState, "apply", counting_apply)
        result = fci(dag)
        assert counts == sorted(counts, reverse=True)
        if counts:
            assert counts[-1] == circle_count(result.pag)


class TestFciState:
    """Mark updates and conflicts"""

    @pytest.fixture
    def state(self):
        a, b = NodeId(0, "A"), NodeId(1, "B")
        graph = MixedGraph([a, b], [(a, b, EndMark.TAIL, EndMark.CIRCLE)])
        return FciState(graph, SepsetTable())

    def test_apply_logs_once(self, state):
        a, b = state.graph.nodes
        assert state.apply("R1", [(b, a, EndMark.ARROW)], (a, b))
        assert not state.apply("R1", [(b, a, EndMark.ARROW)], (a, b))
        assert [str(entry) for entry in state.log] == ["R1: orient A -> B"]

    def test_committed_mark_conflict(self, state):
        a, b = state.graph.nodes
        state.apply("R1", [(b, a, EndMark.ARROW)], (a, b))
        with pytest.raises(RuleConflictError) as info:
            state.apply("R6", [(a, b, EndMark.ARROW)], (a, b))
        assert info.value.log_excerpt == ("R1: orient A -> B",)


class TestRuleCoverage:
    """Coverage group folding"""

    def test_subrules_fold(self):
        edge = (NodeId(0, "A"), NodeId(1, "B"))
        log = [RuleApplication(rule, 1, rule, edge) for rule in ("R0a", "R2a", "R2b", "R8b", "R4a")]
        counts = rule_coverage([log, log[:2]])
        assert set(counts) == set(COVERAGE_GROUPS)
        assert counts["R2"] == 3
        assert counts["R8"] == 1
        assert counts["R4a"] == 1
        assert counts["R4b"] == 0


class TestPaths:
    """Path searches over mixed graphs"""

    def test_discriminating_path(self):
        g = mixed("X o> Z1", "Z1 <o Z", "Z1 -> Y", "Z oo Y", nodes=["X", "Z1", "Z", "Y"])
        path = find_discriminating_path(g, g.node("Z"), g.node("Y"))
        assert str(path) == "X,Z1,Z,Y"

    def test_no_discriminating_path_when_ends_adjacent(self):
        g = mixed(
            "X o> Z1", "Z1 <o Z", "Z1 -> Y", "Z oo Y", "X oo Y", nodes=["X", "Z1", "Z", "Y"]
        )
        assert find_discriminating_path(g, g.node("Z"), g.node("Y")) is None

    def test_uncovered_pd_path(self):
        g = mixed("A oo B", "B -> C", nodes="ABC")
        a, _, c = g.nodes
        assert str(find_uncovered_pd_path(g, a, c)) == "A,B,C"
        assert find_uncovered_pd_path(g, c, a) is None

    def test_covered_path_rejected(self):
        g = mixed("A oo B", "B -> C", "A <> C", nodes="ABC")
        a, b, c = g.nodes
        assert find_uncovered_pd_path(g, a, c, first=b) is None

    def test_uncovered_circle_path(self):
        g = mixed("A oo B", "A oo C", "C oo D", "D oo B", nodes="ABCD")
        path = find_uncovered_circle_path(g, (g.node("A"), g.node("B")))
        assert str(path) == "A,C,D,B"
