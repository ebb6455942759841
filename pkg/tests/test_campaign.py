"""Tests for equivalence campaigns"""
import random

import networkx as nx
import pytest

from src.discovery.fci import COVERAGE_GROUPS, rule_coverage, run_fci
from src.discovery.loci import run, run_from_facts
from src.errors import InvalidArgumentError
from src.fixtures import list_fixtures, load_fixture
from src.generator.campaign import (
    CampaignReport,
    CampaignSpec,
    TrialResult,
    check_soundness,
    compare_on_dag,
    first_difference,
    run_campaign,
    run_trial,
    save_rule_fixtures,
)
from src.generator.random_dag import random_dag
from src.graphs.text_format import parse_graph
from src.models.ci_fact import CiFact, CiQuery
from src.models.graph import EndMark
from src.models.statement import SELECTION, CausalAtom, Verdict
from src.oracles import DagOracle, verify_minimal

SMALL = CampaignSpec(trials=15, n_observed=(3, 5), n_latent=(0, 2), n_selection=(0, 1), seed=11)
INVARIANTS = CampaignSpec(
    trials=40, n_observed=(4, 6), n_latent=(0, 2), n_selection=(0, 2), seed=23
)


def mixed(*edges):
    text = "graph mixed\nnode A\nnode B\nnode C\n"
    return parse_graph(text + "".join(f"edge {e}\n" for e in edges))


class TestCampaignSpec:
    """Validation and per-trial seeding"""

    @pytest.mark.parametrize(
        "options",
        [
            {"trials": -1},
            {"n_observed": (0, 3)},
            {"n_latent": (3, 1)},
            {"edge_probabilities": ()},
            {"edge_probabilities": (0.0,)},
        ],
    )
    def test_invalid_specs(self, options):
        with pytest.raises(InvalidArgumentError):
            CampaignSpec(**options)

    def test_trial_is_deterministic(self):
        assert SMALL.trial(4) == SMALL.trial(4)
        dag_spec, _ = SMALL.trial(4)
        assert 3 <= dag_spec.n_observed <= 5

    def test_trials_are_independent_of_count(self):
        longer = CampaignSpec(trials=50, n_observed=(3, 5), n_latent=(0, 2), n_selection=(0, 1), seed=11)
        assert longer.trial(7) == SMALL.trial(7)


class TestCompareOnDag:
    """Single-DAG comparison"""

    def test_y_structure_agrees(self, y_structure):
        trial = compare_on_dag(y_structure)
        assert trial.ok
        assert trial.brute_force is True
        assert trial.rule_counts["R1"] >= 1
        assert trial.artifacts == {}
        assert "dag_text" not in trial.to_dict()

    def test_brute_force_skipped_for_large_graphs(self):
        trial = compare_on_dag(load_fixture("selection_circle"))
        assert trial.brute_force is None

    def test_run_trial_reproducible(self):
        first, again = run_trial(SMALL, 2), run_trial(SMALL, 2)
        assert first.to_dict() == again.to_dict()
        assert first.index == 2


class TestSoundness:
    """Statements checked against the generating DAG"""

    def test_true_dag_is_sound(self, y_structure):
        assert check_soundness(run(DagOracle(y_structure)), y_structure) == []

    def test_wrong_dag_exposes_statements(self, y_structure):
        result = run(DagOracle(y_structure))
        reversed_tail = parse_graph(
            "node X\nnode U\nnode Z\nnode Y\nedge X -> Z\nedge U -> Z\nedge Y -> Z\n"
        )
        unsound = check_soundness(result, reversed_tail)
        assert "fact Z => Y" in unsound
        assert "neg Y => Z" in unsound


class TestFirstDifference:
    """Edge-by-edge PAG comparison"""

    def test_equal_graphs(self):
        assert first_difference(mixed("A o> B"), mixed("A o> B"), "loci", "fci") is None

    def test_mark_difference(self):
        text = first_difference(mixed("A o> B"), mixed("A -> B"), "loci", "fci")
        assert text == "loci has A o> B, fci has A -> B"

    def test_missing_edge(self):
        text = first_difference(mixed("A o> B", "B oo C"), mixed("A o> B"), "loci", "fci")
        assert text == "loci has B oo C, fci has no edge"
        text = first_difference(mixed(), mixed("A o> B"), "loci", "fci")
        assert text == "fci has A o> B, loci has no edge"


class TestRunCampaign:
    """Small campaigns"""

    def test_small_campaign_agrees(self):
        report = run_campaign(SMALL)
        assert report.ok, [t.first_difference or t.error for t in report.mismatches]
        summary = report.summary()
        assert summary["trials"] == 15
        assert summary["equal"] == 15
        assert summary["brute_force_checked"] == summary["brute_force_equal"] == 15

    def test_worker_pool_gives_same_report(self):
        spec = CampaignSpec(trials=6, n_observed=(3, 5), seed=3)
        assert run_campaign(spec, workers=2).to_dict() == run_campaign(spec).to_dict()

    def test_invalid_worker_count(self):
        with pytest.raises(InvalidArgumentError):
            run_campaign(SMALL, workers=0)

    def test_save_rule_fixtures(self, tmp_path):
        trials = [
            TrialResult(index=3, seed=9, dag_text="node A\n", n_observed=1, equal=True,
                        rule_counts={"R1": 2}),
            TrialResult(index=4, seed=10, dag_text="node B\n", n_observed=1, equal=True,
                        rule_counts={"R1": 1, "R9": 1}),
        ]
        saved = save_rule_fixtures(CampaignReport(SMALL, trials), tmp_path / "mined")
        assert sorted(p.name for p in saved) == ["r1_trial3.graph", "r9_trial4.graph"]
        assert (tmp_path / "mined" / "r1_trial3.graph").read_text() == (
            "# R1 fired in trial 3 (seed 9)\nnode A\n"
        )

    def test_mine_fixtures_option(self, tmp_path):
        report = run_campaign(CampaignSpec(trials=3, n_observed=(3, 4), seed=1), mine_fixtures=tmp_path)
        covered = [g for g in COVERAGE_GROUPS if report.coverage()[g]]
        assert len(list(tmp_path.glob("*.graph"))) == len(covered)



class TestCampaignInvariants:
    """Properties every run over random DAGs keeps"""

    @pytest.fixture(scope="class")
    def runs(self):
        runs = []
        for index in range(INVARIANTS.trials):
            dag_spec, seed = INVARIANTS.trial(index)
            dag = random_dag(dag_spec, seed)
            oracle = DagOracle(dag)
            runs.append((index, dag, oracle, run(oracle)))
        return runs

    def test_every_sepset_is_minimal(self, runs):
        for index, _, oracle, result in runs:
            for fact in result.ci_facts:
                assert fact.minimal and verify_minimal(oracle, fact), (index, str(fact))
            for (x, y), z in run_fci(oracle).sepsets.items():
                fact = CiFact(CiQuery(x, y, z), True, True)
                assert verify_minimal(oracle, fact), (index, str(fact))

    def test_separators_cut_directed_paths_and_forks(self, runs):
        for index, dag, _, result in runs:
            graph = dag.graph
            for fact in result.ci_facts:
                blockers = fact.z | set(dag.selection)
                x, y = fact.x, fact.y
                for a, b in ((x, y), (y, x)):
                    for path in nx.all_simple_paths(graph, a, b):
                        assert blockers & set(path[1:-1]), (index, str(fact), path)
                for c in nx.ancestors(graph, x) & nx.ancestors(graph, y):
                    for left in nx.all_simple_paths(graph, c, x):
                        for right in nx.all_simple_paths(graph, c, y):
                            if set(left) & set(right) != {c}:
                                continue
                            trek = set(left[:-1]) | set(right[:-1])
                            assert blockers & trek, (index, str(fact), left, right)

    def test_marginal_independence_means_no_ancestry(self, runs):
        for index, dag, _, result in runs:
            for fact in result.ci_facts:
                if fact.z:
                    continue
                assert fact.x not in nx.ancestors(dag.graph, fact.y), (index, str(fact))
                assert fact.y not in nx.ancestors(dag.graph, fact.x), (index, str(fact))

    def test_undirected_endpoint_iff_selection_established(self, runs):
        for index, _, _, result in runs:
            undirected = set()
            for a, b, mark_a, mark_b in result.pag.edges():
                if mark_a is EndMark.TAIL and mark_b is EndMark.TAIL:
                    undirected |= {a, b}
            established = {
                x
                for x in result.observed
                if result.statements.query(CausalAtom(x, SELECTION)) is Verdict.ESTABLISHED
            }
            assert undirected == established, index

    def test_closed_list_is_a_fixpoint(self, runs):
        for index, _, _, result in runs:
            statements = result.statements
            before = (statements.statement_log(), statements.summary(), len(statements))
            statements.close()
            assert (statements.statement_log(), statements.summary(), len(statements)) == before, index

@pytest.mark.slow
class TestAcceptance:
    """Campaign-scale agreement, brute force, replay and coverage"""

    @pytest.fixture(scope="class")
    def default_report(self):
        return run_campaign(CampaignSpec())

    def test_default_campaign_agrees(self, default_report):
        assert default_report.summary()["trials"] == 1000
        assert default_report.ok, [t.first_difference for t in default_report.mismatches[:5]]

    def test_brute_force_agrees(self):
        report = run_campaign(CampaignSpec(trials=200, n_observed=(4, 5), seed=1))
        summary = report.summary()
        assert summary["brute_force_checked"] == 200
        assert summary["brute_force_equal"] == 200

    def test_rule_coverage(self, default_report):
        fixture_logs = [run_fci(DagOracle(load_fixture(name))).log for name in list_fixtures()]
        counts = default_report.coverage()
        for group, n in rule_coverage(fixture_logs).items():
            counts[group] += n
        assert [group for group, n in counts.items() if n == 0] == []

    def test_partial_replay_is_sound(self):
        spec = CampaignSpec(trials=100, seed=2)
        rng = random.Random(0)
        for index in range(spec.trials):
            dag_spec, seed = spec.trial(index)
            dag = random_dag(dag_spec, seed)
            live = run(DagOracle(dag))
            for fraction in (0.25, 0.5, 0.75):
                k = int(len(live.ci_facts) * fraction)
                subset = rng.sample(live.ci_facts, k)
                partial = run_from_facts(subset, live.observed)
                assert check_soundness(partial, dag) == [], (index, fraction)
