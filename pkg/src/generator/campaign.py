"""Equivalence campaigns: LoCI against FCI and the enumerated MAG class"""
import logging
import multiprocessing
import random
import time
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import networkx as nx

from src.discovery.fci import COVERAGE_GROUPS, FciResult, rule_coverage, run_fci
from src.discovery.loci import LociConfig, LociResult, run
from src.errors import CausalDiscoveryError, InvalidArgumentError
from src.generator.random_dag import DagSpec, random_dag
from src.graphs.equivalence import ENUMERATION_NODE_LIMIT, invariant_marks
from src.graphs.projection import project_to_mag
from src.graphs.text_format import format_edge, format_graph
from src.models.graph import CausalDag, MixedGraph, NodeId
from src.models.statement import SELECTION, CausalStatement, Target
from src.oracles.caching_oracle import CachingOracle
from src.oracles.dag_oracle import DagOracle
from src.oracles.fact_log import format_fact_log

logger = logging.getLogger(__name__)

Range = Tuple[int, int]


@dataclass(frozen=True)
class CampaignSpec:
    """Trial count and the ranges each random DAG is drawn from."""

    trials: int = 1000
    n_observed: Range = (4, 8)
    n_latent: Range = (0, 3)
    n_selection: Range = (0, 2)
    edge_probabilities: Tuple[float, ...] = (0.2, 0.35, 0.5)
    seed: int = 0
    brute_force_limit: int = ENUMERATION_NODE_LIMIT
    loci: LociConfig = field(default_factory=LociConfig)

    def __post_init__(self):
        if self.trials < 0:
            raise InvalidArgumentError(f"trials must be non-negative, got {self.trials}")
        for name in ("n_observed", "n_latent", "n_selection"):
            low, high = getattr(self, name)
            if low < 0 or low > high:
                raise InvalidArgumentError(f"{name} range {low}..{high} is empty")
        if self.n_observed[0] < 1:
            raise InvalidArgumentError("n_observed must allow at least one node")
        if not self.edge_probabilities:
            raise InvalidArgumentError("edge_probabilities is empty")
        for p in self.edge_probabilities:
            if not 0.0 < p < 1.0:
                raise InvalidArgumentError(f"edge probability {p} outside (0, 1)")

    def trial(self, index: int) -> Tuple[DagSpec, int]:
        """DAG shape and seed of trial ``index``; independent of other trials."""
        rng = random.Random(self.seed * 1_000_003 + index)
        dag_spec = DagSpec(
            n_observed=rng.randint(*self.n_observed),
            n_latent=rng.randint(*self.n_latent),
            n_selection=rng.randint(*self.n_selection),
            edge_probability=rng.choice(self.edge_probabilities),
        )
        return dag_spec, rng.randrange(2**31)


@dataclass
class TrialResult:
    """Outcome of one trial.

    ``equal`` requires LoCI and FCI to agree and, when the class was
    enumerated, both to match the invariant marks. Timings are kept apart
    from ``to_dict`` so reports stay byte-identical across runs.
    """

    index: int
    seed: int
    dag_text: str
    n_observed: int
    equal: bool
    brute_force: Optional[bool] = None
    first_difference: Optional[str] = None
    unsound: List[str] = field(default_factory=list)
    rule_counts: Dict[str, int] = field(default_factory=dict)
    loci_queries: int = 0
    fci_queries: int = 0
    error: Optional[str] = None
    artifacts: Dict[str, str] = field(default_factory=dict)
    loci_seconds: float = 0.0
    fci_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.equal and not self.unsound and self.error is None

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("dag_text", "artifacts", "loci_seconds", "fci_seconds"):
            data.pop(key)
        return data


@dataclass
class CampaignReport:
    spec: CampaignSpec
    trials: List[TrialResult]

    @property
    def mismatches(self) -> List[TrialResult]:
        return [t for t in self.trials if not t.ok]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def coverage(self) -> Dict[str, int]:
        counts = {group: 0 for group in COVERAGE_GROUPS}
        for trial in self.trials:
            for group, n in trial.rule_counts.items():
                counts[group] = counts.get(group, 0) + n
        return counts

    def missing_coverage(self) -> List[str]:
        return [group for group, n in self.coverage().items() if n == 0]

    def summary(self) -> dict:
        checked = [t for t in self.trials if t.brute_force is not None]
        n = len(self.trials) or 1
        return {
            "trials": len(self.trials),
            "equal": sum(1 for t in self.trials if t.ok),
            "mismatched": len(self.mismatches),
            "brute_force_checked": len(checked),
            "brute_force_equal": sum(1 for t in checked if t.brute_force),
            "unsound_trials": sum(1 for t in self.trials if t.unsound),
            "errors": sum(1 for t in self.trials if t.error),
            "loci_queries_total": sum(t.loci_queries for t in self.trials),
            "fci_queries_total": sum(t.fci_queries for t in self.trials),
            "loci_queries_mean": round(sum(t.loci_queries for t in self.trials) / n, 2),
            "fci_queries_mean": round(sum(t.fci_queries for t in self.trials) / n, 2),
        }

    def to_dict(self) -> dict:
        spec = asdict(self.spec)
        return {
            "spec": spec,
            "summary": self.summary(),
            "coverage": self.coverage(),
            "trials": [t.to_dict() for t in self.trials],
        }

    def timings(self) -> dict:
        return {
            str(t.index): {"loci_seconds": t.loci_seconds, "fci_seconds": t.fci_seconds}
            for t in self.trials
        }


def run_campaign(
    spec: CampaignSpec,
    workers: int = 1,
    mine_fixtures: Optional[Path] = None,
) -> CampaignReport:
    """Run every trial, optionally in a process pool; results sorted by index."""
    if workers < 1:
        raise InvalidArgumentError(f"workers must be at least 1, got {workers}")
    logger.info("Campaign of %d trials (seed %d, %d workers)", spec.trials, spec.seed, workers)
    job = partial(run_trial, spec)
    if workers == 1:
        trials = [job(i) for i in range(spec.trials)]
    else:
        with multiprocessing.Pool(workers) as pool:
            trials = pool.map(job, range(spec.trials))
    trials.sort(key=lambda t: t.index)

    report = CampaignReport(spec, trials)
    if mine_fixtures is not None:
        save_rule_fixtures(report, mine_fixtures)
    summary = report.summary()
    logger.info("Campaign done: %d/%d equal", summary["equal"], summary["trials"])
    return report


def run_trial(spec: CampaignSpec, index: int) -> TrialResult:
    dag_spec, seed = spec.trial(index)
    dag = random_dag(dag_spec, seed)
    result = compare_on_dag(dag, spec.loci, spec.brute_force_limit)
    result.index, result.seed = index, seed
    if not result.ok:
        logger.warning(
            "Trial %d (seed %d) mismatched: %s",
            index,
            seed,
            result.first_difference or result.error or "unsound statements",
        )
    return result


def compare_on_dag(
    dag: CausalDag,
    config: Optional[LociConfig] = None,
    brute_force_limit: int = ENUMERATION_NODE_LIMIT,
) -> TrialResult:
    """Run both algorithms on the DAG's oracle and compare their PAGs.

    With at most ``brute_force_limit`` observed nodes the invariant marks of
    the projected MAG's class are enumerated as a third opinion.
    """
    config = config or LociConfig()
    trial = TrialResult(
        index=0, seed=0, dag_text=format_graph(dag), n_observed=len(dag.observed), equal=False
    )
    loci_result: Optional[LociResult] = None
    fci_result: Optional[FciResult] = None
    try:
        start = time.perf_counter()
        loci_result = run(CachingOracle(DagOracle(dag)), config)
        trial.loci_seconds = time.perf_counter() - start
        start = time.perf_counter()
        fci_result = run_fci(CachingOracle(DagOracle(dag)), config.max_cond)
        trial.fci_seconds = time.perf_counter() - start
    except CausalDiscoveryError as e:
        trial.error = f"{type(e).__name__}: {e}"
        return trial

    trial.loci_queries = loci_result.oracle_query_count
    trial.fci_queries = fci_result.oracle_query_count
    trial.rule_counts = rule_coverage([fci_result.log])
    trial.unsound = check_soundness(loci_result, dag)
    trial.first_difference = first_difference(loci_result.pag, fci_result.pag, "loci", "fci")
    trial.equal = trial.first_difference is None

    truth = None
    if len(dag.observed) <= brute_force_limit:
        truth = invariant_marks(project_to_mag(dag), max_nodes=brute_force_limit)
        loci_diff = first_difference(loci_result.pag, truth, "loci", "invariant")
        fci_diff = first_difference(fci_result.pag, truth, "fci", "invariant")
        trial.brute_force = loci_diff is None and fci_diff is None
        trial.first_difference = trial.first_difference or loci_diff or fci_diff
        trial.equal = trial.equal and trial.brute_force

    if not trial.ok:
        trial.artifacts = {
            "dag.txt": trial.dag_text,
            "pag.loci.txt": format_graph(loci_result.pag),
            "pag.fci.txt": format_graph(fci_result.pag),
            "facts.log": format_fact_log(
                loci_result.ci_facts,
                loci_result.observed,
                complete=True,
                selection_sinks=loci_result.selection_sinks,
            ),
            "statements.log": "\n".join(loci_result.statements.statement_log()) + "\n",
            "fci_rules.log": "\n".join(fci_result.log_lines()) + "\n",
        }
        if truth is not None:
            trial.artifacts["pag.invariant.txt"] = format_graph(truth)
    return trial


def check_soundness(result: LociResult, dag: CausalDag) -> List[str]:
    """Statements of ``result`` that the generating DAG contradicts."""
    graph = dag.graph
    selection_ancestors = set()
    for s in dag.selection:
        selection_ancestors |= nx.ancestors(graph, s)

    def holds(source: NodeId, target: Target) -> bool:
        if target == SELECTION:
            return source in selection_ancestors
        return source in nx.ancestors(graph, target)

    def true_terms(statement: CausalStatement) -> bool:
        return any(holds(statement.subject, t) for t in statement.terms)

    unsound = []
    statements = result.statements
    unsound.extend(str(s) for s in statements.facts() if not true_terms(s))
    unsound.extend(str(s) for s in statements.negatives() if true_terms(s))
    unsound.extend(str(s) for s in statements.disjunctions() if not true_terms(s))
    return unsound


def first_difference(g1: MixedGraph, g2: MixedGraph, name1: str, name2: str) -> Optional[str]:
    """First edge (in node order) where two graphs over the same nodes disagree."""
    if [n.label for n in g1.nodes] != [n.label for n in g2.nodes]:
        return f"node sets differ: {name1} {list(g1.nodes)} vs {name2} {list(g2.nodes)}"
    by_label = {n.label: n for n in g2.nodes}

    first, second = _edge_texts(g1), _edge_texts(g2)
    order = {label: i for i, label in enumerate(by_label)}
    for key in sorted(set(first) | set(second), key=lambda k: (order[k[0]], order[k[1]])):
        if key not in second:
            return f"{name1} has {first[key]}, {name2} has no edge"
        if key not in first:
            return f"{name2} has {second[key]}, {name1} has no edge"
        if first[key] != second[key]:
            return f"{name1} has {first[key]}, {name2} has {second[key]}"
    return None


def save_rule_fixtures(report: CampaignReport, directory: Path) -> List[Path]:
    """Save the DAG of the first trial in which each coverage group fired."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    covered = set()
    saved = []
    for trial in report.trials:
        for group in COVERAGE_GROUPS:
            if group in covered or not trial.rule_counts.get(group):
                continue
            covered.add(group)
            path = directory / f"{group.lower()}_trial{trial.index}.graph"
            header = f"# {group} fired in trial {trial.index} (seed {trial.seed})\n"
            path.write_text(header + trial.dag_text, encoding="utf-8")
            saved.append(path)
            logger.info("Saved %s fixture %s", group, path)
    return saved


def _edge_texts(g: MixedGraph) -> Dict[Tuple[str, str], str]:
    return {(a.label, b.label): format_edge(a, b, ma, mb) for a, b, ma, mb in g.edges()}
