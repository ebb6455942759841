"""Logical causal inference: from minimal independences to a complete PAG"""
import logging
import random
import time
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import FrozenSet, List, Optional, Sequence, Set, Tuple

from src.errors import InconsistentInputError, InvalidArgumentError, NotFoundError
from src.logic.statement_list import StatementList
from src.models.ci_fact import CiFact, CiQuery
from src.models.graph import EndMark, MixedGraph, NodeId
from src.models.statement import SELECTION, CausalAtom, DerivationTrace, Verdict
from src.oracles.base_oracle import IndependenceOracle
from src.oracles.caching_oracle import CachingOracle
from src.oracles.search import find_minimal_independence, record_destroyers

logger = logging.getLogger(__name__)

Premise = Tuple[NodeId, NodeId, NodeId]


@dataclass(frozen=True)
class LociConfig:
    """Run options.

    Fields:
        max_cond: Largest separating set searched; ``None`` means n - 2.
        anytime_budget: Stop after this many independence facts.
        keep_wide_disjunctions: Keep substitution results with more than
            two node targets.
        seed: ``None`` visits pairs in index order, an integer in a seeded
            permutation.
        batch_closure: Close once after the search instead of after every pair.
        strict_blocking: Confirm non-separation in the blocking-node search
            with explicit dependence queries.
    """

    max_cond: Optional[int] = None
    anytime_budget: Optional[int] = None
    keep_wide_disjunctions: bool = False
    seed: Optional[int] = None
    batch_closure: bool = False
    strict_blocking: bool = False

    def __post_init__(self):
        if self.max_cond is not None and self.max_cond < 0:
            raise InvalidArgumentError(f"max_cond must be non-negative, got {self.max_cond}")
        if self.anytime_budget is not None and self.anytime_budget < 0:
            raise InvalidArgumentError(
                f"anytime_budget must be non-negative, got {self.anytime_budget}"
            )


@dataclass
class LociResult:
    statements: StatementList
    pag: MixedGraph
    ci_facts: List[CiFact]
    oracle_query_count: int
    observed: Tuple[NodeId, ...]
    premises: List[Premise] = field(default_factory=list)
    arrowheads_before_blocking: FrozenSet[Tuple[NodeId, NodeId]] = frozenset()
    complete: bool = True
    selection_sinks: bool = True
    elapsed_seconds: float = 0.0
    blocking_disagreements: List[Tuple[NodeId, NodeId]] = field(default_factory=list)

    def arrowheads(self) -> FrozenSet[Tuple[NodeId, NodeId]]:
        """(at, other) for every arrowhead of the output PAG."""
        return frozenset(
            (at, other)
            for a, b, ma, mb in self.pag.edges()
            for at, other, mark in ((a, b, ma), (b, a, mb))
            if mark is EndMark.ARROW
        )


def run(oracle: IndependenceOracle, config: Optional[LociConfig] = None) -> LociResult:
    """Search every pair for a minimal independence, close, and build the PAG.

    Raises:
        InvalidArgumentError: The oracle observes no variables.
        InconsistentInputError: The oracle's answers contradict each other.
    """
    config = config or LociConfig()
    start = time.perf_counter()
    cache = oracle if isinstance(oracle, CachingOracle) else CachingOracle(oracle)
    observed = tuple(cache.observed)
    if not observed:
        raise InvalidArgumentError("oracle observes no variables")

    logger.info("LoCI search over %d variables (%s)", len(observed), cache.source_name())
    sinks = cache.selection_sinks
    if not sinks:
        logger.info("Selection variables may have children, marginal independences refute nothing")
    statements = StatementList(keep_wide=config.keep_wide_disjunctions)
    facts: List[CiFact] = []
    complete = True
    for x, y in _pair_order(observed, config.seed):
        if config.anytime_budget is not None and len(facts) >= config.anytime_budget:
            logger.warning("Anytime budget of %d facts reached, search stopped", len(facts))
            complete = False
            break
        fact = find_minimal_independence(cache, x, y, config.max_cond)
        if fact is None:
            continue
        fact = record_destroyers(cache, fact)
        facts.append(fact)
        _ingest(statements, fact, sinks)
        if not config.batch_closure:
            statements.close()

    result = _finish(statements, facts, observed, config, complete, cache)
    result.selection_sinks = sinks
    result.oracle_query_count = cache.query_count
    result.elapsed_seconds = time.perf_counter() - start
    logger.info(
        "LoCI done: %d facts, %d premises, %d oracle queries",
        len(facts),
        len(result.premises),
        cache.query_count,
    )
    return result


def run_from_facts(
    facts: Sequence[CiFact],
    observed: Sequence[NodeId],
    config: Optional[LociConfig] = None,
    complete: bool = False,
    selection_sinks: bool = True,
) -> LociResult:
    """Replay mode: derive what the supplied facts allow and nothing more.

    The blocking-node pass needs every pair's search result, so it only runs
    when ``complete`` says the facts are exhaustive. ``selection_sinks=False``
    stops marginal independences from refuting causation.
    """
    config = config or LociConfig()
    start = time.perf_counter()
    observed = tuple(sorted(observed))
    independences = [f for f in facts if f.independent]
    if config.anytime_budget is not None and len(independences) > config.anytime_budget:
        independences = independences[: config.anytime_budget]
        complete = False
    if config.strict_blocking:
        logger.warning("Strict blocking needs a live oracle; replay uses the search shortcut")
        config = replace(config, strict_blocking=False)

    statements = StatementList(keep_wide=config.keep_wide_disjunctions)
    for fact in independences:
        _ingest(statements, fact, selection_sinks)
        if not config.batch_closure:
            statements.close()
    result = _finish(statements, independences, observed, config, complete, None)
    result.selection_sinks = selection_sinks
    result.elapsed_seconds = time.perf_counter() - start
    return result


def find_inferred_blocking_nodes(
    statements: StatementList,
    ci_facts: Sequence[CiFact],
    oracle: Optional[IndependenceOracle] = None,
    strict: bool = False,
    disagreements: Optional[List[Tuple[NodeId, NodeId]]] = None,
) -> List[Premise]:
    """Find nodes that must block some path between a neighbour and an endpoint.

    For each minimal independence X _||_ Y | [Z] and each orientation of the
    pair, sequences [X, U1..Uk, Z, Y] over nodes of Z are explored depth
    first. Consecutive nodes must not be separated, and every interior U
    must be refuted as a cause of both neighbours and of selection. A
    sequence with k >= 1 yields the premise (Z, Uk, Y).

    Args:
        statements: A closed list holding every arrowhead-phase statement.
        ci_facts: The independences found by the pair search.
        oracle: Needed when ``strict`` is set.
        strict: Require dependence under every subset of Z instead of
            trusting that no separating set was found.
        disagreements: Collects pairs where the two non-separation tests differ.

    Returns:
        Sorted, de-duplicated premises.
    """
    separated: Set[FrozenSet[NodeId]] = {f.pair for f in ci_facts if f.independent}
    found: Set[Premise] = set()

    for fact in ci_facts:
        if not fact.minimal or len(fact.z) < 2:
            continue
        zset = fact.z
        checked = {}

        def linked(u: NodeId, v: NodeId) -> bool:
            key = frozenset((u, v))
            if key not in checked:
                shortcut = key not in separated
                if strict:
                    literal = _literally_dependent(oracle, u, v, zset)
                    if literal != shortcut:
                        logger.warning(
                            "Non-separation of %s-%s: search shortcut %s, dependence tests %s",
                            u, v, shortcut, literal,
                        )
                        if disagreements is not None:
                            disagreements.append(tuple(sorted((u, v))))
                    checked[key] = literal
                else:
                    checked[key] = shortcut
            return checked[key]

        def interior_ok(u: NodeId, before: NodeId, after: NodeId) -> bool:
            return all(
                statements.query(CausalAtom(u, t)) is Verdict.REFUTED
                for t in (before, after, SELECTION)
            )

        for x, y in ((fact.x, fact.y), (fact.y, fact.x)):
            _extend_sequence([x], zset, y, linked, interior_ok, found)

    premises = sorted(found)
    for premise in premises:
        logger.debug("Inferred blocking node %s between %s and %s", *premise)
    return premises


def reconstruct_pag(
    statements: StatementList,
    ci_facts: Sequence[CiFact],
    observed: Sequence[NodeId],
) -> MixedGraph:
    """Turn the closed statement list into PAG edge marks.

    An edge joins every pair no fact separates. At endpoint X of X *-* Y the
    mark is a tail when ``X => Y or X => S`` holds, an arrowhead when both
    atoms are refuted, and a circle otherwise.

    Raises:
        InconsistentInputError: An endpoint qualifies for both tail and arrowhead.
    """
    separated = {f.pair for f in ci_facts if f.independent}
    observed = sorted(observed)
    edges = []
    for a, b in combinations(observed, 2):
        if frozenset((a, b)) in separated:
            continue
        edges.append((a, b, _endpoint_mark(statements, a, b), _endpoint_mark(statements, b, a)))
    return MixedGraph(observed, edges)


def derivation_of(result: LociResult, atom: CausalAtom) -> DerivationTrace:
    """Trace of an established or refuted atom.

    Raises:
        NotFoundError: The run neither established nor refuted ``atom``.
    """
    statement = result.statements.statement_for(atom)
    if statement is None:
        raise NotFoundError(f"{atom} is neither established nor refuted")
    return statement.trace


def summary_dict(result: LociResult) -> dict:
    counts = result.statements.summary()
    return {
        "observed": len(result.observed),
        "independences": len(result.ci_facts),
        "oracle_queries": result.oracle_query_count,
        "facts": counts["facts"],
        "negatives": counts["negatives"],
        "disjunctions": counts["disjunctions"],
        "premises": len(result.premises),
        "edges": len(result.pag.edges()),
        "complete": result.complete,
        "elapsed_seconds": round(result.elapsed_seconds, 4),
    }


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _pair_order(observed: Sequence[NodeId], seed: Optional[int]) -> List[Tuple[NodeId, NodeId]]:
    pairs = list(combinations(observed, 2))
    if seed is not None:
        random.Random(seed).shuffle(pairs)
    return pairs


def _ingest(statements: StatementList, fact: CiFact, selection_sinks: bool = True) -> None:
    if fact.minimal:
        statements.assert_from_minimal_independence(fact)
    if not fact.z and selection_sinks:
        statements.assert_from_marginal_independence(fact)
    for w in sorted(fact.witness_destroyers):
        statements.assert_from_destroyer(fact, w)


def _finish(statements, facts, observed, config, complete, oracle) -> LociResult:
    statements.close()
    before = _arrowheads(statements, facts, observed)
    premises: List[Premise] = []
    disagreements: List[Tuple[NodeId, NodeId]] = []
    if complete:
        premises = find_inferred_blocking_nodes(
            statements, facts, oracle, config.strict_blocking, disagreements
        )
        for z, z_k, y in premises:
            statements.assert_inferred_blocking(z, z_k, y)
        statements.close()
    else:
        logger.info("Fact set incomplete, blocking-node pass skipped")
    pag = reconstruct_pag(statements, facts, observed)
    return LociResult(
        statements=statements,
        pag=pag,
        ci_facts=list(facts),
        oracle_query_count=0,
        observed=tuple(observed),
        premises=premises,
        arrowheads_before_blocking=before,
        complete=complete,
        blocking_disagreements=disagreements,
    )


def _arrowheads(statements, facts, observed) -> FrozenSet[Tuple[NodeId, NodeId]]:
    separated = {f.pair for f in facts if f.independent}
    heads = set()
    for a, b in combinations(sorted(observed), 2):
        if frozenset((a, b)) in separated:
            continue
        for at, other in ((a, b), (b, a)):
            if _refutes_both(statements, at, other):
                heads.add((at, other))
    return frozenset(heads)


def _refutes_both(statements: StatementList, x: NodeId, y: NodeId) -> bool:
    return (
        statements.query(CausalAtom(x, y)) is Verdict.REFUTED
        and statements.query(CausalAtom(x, SELECTION)) is Verdict.REFUTED
    )


def _endpoint_mark(statements: StatementList, x: NodeId, y: NodeId) -> EndMark:
    tail = statements.tail_statement(x, y)
    arrow = _refutes_both(statements, x, y)
    if tail is not None and arrow:
        negations = [
            statements.statement_for(CausalAtom(x, t)) for t in (y, SELECTION)
        ]
        raise InconsistentInputError(
            f"endpoint {x} of {x}-{y} is both tail ({tail}) and arrowhead",
            [tail.trace] + [n.trace for n in negations],
        )
    if tail is not None:
        return EndMark.TAIL
    if arrow:
        return EndMark.ARROW
    return EndMark.CIRCLE


def _extend_sequence(path, zset, y, linked, interior_ok, found) -> None:
    last = path[-1]
    for c in sorted(zset - set(path)):
        if not linked(last, c):
            continue
        if len(path) >= 2 and not interior_ok(last, path[-2], c):
            continue
        if len(path) >= 2 and linked(c, y):
            found.add((c, last, y))
        _extend_sequence(path + [c], zset, y, linked, interior_ok, found)


def _literally_dependent(oracle, u: NodeId, v: NodeId, zset: FrozenSet[NodeId]) -> bool:
    rest = sorted(zset - {u, v})
    for size in range(len(rest) + 1):
        for subset in combinations(rest, size):
            if oracle.is_independent(CiQuery(u, v, frozenset(subset))):
                return False
    return True
