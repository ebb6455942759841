"""Minimal-independence search and destroyer collection"""
import logging
from itertools import combinations
from typing import FrozenSet, Optional

from src.errors import ContractViolationError, InvalidArgumentError
from src.models.ci_fact import CiFact, CiQuery
from src.models.graph import NodeId
from src.oracles.base_oracle import IndependenceOracle

logger = logging.getLogger(__name__)


def find_minimal_independence(
    oracle: IndependenceOracle,
    x: NodeId,
    y: NodeId,
    max_cond: Optional[int] = None,
) -> Optional[CiFact]:
    """Search for a minimum-cardinality separating set of x and y.

    Candidate sets are tried by increasing size, and within one size in
    lexicographic node-index order. The first separator wins, so the result
    is deterministic and minimal: no strict subset of it separates.

    Args:
        oracle: Any independence oracle.
        x: First observed node.
        y: Second observed node.
        max_cond: Largest conditioning set to try; ``None`` means n - 2.

    Returns:
        A CiFact with ``minimal`` set, or ``None`` when nothing within the
        budget separates the pair.

    Raises:
        InvalidArgumentError: x equals y, or max_cond is negative.
    """
    if x == y:
        raise InvalidArgumentError(f"cannot separate {x} from itself")
    if max_cond is not None and max_cond < 0:
        raise InvalidArgumentError(f"max_cond must be non-negative, got {max_cond}")

    candidates = [n for n in oracle.observed if n not in (x, y)]
    limit = len(candidates) if max_cond is None else min(max_cond, len(candidates))
    for size in range(limit + 1):
        for z in combinations(candidates, size):
            query = CiQuery(x, y, frozenset(z))
            if oracle.is_independent(query):
                logger.debug("Pair %s-%s separated by {%s}", x, y, ",".join(map(str, z)))
                return CiFact(query, True, minimal=True)
    return None


def find_destroyers(oracle: IndependenceOracle, fact: CiFact) -> FrozenSet[NodeId]:
    """Observed nodes W whose addition to z makes x and y dependent.

    Raises:
        ContractViolationError: ``fact`` records a dependence.
    """
    if not fact.independent:
        raise ContractViolationError(f"destroyers are only defined for independences, got {fact}")
    found = set()
    for w in oracle.observed:
        if w in fact.query.nodes:
            continue
        if not oracle.is_independent(CiQuery(fact.x, fact.y, fact.z | {w})):
            found.add(w)
    return frozenset(found)


def record_destroyers(oracle: IndependenceOracle, fact: CiFact) -> CiFact:
    """Copy of ``fact`` with its destroyer set filled in."""
    return fact.with_destroyers(find_destroyers(oracle, fact))


def verify_minimal(oracle: IndependenceOracle, fact: CiFact, exhaustive: bool = False) -> bool:
    """Check that ``fact`` is an independence no smaller set reproduces.

    The default drops one element at a time, which is enough for sets found
    by increasing cardinality. ``exhaustive`` tries every strict subset.
    """
    if not oracle.is_independent(fact.query):
        return False
    members = sorted(fact.z)
    sizes = range(len(members)) if exhaustive else [len(members) - 1]
    for size in sizes:
        if size < 0:
            continue
        for subset in combinations(members, size):
            if oracle.is_independent(CiQuery(fact.x, fact.y, frozenset(subset))):
                return False
    return True
