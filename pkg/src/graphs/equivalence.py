"""Markov equivalence of MAGs and brute-force class enumeration"""
import logging
from itertools import combinations
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx

from src.errors import ContractViolationError, InvalidArgumentError, ResourceLimitError
from src.graphs.separation import m_connected, directed_part, is_ancestral
from src.models.graph import EndMark, MixedGraph, NodeId

logger = logging.getLogger(__name__)

ENUMERATION_NODE_LIMIT = 5

# Candidate orientations for one skeleton edge, as (mark at a, mark at b).
_EDGE_CHOICES = (
    (EndMark.TAIL, EndMark.ARROW),
    (EndMark.ARROW, EndMark.TAIL),
    (EndMark.ARROW, EndMark.ARROW),
    (EndMark.TAIL, EndMark.TAIL),
)

Pair = Tuple[NodeId, NodeId]


def markov_equivalent(g1: MixedGraph, g2: MixedGraph) -> bool:
    """True iff both MAGs give the same m-separation answer for every query.

    Pairs adjacent in both graphs are skipped: adjacent nodes are never
    separated.

    Raises:
        InvalidArgumentError: The graphs have different node sets.
        ContractViolationError: Either graph is not ancestral.
    """
    if g1.nodes != g2.nodes:
        raise InvalidArgumentError("graphs must share the same node set")
    for g in (g1, g2):
        if not is_ancestral(g):
            raise ContractViolationError(f"{g!r} is not ancestral")
    return _independence_model(g1) == _independence_model(g2)


def enumerate_equivalent_mags(
    g: MixedGraph, max_nodes: int = ENUMERATION_NODE_LIMIT
) -> List[MixedGraph]:
    """All MAGs over g's nodes that are Markov equivalent to g, g included.

    Candidates keep g's skeleton and unshielded colliders; each survivor
    is compared with g query by query.

    Raises:
        ResourceLimitError: g has more than ``max_nodes`` nodes.
        ContractViolationError: g is not ancestral.
    """
    if len(g.nodes) > max_nodes:
        raise ResourceLimitError(
            f"class enumeration is limited to {max_nodes} nodes, got {len(g.nodes)}"
        )
    if not is_ancestral(g):
        raise ContractViolationError(f"{g!r} is not ancestral")

    target_model = _independence_model(g)
    skeleton = [(a, b) for a, b, _, _ in g.edges()]
    colliders = _unshielded_colliders(g)

    found: List[MixedGraph] = []
    marks: Dict[Pair, EndMark] = {}

    def extend(position: int) -> None:
        if position == len(skeleton):
            candidate = MixedGraph._from_marks(g.nodes, dict(marks))
            if is_ancestral(candidate) and _independence_model(candidate) == target_model:
                found.append(candidate)
            return
        a, b = skeleton[position]
        for mark_a, mark_b in _EDGE_CHOICES:
            marks[(a, b)] = mark_a
            marks[(b, a)] = mark_b
            if _partial_ok(g, marks, colliders, a, b):
                extend(position + 1)
            del marks[(a, b)]
            del marks[(b, a)]

    extend(0)
    logger.debug("Equivalence class of %r has %d members", g, len(found))
    return sorted(found, key=lambda m: [(a, b, ma.value, mb.value) for a, b, ma, mb in m.edges()])


def invariant_marks(g: MixedGraph, max_nodes: int = ENUMERATION_NODE_LIMIT) -> MixedGraph:
    """The PAG of g's class: a mark stays only if every member agrees on it."""
    members = enumerate_equivalent_mags(g, max_nodes)
    edges = []
    for a, b, _, _ in g.edges():
        marks_a = {m.mark(a, b) for m in members}
        marks_b = {m.mark(b, a) for m in members}
        edges.append(
            (
                a,
                b,
                marks_a.pop() if len(marks_a) == 1 else EndMark.CIRCLE,
                marks_b.pop() if len(marks_b) == 1 else EndMark.CIRCLE,
            )
        )
    return MixedGraph(g.nodes, edges)


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _independence_model(g: MixedGraph) -> FrozenSet[Tuple[NodeId, NodeId, FrozenSet[NodeId]]]:
    """Every (x, y, z) with x, y nonadjacent and x m-separated from y given z."""
    digraph = directed_part(g)
    model = set()
    for x, y in combinations(g.nodes, 2):
        if g.adjacent(x, y):
            continue
        others = [n for n in g.nodes if n not in (x, y)]
        for size in range(len(others) + 1):
            for z in combinations(others, size):
                z = frozenset(z)
                if not m_connected(g, x, y, z, digraph):
                    model.add((x, y, z))
    return frozenset(model)


def _unshielded_colliders(g: MixedGraph) -> Dict[Tuple[NodeId, NodeId, NodeId], bool]:
    """Collider status of every unshielded triple (a, c, b), a < b."""
    result = {}
    for c in g.nodes:
        for a, b in combinations(g.neighbors(c), 2):
            if g.adjacent(a, b):
                continue
            result[(a, c, b)] = (
                g.mark(c, a) is EndMark.ARROW and g.mark(c, b) is EndMark.ARROW
            )
    return result


def _partial_ok(g, marks, colliders, a, b) -> bool:
    """Check the constraints that the newly assigned edge a-b can break."""
    for (left, c, right), is_collider in colliders.items():
        if c not in (a, b) or not ({left, right} & {a, b}):
            continue
        if (c, left) in marks and (c, right) in marks:
            now = marks[(c, left)] is EndMark.ARROW and marks[(c, right)] is EndMark.ARROW
            if now != is_collider:
                return False

    digraph = nx.DiGraph()
    digraph.add_nodes_from(g.nodes)
    undirected = set()
    arrowheads = set()
    for (u, v), mark_u in marks.items():
        mark_v = marks[(v, u)]
        if mark_u is EndMark.TAIL and mark_v is EndMark.ARROW:
            digraph.add_edge(u, v)
        if mark_u is EndMark.TAIL and mark_v is EndMark.TAIL:
            undirected.add(u)
        if mark_u is EndMark.ARROW:
            arrowheads.add(u)
    if undirected & arrowheads:
        return False
    if not nx.is_directed_acyclic_graph(digraph):
        return False
    for (u, v), mark_u in marks.items():
        if mark_u is EndMark.ARROW and u in nx.ancestors(digraph, v):
            return False
    return True
