"""Ancestry and separation predicates for DAGs and mixed graphs"""
import logging
from collections import deque
from itertools import combinations
from typing import Collection, FrozenSet, Iterable, Set, Union

import networkx as nx

from src.errors import ContractViolationError, InvalidArgumentError
from src.models.graph import CausalDag, EndMark, MixedGraph, NodeId

logger = logging.getLogger(__name__)

Graph = Union[CausalDag, MixedGraph]


def directed_part(g: MixedGraph) -> nx.DiGraph:
    """The subgraph of ``a -> b`` edges as a networkx DiGraph."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from(g.nodes)
    for a, b, mark_a, mark_b in g.edges():
        if mark_a is EndMark.TAIL and mark_b is EndMark.ARROW:
            digraph.add_edge(a, b)
        elif mark_b is EndMark.TAIL and mark_a is EndMark.ARROW:
            digraph.add_edge(b, a)
    return digraph


def ancestors(g: Graph, x: NodeId) -> Set[NodeId]:
    """All nodes with a directed path to ``x``, including ``x`` itself.

    Raises:
        InvalidArgumentError: ``x`` is not a node of ``g``.
    """
    _require_nodes(g, [x])
    if isinstance(g, CausalDag):
        return nx.ancestors(g.graph, x) | {x}
    return nx.ancestors(directed_part(g), x) | {x}


def ancestors_of_set(g: Graph, nodes: Iterable[NodeId]) -> Set[NodeId]:
    """Union of ``ancestors`` over ``nodes``; each node counts as its own ancestor.

    Raises:
        InvalidArgumentError: Some node is not in ``g``.
    """
    result: Set[NodeId] = set()
    for node in nodes:
        result |= ancestors(g, node)
    return result


def d_separated(g: CausalDag, x: NodeId, y: NodeId, z: Collection[NodeId]) -> bool:
    """True iff every path between x and y is blocked by z.

    Raises:
        InvalidArgumentError: Unknown nodes, x == y, or x/y inside z.
    """
    z = frozenset(z)
    _check_query(g, x, y, z)
    return nx.is_d_separator(g.graph, {x}, {y}, set(z))


def m_separated(g: MixedGraph, x: NodeId, y: NodeId, z: Collection[NodeId]) -> bool:
    """True iff no m-connecting path between x and y given z exists.

    Raises:
        ContractViolationError: ``g`` is not ancestral.
        InvalidArgumentError: Unknown nodes, x == y, or x/y inside z.
    """
    z = frozenset(z)
    _check_query(g, x, y, z)
    if not is_ancestral(g):
        raise ContractViolationError("m-separation needs an ancestral graph")
    return not m_connected(g, x, y, z, directed_part(g))


def is_ancestral(g: MixedGraph) -> bool:
    """No directed cycle, no arrowhead pointing at an ancestor, no arrowhead
    at an endpoint of an undirected edge. Circle marks make a graph non-ancestral."""
    digraph = directed_part(g)
    if not nx.is_directed_acyclic_graph(digraph):
        return False
    undirected_endpoints = set()
    arrow_endpoints = set()
    for a, b, mark_a, mark_b in g.edges():
        if EndMark.CIRCLE in (mark_a, mark_b):
            return False
        if mark_a is EndMark.TAIL and mark_b is EndMark.TAIL:
            undirected_endpoints.update((a, b))
        if mark_a is EndMark.ARROW:
            arrow_endpoints.add(a)
            if a in nx.ancestors(digraph, b):
                return False
        if mark_b is EndMark.ARROW:
            arrow_endpoints.add(b)
            if b in nx.ancestors(digraph, a):
                return False
    return not (undirected_endpoints & arrow_endpoints)


def is_maximal(g: MixedGraph) -> bool:
    """Ancestral, and every nonadjacent pair is m-separated by some subset."""
    if not is_ancestral(g):
        return False
    digraph = directed_part(g)
    for x, y in combinations(g.nodes, 2):
        if g.adjacent(x, y):
            continue
        if find_m_separator(g, x, y, digraph) is None:
            logger.debug("No separator for nonadjacent %s, %s", x, y)
            return False
    return True


def find_m_separator(g: MixedGraph, x: NodeId, y: NodeId, digraph: nx.DiGraph = None):
    """Smallest subset of the remaining nodes m-separating x and y, or None."""
    if digraph is None:
        digraph = directed_part(g)
    others = [n for n in g.nodes if n not in (x, y)]
    for size in range(len(others) + 1):
        for z in combinations(others, size):
            if not m_connected(g, x, y, frozenset(z), digraph):
                return frozenset(z)
    return None


def m_connected(
    g: MixedGraph,
    x: NodeId,
    y: NodeId,
    z: FrozenSet[NodeId],
    digraph: nx.DiGraph = None,
) -> bool:
    """Reachability over (node, entered-through-arrowhead) states.

    Skips the ancestral check of ``m_separated``. A node passed as a
    collider must be an ancestor of z; any other passed node must lie
    outside z.
    """
    if digraph is None:
        digraph = directed_part(g)
    anc_z = set(z)
    for node in z:
        anc_z |= nx.ancestors(digraph, node)

    start = [(w, g.mark(w, x) is EndMark.ARROW) for w in g.neighbors(x)]
    seen = set(start)
    queue = deque(start)
    while queue:
        node, into = queue.popleft()
        if node == y:
            return True
        for nxt in g.neighbors(node):
            collider = into and g.mark(node, nxt) is EndMark.ARROW
            if collider and node not in anc_z:
                continue
            if not collider and node in z:
                continue
            state = (nxt, g.mark(nxt, node) is EndMark.ARROW)
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return False


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _require_nodes(g: Graph, nodes: Iterable[NodeId]) -> None:
    for node in nodes:
        if node not in g:
            raise InvalidArgumentError(f"{node!r} is not a node of this graph")


def _check_query(g: Graph, x: NodeId, y: NodeId, z: FrozenSet[NodeId]) -> None:
    _require_nodes(g, [x, y, *z])
    if x == y:
        raise InvalidArgumentError(f"separation query needs distinct nodes, got {x} twice")
    if x in z or y in z:
        raise InvalidArgumentError(f"conditioning set contains an endpoint of {x}, {y}")
