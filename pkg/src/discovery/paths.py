"""Path searches used by the FCI orientation rules"""
from collections import deque
from typing import Callable, List, Optional, Tuple

from src.models.graph import EndMark, MixedGraph, NodeId, Path

StepCheck = Callable[[MixedGraph, NodeId, NodeId], bool]


def find_discriminating_path(graph: MixedGraph, z: NodeId, y: NodeId) -> Optional[Path]:
    """Shortest discriminating path <X, ..., W, Z, Y> for ``z``.

    Every node strictly between X and Z is a collider on the path and a
    parent of Y; X is not adjacent to Y. The search runs breadth first from
    Z, so the path with the fewest colliders is returned.
    """
    if not graph.adjacent(z, y):
        return None
    visited = {z, y}
    queue = deque()
    for w in graph.neighbors(z):
        if w not in visited and graph.mark(w, z) is EndMark.ARROW and graph.is_directed(w, y):
            queue.append([z, w])
    while queue:
        chain = queue.popleft()
        last = chain[-1]
        visited.add(last)
        for d in graph.neighbors(last):
            if d in chain or d == y or graph.mark(last, d) is not EndMark.ARROW:
                continue
            if not graph.adjacent(d, y):
                return Path(tuple(reversed(chain + [d])) + (y,))
            if d not in visited and graph.is_directed(d, y) and graph.mark(d, last) is EndMark.ARROW:
                queue.append(chain + [d])
    return None


def find_uncovered_pd_path(
    graph: MixedGraph,
    source: NodeId,
    target: NodeId,
    first: Optional[NodeId] = None,
) -> Optional[Path]:
    """Uncovered potentially directed path from ``source`` to ``target``.

    No edge V_i *-* V_i+1 carries an arrowhead at V_i or a tail at V_i+1,
    and every consecutive triple is unshielded. ``first`` pins the node after
    ``source``; a single edge qualifies when ``first`` is the target.
    """
    return _search(graph, source, target, _potentially_directed, first)


def find_uncovered_circle_path(
    graph: MixedGraph, edge: Tuple[NodeId, NodeId]
) -> Optional[Path]:
    """Uncovered circle path <A, C, ..., D, B> closing the circle edge A o-o B.

    A must not be adjacent to D, and B must not be adjacent to C.
    """
    a, b = edge

    def closes(path: List[NodeId]) -> bool:
        return (
            len(path) >= 4
            and not graph.adjacent(a, path[-2])
            and not graph.adjacent(b, path[1])
        )

    for c in graph.neighbors(a):
        if c == b or graph.adjacent(b, c) or not _circle(graph, a, c):
            continue
        found = _search(graph, a, b, _circle, c, closes)
        if found is not None:
            return found
    return None


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _potentially_directed(graph: MixedGraph, a: NodeId, b: NodeId) -> bool:
    return graph.mark(a, b) is not EndMark.ARROW and graph.mark(b, a) is not EndMark.TAIL


def _circle(graph: MixedGraph, a: NodeId, b: NodeId) -> bool:
    return graph.mark(a, b) is EndMark.CIRCLE and graph.mark(b, a) is EndMark.CIRCLE


def _search(
    graph: MixedGraph,
    source: NodeId,
    target: NodeId,
    step_ok: StepCheck,
    first: Optional[NodeId] = None,
    accept: Optional[Callable[[List[NodeId]], bool]] = None,
) -> Optional[Path]:
    """Depth-first search over simple uncovered paths, neighbours in index order."""
    starts = graph.neighbors(source) if first is None else (first,)
    for start in starts:
        if not graph.adjacent(source, start) or not step_ok(graph, source, start):
            continue
        stack = [[source, start]]
        while stack:
            path = stack.pop()
            last = path[-1]
            if last == target:
                if accept is None or accept(path):
                    return Path(tuple(path))
                continue
            for nxt in reversed(graph.neighbors(last)):
                if nxt in path or graph.adjacent(path[-2], nxt):
                    continue
                if step_ok(graph, last, nxt):
                    stack.append(path + [nxt])
    return None
