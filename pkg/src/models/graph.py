"""Graph value types: nodes, end marks, causal DAGs and mixed graphs"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from src.errors import InvalidArgumentError, NotFoundError


@dataclass(frozen=True, order=True)
class NodeId:
    """A graph vertex. Ordering follows the index."""

    index: int
    label: str

    def __str__(self) -> str:
        return self.label


class EndMark(Enum):
    TAIL = "-"
    ARROW = ">"
    CIRCLE = "o"


class NodeRole(Enum):
    OBSERVED = "observed"
    LATENT = "latent"
    SELECTION = "selection"


Edge = Tuple[NodeId, NodeId, EndMark, EndMark]


def _check_nodes(nodes: Sequence[NodeId]) -> Tuple[NodeId, ...]:
    ordered = tuple(sorted(nodes))
    if [n.index for n in ordered] != list(range(len(ordered))):
        raise InvalidArgumentError(
            "node indices must be dense 0..n-1, got "
            + ", ".join(str(n.index) for n in ordered)
        )
    labels = [n.label for n in ordered]
    if len(set(labels)) != len(labels):
        raise InvalidArgumentError("duplicate node label in %s" % labels)
    return ordered


class CausalDag:
    """Ground-truth causal DAG over observed, latent and selection nodes.

    Immutable after construction. Observed nodes always carry the lowest
    indices when built through ``build``, so the observed projection keeps
    the same NodeIds.
    """

    def __init__(
        self,
        nodes: Sequence[NodeId],
        roles: Dict[NodeId, NodeRole],
        edges: Iterable[Tuple[NodeId, NodeId]],
    ):
        self._nodes = _check_nodes(nodes)
        if set(roles) != set(self._nodes):
            raise InvalidArgumentError("every node needs exactly one role")
        self._roles = dict(roles)

        graph = nx.DiGraph()
        graph.add_nodes_from(self._nodes)
        node_set = set(self._nodes)
        for parent, child in edges:
            if parent not in node_set or child not in node_set:
                raise InvalidArgumentError(f"edge {parent} -> {child} uses an unknown node")
            if parent == child:
                raise InvalidArgumentError(f"self-loop on {parent}")
            graph.add_edge(parent, child)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise InvalidArgumentError(
                "graph has a directed cycle: "
                + " -> ".join(str(a) for a, _ in cycle)
            )
        self._graph = nx.freeze(graph)
        self._by_label = {n.label: n for n in self._nodes}

    @classmethod
    def build(
        cls,
        observed: Sequence[str],
        latent: Sequence[str] = (),
        selection: Sequence[str] = (),
        edges: Iterable[Tuple[str, str]] = (),
    ) -> "CausalDag":
        """Build a DAG from labels; indices go observed, latent, selection.

        Raises:
            InvalidArgumentError: Duplicate labels, unknown endpoints or a cycle.
        """
        roles: Dict[NodeId, NodeRole] = {}
        by_label: Dict[str, NodeId] = {}
        groups = (
            (observed, NodeRole.OBSERVED),
            (latent, NodeRole.LATENT),
            (selection, NodeRole.SELECTION),
        )
        for labels, role in groups:
            for label in labels:
                if label in by_label:
                    raise InvalidArgumentError(f"duplicate node label {label!r}")
                node = NodeId(len(by_label), label)
                by_label[label] = node
                roles[node] = role
        pairs = []
        for a, b in edges:
            if a not in by_label or b not in by_label:
                raise InvalidArgumentError(f"edge {a} -> {b} uses an unknown node")
            pairs.append((by_label[a], by_label[b]))
        return cls(list(by_label.values()), roles, pairs)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def nodes(self) -> Tuple[NodeId, ...]:
        return self._nodes

    @property
    def graph(self) -> nx.DiGraph:
        """Frozen networkx view; mutation raises."""
        return self._graph

    @property
    def edges(self) -> FrozenSet[Tuple[NodeId, NodeId]]:
        return frozenset(self._graph.edges())

    @property
    def observed(self) -> Tuple[NodeId, ...]:
        return self._with_role(NodeRole.OBSERVED)

    @property
    def latent(self) -> Tuple[NodeId, ...]:
        return self._with_role(NodeRole.LATENT)

    @property
    def selection(self) -> Tuple[NodeId, ...]:
        return self._with_role(NodeRole.SELECTION)

    def role(self, node: NodeId) -> NodeRole:
        self._require(node)
        return self._roles[node]

    def node(self, label: str) -> NodeId:
        try:
            return self._by_label[label]
        except KeyError:
            raise NotFoundError(f"no node labelled {label!r}") from None

    def parents(self, node: NodeId) -> Tuple[NodeId, ...]:
        self._require(node)
        return tuple(sorted(self._graph.predecessors(node)))

    def children(self, node: NodeId) -> Tuple[NodeId, ...]:
        self._require(node)
        return tuple(sorted(self._graph.successors(node)))

    def has_edge(self, parent: NodeId, child: NodeId) -> bool:
        return self._graph.has_edge(parent, child)

    def __contains__(self, node: object) -> bool:
        return node in self._roles

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalDag):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._roles == other._roles
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self._nodes, self.edges))

    def __repr__(self) -> str:
        return (
            f"CausalDag(observed={[str(n) for n in self.observed]}, "
            f"latent={[str(n) for n in self.latent]}, "
            f"selection={[str(n) for n in self.selection]}, "
            f"edges={len(self._graph.edges())})"
        )

    def to_dict(self) -> dict:
        """Convert to a plain dict representation."""
        return {
            "kind": "dag",
            "nodes": [
                {"label": n.label, "role": self._roles[n].value} for n in self._nodes
            ],
            "edges": [[a.label, b.label] for a, b in sorted(self._graph.edges())],
        }

    def _with_role(self, role: NodeRole) -> Tuple[NodeId, ...]:
        return tuple(n for n in self._nodes if self._roles[n] is role)

    def _require(self, node: NodeId) -> None:
        if node not in self._roles:
            raise InvalidArgumentError(f"{node!r} is not a node of this graph")


class MixedGraph:
    """Graph whose edges carry an end mark at each endpoint (MAGs and PAGs).

    Immutable; ``with_mark`` and ``without_edge`` return modified copies.
    """

    def __init__(self, nodes: Sequence[NodeId], edges: Iterable[Edge] = ()):
        self._nodes = _check_nodes(nodes)
        node_set = set(self._nodes)
        marks: Dict[Tuple[NodeId, NodeId], EndMark] = {}
        for a, b, mark_a, mark_b in edges:
            if a not in node_set or b not in node_set:
                raise InvalidArgumentError(f"edge {a}-{b} uses an unknown node")
            if a == b:
                raise InvalidArgumentError(f"self-edge on {a}")
            if (a, b) in marks:
                raise InvalidArgumentError(f"duplicate edge between {a} and {b}")
            marks[(a, b)] = mark_a
            marks[(b, a)] = mark_b
        self._marks = marks
        self._adj = self._adjacency(self._nodes, marks)
        self._by_label = {n.label: n for n in self._nodes}

    @classmethod
    def _from_marks(
        cls, nodes: Tuple[NodeId, ...], marks: Dict[Tuple[NodeId, NodeId], EndMark]
    ) -> "MixedGraph":
        graph = cls.__new__(cls)
        graph._nodes = nodes
        graph._marks = marks
        graph._adj = cls._adjacency(nodes, marks)
        graph._by_label = {n.label: n for n in nodes}
        return graph

    @staticmethod
    def _adjacency(nodes, marks) -> Dict[NodeId, Tuple[NodeId, ...]]:
        adj: Dict[NodeId, List[NodeId]] = {n: [] for n in nodes}
        for a, b in marks:
            adj[a].append(b)
        return {n: tuple(sorted(others)) for n, others in adj.items()}

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def nodes(self) -> Tuple[NodeId, ...]:
        return self._nodes

    def node(self, label: str) -> NodeId:
        try:
            return self._by_label[label]
        except KeyError:
            raise NotFoundError(f"no node labelled {label!r}") from None

    def adjacent(self, a: NodeId, b: NodeId) -> bool:
        return (a, b) in self._marks

    def mark(self, at: NodeId, other: NodeId) -> EndMark:
        """End mark at ``at`` on the edge between ``at`` and ``other``."""
        try:
            return self._marks[(at, other)]
        except KeyError:
            raise InvalidArgumentError(f"{at} and {other} are not adjacent") from None

    def neighbors(self, node: NodeId) -> Tuple[NodeId, ...]:
        try:
            return self._adj[node]
        except KeyError:
            raise InvalidArgumentError(f"{node!r} is not a node of this graph") from None

    def edges(self) -> List[Edge]:
        """Edges as (a, b, mark_at_a, mark_at_b) with a < b, sorted."""
        return sorted(
            (a, b, m, self._marks[(b, a)])
            for (a, b), m in self._marks.items()
            if a < b
        )

    def is_directed(self, source: NodeId, sink: NodeId) -> bool:
        """True for ``source -> sink``: tail at source, arrowhead at sink."""
        return (
            self._marks.get((source, sink)) is EndMark.TAIL
            and self._marks.get((sink, source)) is EndMark.ARROW
        )

    def skeleton(self) -> FrozenSet[FrozenSet[NodeId]]:
        return frozenset(frozenset(pair) for pair in self._marks)

    @property
    def has_circles(self) -> bool:
        return any(m is EndMark.CIRCLE for m in self._marks.values())

    def with_mark(self, at: NodeId, other: NodeId, mark: EndMark) -> "MixedGraph":
        if (at, other) not in self._marks:
            raise InvalidArgumentError(f"{at} and {other} are not adjacent")
        marks = dict(self._marks)
        marks[(at, other)] = mark
        return MixedGraph._from_marks(self._nodes, marks)

    def without_edge(self, a: NodeId, b: NodeId) -> "MixedGraph":
        marks = {k: v for k, v in self._marks.items() if k not in ((a, b), (b, a))}
        return MixedGraph._from_marks(self._nodes, marks)

    def __contains__(self, node: object) -> bool:
        return node in self._adj

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._marks == other._marks

    def __hash__(self) -> int:
        return hash((self._nodes, frozenset(self._marks.items())))

    def __repr__(self) -> str:
        body = ", ".join(
            f"{a}{ma.value}{mb.value}{b}" for a, b, ma, mb in self.edges()
        )
        return f"MixedGraph([{body}])"

    def to_dict(self) -> dict:
        """Convert to a plain dict representation."""
        return {
            "kind": "mixed",
            "nodes": [{"label": n.label} for n in self._nodes],
            "edges": [
                {"a": a.label, "b": b.label, "mark_a": ma.value, "mark_b": mb.value}
                for a, b, ma, mb in self.edges()
            ],
        }


Graph = Union[CausalDag, MixedGraph]


def mark_on(graph: Graph, at: NodeId, other: NodeId) -> Optional[EndMark]:
    """End mark at ``at`` toward ``other``; DAG edges read as tail/arrow. None if nonadjacent."""
    if isinstance(graph, CausalDag):
        if graph.has_edge(other, at):
            return EndMark.ARROW
        if graph.has_edge(at, other):
            return EndMark.TAIL
        return None
    if not graph.adjacent(at, other):
        return None
    return graph.mark(at, other)


@dataclass(frozen=True)
class Path:
    """A simple path; collider status is relative to a host graph."""

    nodes: Tuple[NodeId, ...]

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidArgumentError(f"path repeats a node: {self}")

    def colliders(self, graph: Graph) -> Tuple[bool, ...]:
        """Collider flag for each interior node, in path order.

        Raises:
            InvalidArgumentError: Consecutive nodes are not adjacent in ``graph``.
        """
        flags = []
        for prev, node, nxt in zip(self.nodes, self.nodes[1:], self.nodes[2:]):
            into_from_prev = mark_on(graph, node, prev)
            into_from_next = mark_on(graph, node, nxt)
            if into_from_prev is None or into_from_next is None:
                raise InvalidArgumentError(f"{self} is not a path of the graph")
            flags.append(
                into_from_prev is EndMark.ARROW and into_from_next is EndMark.ARROW
            )
        return tuple(flags)

    def __len__(self) -> int:
        return len(self.nodes)

    def __str__(self) -> str:
        return ",".join(n.label for n in self.nodes)
