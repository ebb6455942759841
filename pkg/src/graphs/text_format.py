"""Native text format, DOT and JSON for DAGs and mixed graphs.

Native format, one directive per line::

    graph dag            # optional: dag or mixed
    node A
    latent L
    selection S1
    edge L -> A
    edge A o> B          # mixed graphs: <mark at A><mark at B>, marks in - > o

An arrowhead at the first endpoint may also be written ``<`` (``A <> B``).
"""
import json
from pathlib import Path
from typing import Dict, List, Tuple, Union

from src.errors import GraphParseError
from src.models.graph import CausalDag, EndMark, MixedGraph, NodeId, NodeRole

Graph = Union[CausalDag, MixedGraph]

_FIRST_MARKS = {"-": EndMark.TAIL, ">": EndMark.ARROW, "<": EndMark.ARROW, "o": EndMark.CIRCLE}
_SECOND_MARKS = {"-": EndMark.TAIL, ">": EndMark.ARROW, "o": EndMark.CIRCLE}
_FIRST_SYMBOL = {EndMark.TAIL: "-", EndMark.ARROW: "<", EndMark.CIRCLE: "o"}
_SECOND_SYMBOL = {EndMark.TAIL: "-", EndMark.ARROW: ">", EndMark.CIRCLE: "o"}
_DOT_SHAPES = {EndMark.TAIL: "none", EndMark.ARROW: "normal", EndMark.CIRCLE: "odot"}
_ROLE_DIRECTIVES = {"node": NodeRole.OBSERVED, "latent": NodeRole.LATENT, "selection": NodeRole.SELECTION}


def parse_graph(text: str) -> Graph:
    """Parse the native format into a CausalDag or a MixedGraph.

    Without a ``graph`` directive, a file is a DAG when it declares latent or
    selection nodes or when every edge is written ``->``.

    Raises:
        GraphParseError: Unknown directive, bad mark token, undeclared node,
            or a graph invariant violation, with the offending line number.
    """
    kind = None
    declared: List[Tuple[str, NodeRole, int]] = []
    labels: Dict[str, int] = {}
    edges: List[Tuple[str, str, str, int]] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        directive = parts[0]
        if directive == "graph":
            if len(parts) != 2 or parts[1] not in ("dag", "mixed"):
                raise GraphParseError("expected 'graph dag' or 'graph mixed'", number)
            kind = parts[1]
        elif directive in _ROLE_DIRECTIVES:
            if len(parts) != 2:
                raise GraphParseError(f"expected '{directive} <label>'", number)
            if parts[1] in labels:
                raise GraphParseError(f"node {parts[1]!r} declared twice", number)
            labels[parts[1]] = number
            declared.append((parts[1], _ROLE_DIRECTIVES[directive], number))
        elif directive == "edge":
            if len(parts) != 4:
                raise GraphParseError("expected 'edge <a> <marks> <b>'", number)
            _, a, token, b = parts
            for label in (a, b):
                if label not in labels:
                    raise GraphParseError(f"undeclared node {label!r}", number)
            edges.append((a, token, b, number))
        else:
            raise GraphParseError(f"unknown directive {directive!r}", number)

    if kind is None:
        has_roles = any(role is not NodeRole.OBSERVED for _, role, _ in declared)
        kind = "dag" if has_roles or all(tok == "->" for _, tok, _, _ in edges) else "mixed"

    if kind == "dag":
        return _build_dag(declared, edges)
    return _build_mixed(declared, edges)


def format_graph(g: Graph) -> str:
    """Render ``g`` in the native format; ``parse_graph`` inverts it."""
    if isinstance(g, CausalDag):
        lines = ["graph dag"]
        for node in g.nodes:
            directive = {v: k for k, v in _ROLE_DIRECTIVES.items()}[g.role(node)]
            lines.append(f"{directive} {node}")
        lines.extend(f"edge {a} -> {b}" for a, b in sorted(g.edges))
    else:
        lines = ["graph mixed"]
        lines.extend(f"node {node}" for node in g.nodes)
        lines.extend(f"edge {format_edge(a, b, ma, mb)}" for a, b, ma, mb in g.edges())
    return "\n".join(lines) + "\n"


def format_edge(a: NodeId, b: NodeId, mark_a: EndMark, mark_b: EndMark) -> str:
    """``A o> B`` style rendering of one edge."""
    return f"{a} {_FIRST_SYMBOL[mark_a]}{_SECOND_SYMBOL[mark_b]} {b}"


def to_dot(g: Graph, name: str = "G") -> str:
    """Graphviz rendering. Latent nodes are dashed, selection nodes filled."""
    lines = [f"digraph {name} {{"]
    if isinstance(g, CausalDag):
        for node in g.nodes:
            role = g.role(node)
            style = ""
            if role is NodeRole.LATENT:
                style = " [style=dashed]"
            elif role is NodeRole.SELECTION:
                style = " [style=filled, fillcolor=gray]"
            lines.append(f'  "{node}"{style};')
        lines.extend(f'  "{a}" -> "{b}";' for a, b in sorted(g.edges))
    else:
        lines.extend(f'  "{node}";' for node in g.nodes)
        for a, b, ma, mb in g.edges():
            lines.append(
                f'  "{a}" -> "{b}" [dir=both, arrowtail={_DOT_SHAPES[ma]}, '
                f"arrowhead={_DOT_SHAPES[mb]}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: Graph) -> str:
    return json.dumps(g.to_dict(), indent=2, sort_keys=True)


def graph_from_dict(data: dict) -> Graph:
    """Inverse of ``to_dict`` for both graph kinds.

    Raises:
        GraphParseError: Missing keys or unknown values.
    """
    try:
        if data["kind"] == "dag":
            by_role: Dict[str, List[str]] = {"observed": [], "latent": [], "selection": []}
            for entry in data["nodes"]:
                by_role[entry["role"]].append(entry["label"])
            return CausalDag.build(
                by_role["observed"],
                by_role["latent"],
                by_role["selection"],
                [tuple(edge) for edge in data["edges"]],
            )
        nodes = [NodeId(i, entry["label"]) for i, entry in enumerate(data["nodes"])]
        by_label = {n.label: n for n in nodes}
        edges = [
            (
                by_label[e["a"]],
                by_label[e["b"]],
                EndMark(e["mark_a"]),
                EndMark(e["mark_b"]),
            )
            for e in data["edges"]
        ]
        return MixedGraph(nodes, edges)
    except (KeyError, TypeError, ValueError) as e:
        raise GraphParseError(f"malformed graph document: {e}") from e


def load_graph(path: Union[str, Path]) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def save_graph(path: Union[str, Path], g: Graph) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _build_dag(declared, edges) -> CausalDag:
    pairs = []
    for a, token, b, number in edges:
        if token != "->":
            raise GraphParseError(f"DAG edges must be written '->', got {token!r}", number)
        pairs.append((a, b))
    by_role = {role: [label for label, r, _ in declared if r is role] for role in NodeRole}
    try:
        return CausalDag.build(
            by_role[NodeRole.OBSERVED],
            by_role[NodeRole.LATENT],
            by_role[NodeRole.SELECTION],
            pairs,
        )
    except GraphParseError:
        raise
    except ValueError as e:
        raise GraphParseError(str(e), edges[-1][3] if edges else 0) from e


def _build_mixed(declared, edges) -> MixedGraph:
    nodes = {}
    for label, role, number in declared:
        if role is not NodeRole.OBSERVED:
            raise GraphParseError("mixed graphs only declare observed nodes", number)
        nodes[label] = NodeId(len(nodes), label)
    triples = []
    seen = {}
    for a, token, b, number in edges:
        if len(token) != 2 or token[0] not in _FIRST_MARKS or token[1] not in _SECOND_MARKS:
            raise GraphParseError(f"bad mark token {token!r}", number)
        key = frozenset((a, b))
        if a == b:
            raise GraphParseError(f"self-edge on {a!r}", number)
        if key in seen:
            raise GraphParseError(
                f"second edge between {a!r} and {b!r} (first on line {seen[key]})", number
            )
        seen[key] = number
        triples.append((nodes[a], nodes[b], _FIRST_MARKS[token[0]], _SECOND_MARKS[token[1]]))
    return MixedGraph(list(nodes.values()), triples)
