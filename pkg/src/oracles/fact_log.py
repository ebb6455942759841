"""Line-oriented CiFact log, written by runs and read back for replay.

Format::

    # observed A,B,C,D
    # complete
    # selection-children
    indep A C | B minimal destroyers=D
    dep A D |

``dep X Y | Z,W`` lines whose set is an earlier ``indep X Y | Z`` set plus
one node are folded into that fact's destroyers. `# selection-children` marks
a source whose selection variables may have children.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from src.errors import FactLogParseError, InvalidArgumentError
from src.models.ci_fact import CiFact, CiQuery
from src.models.graph import NodeId

OBSERVED_HEADER = "# observed"
COMPLETE_HEADER = "# complete"
SELECTION_CHILDREN_HEADER = "# selection-children"


@dataclass(frozen=True)
class FactLog:
    """Parsed log contents.

    Fields:
        observed: Nodes in header order, or first-appearance order without one.
        facts: Independences (with folded destroyers) then unfolded dependences.
        complete: The log holds the search result of every observed pair.
        selection_sinks: No selection variable of the source has children.
    """

    observed: Tuple[NodeId, ...]
    facts: Tuple[CiFact, ...] = field(default_factory=tuple)
    complete: bool = False
    selection_sinks: bool = True

    @property
    def independences(self) -> List[CiFact]:
        return [f for f in self.facts if f.independent]


def format_fact_log(
    facts: Sequence[CiFact],
    observed: Optional[Sequence[NodeId]] = None,
    complete: bool = False,
    selection_sinks: bool = True,
) -> str:
    lines = []
    if observed is not None:
        lines.append(f"{OBSERVED_HEADER} " + ",".join(n.label for n in observed))
    if complete:
        lines.append(COMPLETE_HEADER)
    if not selection_sinks:
        lines.append(SELECTION_CHILDREN_HEADER)
    lines.extend(str(fact) for fact in facts)
    return "\n".join(lines) + "\n"


def parse_fact_log(text: str) -> FactLog:
    """Parse a fact log.

    Raises:
        FactLogParseError: Malformed line, unknown node after an observed
            header, or an invalid query, with the line number.
    """
    nodes: Dict[str, NodeId] = {}
    fixed = False
    complete = False
    selection_sinks = True
    independences: List[CiFact] = []
    dependences: List[Tuple[CiFact, int]] = []

    def lookup(label: str, number: int) -> NodeId:
        if label not in nodes:
            if fixed:
                raise FactLogParseError(f"node {label!r} is not in the observed header", number)
            nodes[label] = NodeId(len(nodes), label)
        return nodes[label]

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(OBSERVED_HEADER):
            if nodes:
                raise FactLogParseError("observed header must come first", number)
            labels = [s for s in line[len(OBSERVED_HEADER):].strip().split(",") if s]
            for label in labels:
                lookup(label, number)
            fixed = True
            continue
        if line == COMPLETE_HEADER:
            complete = True
            continue
        if line == SELECTION_CHILDREN_HEADER:
            selection_sinks = False
            continue
        if line.startswith("#"):
            continue
        fact = _parse_fact_line(line, number, lookup)
        if fact.independent:
            independences.append(fact)
        else:
            dependences.append((fact, number))

    unfolded = []
    for dep, number in dependences:
        target = _folding_target(independences, dep)
        if target is None:
            unfolded.append(dep)
            continue
        index, w = target
        base = independences[index]
        independences[index] = base.with_destroyers(base.witness_destroyers | {w})

    observed = tuple(sorted(nodes.values()))
    return FactLog(observed, tuple(independences + unfolded), complete, selection_sinks)


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


def _parse_fact_line(line: str, number: int, lookup) -> CiFact:
    head, sep, tail = line.partition("|")
    if not sep:
        raise FactLogParseError("expected '|' between the pair and the conditioning set", number)
    words = head.split()
    if len(words) != 3 or words[0] not in ("indep", "dep"):
        raise FactLogParseError("expected 'indep X Y | ...' or 'dep X Y | ...'", number)
    kind, a, b = words
    x, y = lookup(a, number), lookup(b, number)

    minimal = False
    destroyers = frozenset()
    z_labels: List[str] = []
    for token in tail.split():
        if token == "minimal":
            minimal = True
        elif token.startswith("destroyers="):
            labels = [s for s in token[len("destroyers="):].split(",") if s]
            destroyers = frozenset(lookup(s, number) for s in labels)
        elif not z_labels and not minimal and not destroyers:
            z_labels = [s for s in token.split(",") if s]
        else:
            raise FactLogParseError(f"unexpected token {token!r}", number)

    z = frozenset(lookup(s, number) for s in z_labels)
    try:
        return CiFact(CiQuery(x, y, z), kind == "indep", minimal, destroyers)
    except InvalidArgumentError as e:
        raise FactLogParseError(str(e), number) from e


def _folding_target(independences: List[CiFact], dep: CiFact):
    for index, fact in enumerate(independences):
        if fact.pair != dep.pair:
            continue
        extra = dep.z - fact.z
        if fact.z < dep.z and len(extra) == 1:
            return index, next(iter(extra))
    return None
