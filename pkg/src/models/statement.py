"""Causal atoms, canonical statements and their derivation traces"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Iterator, List, Optional, Tuple, Union

from src.errors import InvalidArgumentError
from src.models.ci_fact import CiFact
from src.models.graph import NodeId


class SelectionMarker(Enum):
    """Aggregate target standing for "some selection node"."""

    S = "S"

    def __str__(self) -> str:
        return self.value


SELECTION = SelectionMarker.S

Target = Union[NodeId, SelectionMarker]


def target_sort_key(target: Target) -> Tuple[int, int]:
    """Nodes by index, the selection marker last."""
    if isinstance(target, SelectionMarker):
        return 1, 0
    return 0, target.index


def format_target(target: Target) -> str:
    return str(target)


class Verdict(Enum):
    ESTABLISHED = "established"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class CausalAtom:
    """``source => target``: a directed path from source to the target (or to selection)."""

    source: NodeId
    target: Target

    def __post_init__(self):
        if self.source == self.target:
            raise InvalidArgumentError(f"atom {self.source} => {self.target} is reflexive")

    @property
    def is_selection(self) -> bool:
        return isinstance(self.target, SelectionMarker)

    def __str__(self) -> str:
        return f"{self.source} => {format_target(self.target)}"


class StepKind(Enum):
    MINIMAL_INDEPENDENCE = "minimal-independence"
    DESTROYER_DEPENDENCE = "destroyer-dependence"
    INFERRED_BLOCKING = "inferred-blocking"
    PREMISE = "premise"
    SUBSTITUTE = "substitute"
    REDUCE_IRREFLEXIVE = "reduce-irreflexive"
    REDUCE_ACYCLIC = "reduce-acyclic"
    REDUCE_TRANSITIVE = "reduce-transitive"
    REDUCE_ELIMINATE = "reduce-eliminate"


LEAF_KINDS = frozenset(
    {
        StepKind.MINIMAL_INDEPENDENCE,
        StepKind.DESTROYER_DEPENDENCE,
        StepKind.INFERRED_BLOCKING,
        StepKind.PREMISE,
    }
)


@dataclass(frozen=True, eq=False)
class DerivationTrace:
    """One inference step; premises point at earlier steps.

    Traces form a DAG: a leaf step shared by several statements (one per
    fact, or per fact and destroyer) is the same object everywhere.
    """

    step: StepKind
    conclusion: str
    premises: Tuple["DerivationTrace", ...] = ()
    fact: Optional[CiFact] = None
    destroyer: Optional[NodeId] = None
    blocking: Optional[Tuple[NodeId, NodeId, NodeId]] = None

    @property
    def is_leaf(self) -> bool:
        return not self.premises

    def walk(self) -> Iterator["DerivationTrace"]:
        """Every step reachable from this one, each once, premises first."""
        seen = set()
        stack: List[Tuple[DerivationTrace, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                yield node
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for premise in reversed(node.premises):
                if id(premise) not in seen:
                    stack.append((premise, False))

    def leaves(self) -> List["DerivationTrace"]:
        return [step for step in self.walk() if step.is_leaf]

    def __str__(self) -> str:
        return f"[{self.step.value}] {self.conclusion}"


@dataclass(frozen=True)
class CausalStatement:
    """Either a negative atom or a disjunction with one subject.

    A disjunction reads ``subject => t1 or subject => t2 ... or subject => S``.
    A disjunction with a single term is an established fact.
    """

    subject: NodeId
    targets: FrozenSet[NodeId]
    selection: bool
    negative: bool = False
    trace: Optional[DerivationTrace] = field(
        default=None, compare=False, hash=False, repr=False
    )

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(self.targets))
        if self.subject in self.targets:
            raise InvalidArgumentError(f"statement on {self.subject} targets itself")
        n_terms = len(self.targets) + int(self.selection)
        if self.negative and n_terms != 1:
            raise InvalidArgumentError("a negative statement holds exactly one atom")
        if n_terms == 0:
            raise InvalidArgumentError(f"empty disjunction on {self.subject}")

    @classmethod
    def negation(cls, atom: CausalAtom, trace: DerivationTrace = None) -> "CausalStatement":
        if atom.is_selection:
            return cls(atom.source, frozenset(), True, True, trace)
        return cls(atom.source, frozenset({atom.target}), False, True, trace)

    @classmethod
    def disjunction(
        cls,
        subject: NodeId,
        targets,
        selection: bool,
        trace: DerivationTrace = None,
    ) -> "CausalStatement":
        return cls(subject, frozenset(targets), selection, False, trace)

    @property
    def terms(self) -> FrozenSet[Target]:
        if self.selection:
            return self.targets | {SELECTION}
        return self.targets

    @property
    def atoms(self) -> Tuple[CausalAtom, ...]:
        return tuple(
            CausalAtom(self.subject, t) for t in sorted(self.terms, key=target_sort_key)
        )

    @property
    def atom(self) -> CausalAtom:
        """The single atom of a negation or established fact."""
        if len(self.terms) != 1:
            raise InvalidArgumentError(f"{self} has more than one term")
        return self.atoms[0]

    @property
    def is_fact(self) -> bool:
        return not self.negative and len(self.terms) == 1

    def with_trace(self, trace: DerivationTrace) -> "CausalStatement":
        return replace(self, trace=trace)

    def __str__(self) -> str:
        if self.negative:
            return f"neg {self.atom}"
        if self.is_fact:
            return f"fact {self.atom}"
        nodes = ",".join(t.label for t in sorted(self.targets))
        text = f"disj {self.subject} => {{{nodes}}}"
        if self.selection:
            text += " + S"
        return text
