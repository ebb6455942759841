"""Conditional-independence queries and recorded facts"""
from dataclasses import dataclass, field, replace
from typing import FrozenSet, Iterable, Tuple

from src.errors import InvalidArgumentError
from src.models.graph import NodeId


def _labels(nodes: Iterable[NodeId]) -> str:
    return ",".join(n.label for n in sorted(nodes))


@dataclass(frozen=True)
class CiQuery:
    """Is x independent of y given z?"""

    x: NodeId
    y: NodeId
    z: FrozenSet[NodeId] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "z", frozenset(self.z))
        if self.x == self.y:
            raise InvalidArgumentError(f"query needs two distinct nodes, got {self.x} twice")
        if self.x in self.z or self.y in self.z:
            raise InvalidArgumentError(f"conditioning set of {self} contains an endpoint")

    @property
    def key(self) -> Tuple[NodeId, NodeId, FrozenSet[NodeId]]:
        """Order-free identity: (x, y, z) and (y, x, z) share a key."""
        a, b = sorted((self.x, self.y))
        return a, b, self.z

    @property
    def nodes(self) -> FrozenSet[NodeId]:
        return self.z | {self.x, self.y}

    def __str__(self) -> str:
        return f"{self.x} {self.y} | {_labels(self.z)}".rstrip()


@dataclass(frozen=True)
class CiFact:
    """A recorded oracle answer.

    Fields:
        query: The (x, y, z) triple asked.
        independent: The oracle's answer.
        minimal: Set only after verifying that no strict subset of z separates.
        witness_destroyers: Nodes W with x dependent on y given z plus W.
    """

    query: CiQuery
    independent: bool
    minimal: bool = False
    witness_destroyers: FrozenSet[NodeId] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "witness_destroyers", frozenset(self.witness_destroyers))
        if self.minimal and not self.independent:
            raise InvalidArgumentError(f"dependence {self.query} cannot be minimal")
        if self.witness_destroyers & self.query.nodes:
            raise InvalidArgumentError(
                f"destroyers of {self.query} overlap the query nodes"
            )

    @property
    def x(self) -> NodeId:
        return self.query.x

    @property
    def y(self) -> NodeId:
        return self.query.y

    @property
    def z(self) -> FrozenSet[NodeId]:
        return self.query.z

    @property
    def pair(self) -> FrozenSet[NodeId]:
        return frozenset((self.query.x, self.query.y))

    def with_destroyers(self, destroyers: Iterable[NodeId]) -> "CiFact":
        return replace(self, witness_destroyers=frozenset(destroyers))

    def __str__(self) -> str:
        if not self.independent:
            return f"dep {self.query}"
        text = f"indep {self.query}"
        if self.minimal:
            text += " minimal"
        if self.witness_destroyers:
            text += f" destroyers={_labels(self.witness_destroyers)}"
        return text
