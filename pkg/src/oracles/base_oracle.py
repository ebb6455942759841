"""Abstract base class for all independence oracles"""
from abc import ABC, abstractmethod
from typing import Iterable, Tuple

from src.errors import InvalidArgumentError
from src.models.ci_fact import CiQuery
from src.models.graph import NodeId


class IndependenceOracle(ABC):
    """All oracles must extend this class.

    Answers must be deterministic and symmetric in x and y, and safe to
    request from several threads once the oracle is constructed.
    """

    @abstractmethod
    def is_independent(self, query: CiQuery) -> bool:
        """Answer one conditional-independence query."""
        ...

    @property
    @abstractmethod
    def observed(self) -> Tuple[NodeId, ...]:
        """The variables queries may mention, sorted by index."""
        ...

    @abstractmethod
    def source_name(self) -> str:
        """Human-readable name for display in logs."""
        ...

    @property
    def selection_sinks(self) -> bool:
        """False when a selection variable may have children.

        Marginal independences only refute causation between their endpoints
        when selection variables are sinks.
        """
        return True

    def independent(self, x: NodeId, y: NodeId, z: Iterable[NodeId] = ()) -> bool:
        return self.is_independent(CiQuery(x, y, frozenset(z)))

    def check_query(self, query: CiQuery) -> None:
        """Reject queries that mention unobserved nodes.

        Raises:
            InvalidArgumentError: Some query node is not observed.
        """
        unknown = query.nodes - set(self.observed)
        if unknown:
            raise InvalidArgumentError(
                f"query {query} mentions unobserved nodes "
                + ",".join(sorted(n.label for n in unknown))
            )
