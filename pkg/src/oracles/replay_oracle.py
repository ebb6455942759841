"""Oracle that answers from a recorded fact log"""
from typing import Dict, Iterable, Optional, Sequence, Tuple

from src.errors import NotFoundError
from src.models.ci_fact import CiFact, CiQuery
from src.models.graph import NodeId
from src.oracles.base_oracle import IndependenceOracle
from src.oracles.fact_log import FactLog


class ReplayOracle(IndependenceOracle):
    """Answers recorded queries only.

    Each independence contributes its own query, and each of its destroyers
    contributes a dependence on z plus that destroyer.
    """

    def __init__(
        self,
        facts: Iterable[CiFact],
        observed: Optional[Sequence[NodeId]] = None,
        selection_sinks: bool = True,
    ):
        self.facts = tuple(facts)
        self._selection_sinks = selection_sinks
        self._answers: Dict[tuple, bool] = {}
        nodes = set(observed or ())
        for fact in self.facts:
            nodes |= fact.query.nodes | fact.witness_destroyers
            self._answers[fact.query.key] = fact.independent
            for w in fact.witness_destroyers:
                self._answers[CiQuery(fact.x, fact.y, fact.z | {w}).key] = False
        self._observed = tuple(sorted(nodes))

    @classmethod
    def from_log(cls, log: FactLog) -> "ReplayOracle":
        return cls(log.facts, log.observed, log.selection_sinks)

    @property
    def observed(self) -> Tuple[NodeId, ...]:
        return self._observed

    @property
    def selection_sinks(self) -> bool:
        return self._selection_sinks

    def source_name(self) -> str:
        return f"replay of {len(self.facts)} recorded facts"

    def is_independent(self, query: CiQuery) -> bool:
        self.check_query(query)
        try:
            return self._answers[query.key]
        except KeyError:
            raise NotFoundError(f"query {query} was not recorded") from None


def replay_oracle(facts: Iterable[CiFact], observed: Optional[Sequence[NodeId]] = None) -> ReplayOracle:
    return ReplayOracle(facts, observed)
