"""Memoizing oracle wrapper that also counts underlying calls"""
import logging
import threading
from typing import Dict, Tuple

from src.models.ci_fact import CiQuery
from src.models.graph import NodeId
from src.oracles.base_oracle import IndependenceOracle

logger = logging.getLogger(__name__)


class CachingOracle(IndependenceOracle):
    """Get-or-compute cache keyed on the order-free query identity.

    The inner oracle runs outside the lock. Two threads missing on the same
    key may both compute it; the first stored answer wins and
    ``query_count`` counts distinct stored queries.
    """

    def __init__(self, inner: IndependenceOracle):
        self.inner = inner
        self._answers: Dict[tuple, bool] = {}
        self._lock = threading.Lock()
        self.query_count = 0
        self.hit_count = 0

    @property
    def observed(self) -> Tuple[NodeId, ...]:
        return self.inner.observed

    @property
    def selection_sinks(self) -> bool:
        return self.inner.selection_sinks

    def source_name(self) -> str:
        return f"cached {self.inner.source_name()}"

    def is_independent(self, query: CiQuery) -> bool:
        key = query.key
        with self._lock:
            if key in self._answers:
                self.hit_count += 1
                return self._answers[key]
        answer = self.inner.is_independent(query)
        with self._lock:
            if key in self._answers:
                self.hit_count += 1
                return self._answers[key]
            self._answers[key] = answer
            self.query_count += 1
        return answer

    def recorded(self) -> Dict[tuple, bool]:
        with self._lock:
            return dict(self._answers)


def query_cache(oracle: IndependenceOracle) -> CachingOracle:
    return CachingOracle(oracle)
