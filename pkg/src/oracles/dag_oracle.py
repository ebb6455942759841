"""Exact oracle backed by d-separation in a causal DAG"""
from typing import Tuple

from src.graphs.separation import d_separated
from src.models.ci_fact import CiQuery
from src.models.graph import CausalDag, NodeId
from src.oracles.base_oracle import IndependenceOracle


class DagOracle(IndependenceOracle):
    """Answers x _||_ y | z as d-separation given z plus every selection node."""

    def __init__(self, dag: CausalDag):
        self.dag = dag
        self._selection = frozenset(dag.selection)
        self._selection_sinks = not any(dag.children(s) for s in dag.selection)

    @property
    def observed(self) -> Tuple[NodeId, ...]:
        return self.dag.observed

    @property
    def selection_sinks(self) -> bool:
        return self._selection_sinks

    def source_name(self) -> str:
        return f"d-separation oracle ({len(self.dag.nodes)} nodes)"

    def is_independent(self, query: CiQuery) -> bool:
        self.check_query(query)
        return d_separated(self.dag, query.x, query.y, query.z | self._selection)


def dag_oracle(dag: CausalDag) -> DagOracle:
    return DagOracle(dag)
