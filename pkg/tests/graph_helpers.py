"""Hypothesis strategies and small helpers shared by the graph tests"""
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from src.generator.random_dag import DagSpec, random_dag
from src.graphs.text_format import format_edge

PROPERTY_SETTINGS = settings(
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)


@st.composite
def small_dags(draw, max_observed: int = 5, max_latent: int = 2, max_selection: int = 1):
    """Random DAGs small enough for exhaustive checks."""
    spec = DagSpec(
        n_observed=draw(st.integers(2, max_observed)),
        n_latent=draw(st.integers(0, max_latent)),
        n_selection=draw(st.integers(0, max_selection)),
        edge_probability=draw(st.sampled_from([0.2, 0.35, 0.5])),
    )
    return random_dag(spec, draw(st.integers(0, 100_000)))


def edge_text(graph, a: str, b: str) -> str:
    """``A o> B`` for the edge between two labelled nodes of a mixed graph."""
    x, y = graph.node(a), graph.node(b)
    return format_edge(x, y, graph.mark(x, y), graph.mark(y, x))


def labels(nodes):
    return [n.label for n in nodes]
