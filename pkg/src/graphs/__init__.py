"""Graph predicates, projection, equivalence and text formats"""
from src.graphs.equivalence import (
    enumerate_equivalent_mags,
    invariant_marks,
    markov_equivalent,
)
from src.graphs.projection import project_to_mag
from src.graphs.separation import (
    ancestors,
    d_separated,
    is_ancestral,
    is_maximal,
    m_separated,
)
from src.graphs.text_format import format_graph, parse_graph, to_dot, to_json

__all__ = [
    "ancestors",
    "d_separated",
    "enumerate_equivalent_mags",
    "format_graph",
    "invariant_marks",
    "is_ancestral",
    "is_maximal",
    "m_separated",
    "markov_equivalent",
    "parse_graph",
    "project_to_mag",
    "to_dot",
    "to_json",
]
