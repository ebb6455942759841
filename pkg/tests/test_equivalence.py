"""Tests for Markov equivalence and class enumeration"""
import pytest

from graph_helpers import edge_text
from src.errors import ContractViolationError, InvalidArgumentError, ResourceLimitError
from src.graphs.equivalence import enumerate_equivalent_mags, invariant_marks, markov_equivalent
from src.graphs.projection import project_to_mag
from src.graphs.separation import is_ancestral
from src.graphs.text_format import parse_graph


def mixed(*edges, nodes="ABC"):
    text = "graph mixed\n" + "".join(f"node {n}\n" for n in nodes)
    return parse_graph(text + "".join(f"edge {e}\n" for e in edges))


class TestMarkovEquivalent:
    """Query-by-query comparison of MAGs"""

    def test_chain_orientations_equivalent(self):
        assert markov_equivalent(mixed("A -> B", "B -> C"), mixed("A <- B", "B <- C"))
        assert markov_equivalent(mixed("A -> B", "B -> C"), mixed("A -- B", "B -- C"))

    def test_collider_differs_from_chain(self):
        assert not markov_equivalent(mixed("A -> B", "B -> C"), mixed("A -> B", "B <- C"))

    def test_different_nodes_rejected(self):
        with pytest.raises(InvalidArgumentError):
            markov_equivalent(mixed("A -> B", nodes="AB"), mixed("A -> B", "B -> C"))

    def test_non_ancestral_rejected(self):
        with pytest.raises(ContractViolationError):
            markov_equivalent(mixed("A o> B", "B -> C"), mixed("A -> B", "B -> C"))


class TestEnumeration:
    """Brute-force class enumeration and invariant marks"""

    def test_members_are_equivalent_and_include_input(self):
        g = mixed("A -> B", "C -> B")
        members = enumerate_equivalent_mags(g)
        assert g in members
        for member in members:
            assert is_ancestral(member)
            assert markov_equivalent(member, g)

    def test_collider_class(self):
        members = enumerate_equivalent_mags(mixed("A -> B", "C -> B"))
        # A and C each may be a tail or an arrowhead: 4 members.
        assert len(members) == 4

    def test_two_node_class(self):
        members = enumerate_equivalent_mags(mixed("A -> B", nodes="AB"))
        assert sorted(edge_text(m, "A", "B") for m in members) == [
            "A -- B",
            "A -> B",
            "A <- B",
            "A <> B",
        ]
        for text in ("A <- B", "A <> B", "A -- B"):
            assert markov_equivalent(mixed(text, nodes="AB"), mixed("A -> B", nodes="AB"))

    def test_invariant_marks_of_single_edge(self):
        pag = invariant_marks(mixed("A -> B", nodes="AB"))
        assert edge_text(pag, "A", "B") == "A oo B"

    def test_invariant_marks_of_collider(self):
        pag = invariant_marks(mixed("A -> B", "C -> B"))
        assert edge_text(pag, "A", "B") == "A o> B"
        assert edge_text(pag, "B", "C") == "B <o C"

    def test_invariant_marks_of_chain_are_circles(self):
        pag = invariant_marks(mixed("A -> B", "B -> C"))
        assert edge_text(pag, "A", "B") == "A oo B"
        assert edge_text(pag, "B", "C") == "B oo C"

    def test_y_structure_keeps_its_tail(self, y_structure):
        pag = invariant_marks(project_to_mag(y_structure))
        assert edge_text(pag, "X", "Z") == "X o> Z"
        assert edge_text(pag, "U", "Z") == "U o> Z"
        assert edge_text(pag, "Z", "Y") == "Z -> Y"

    def test_node_limit(self):
        g = mixed(nodes="ABCDEF")
        with pytest.raises(ResourceLimitError):
            enumerate_equivalent_mags(g)
        assert enumerate_equivalent_mags(g, max_nodes=6) == [g]
