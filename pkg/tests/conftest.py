"""Shared fixtures"""
import pytest

from src.fixtures import load_fixture
from src.graphs.text_format import parse_graph


@pytest.fixture
def y_structure():
    """X -> Z <- U, Z -> Y"""
    return load_fixture("y_structure")


@pytest.fixture
def diamond():
    return load_fixture("diamond_r9")


@pytest.fixture
def chain():
    return parse_graph("node A\nnode B\nnode C\nedge A -> B\nedge B -> C\n")


@pytest.fixture
def collider():
    return parse_graph("node A\nnode B\nnode C\nedge A -> B\nedge C -> B\n")


@pytest.fixture
def confounded():
    """A <- L -> B with L latent"""
    return parse_graph("node A\nnode B\nlatent L\nedge L -> A\nedge L -> B\n")


@pytest.fixture
def selected():
    """A -> S <- B with S a selection node"""
    return parse_graph("node A\nnode B\nselection S\nedge A -> S\nedge B -> S\n")
