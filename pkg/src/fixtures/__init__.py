"""Bundled DAG fixtures that trigger specific orientation rules"""
from pathlib import Path
from typing import List

from src.errors import NotFoundError
from src.graphs.text_format import parse_graph
from src.models.graph import CausalDag

FIXTURE_DIR = Path(__file__).parent
SUFFIX = ".graph"


def list_fixtures() -> List[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob(f"*{SUFFIX}"))


def fixture_path(name: str) -> Path:
    path = FIXTURE_DIR / f"{name}{SUFFIX}"
    if not path.is_file():
        raise NotFoundError(f"unknown fixture {name!r}; available: {', '.join(list_fixtures())}")
    return path


def load_fixture(name: str) -> CausalDag:
    """Parse a bundled fixture by name.

    Raises:
        NotFoundError: No fixture of that name ships with the package.
    """
    return parse_graph(fixture_path(name).read_text(encoding="utf-8"))


__all__ = ["list_fixtures", "fixture_path", "load_fixture"]
