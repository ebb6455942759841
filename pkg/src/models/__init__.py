"""Data models package"""
from src.models.ci_fact import CiFact, CiQuery
from src.models.graph import CausalDag, EndMark, MixedGraph, NodeId, NodeRole, Path
from src.models.statement import (
    SELECTION,
    CausalAtom,
    CausalStatement,
    DerivationTrace,
    SelectionMarker,
    StepKind,
    Verdict,
)

__all__ = [
    "CausalAtom",
    "CausalDag",
    "CausalStatement",
    "CiFact",
    "CiQuery",
    "DerivationTrace",
    "EndMark",
    "MixedGraph",
    "NodeId",
    "NodeRole",
    "Path",
    "SELECTION",
    "SelectionMarker",
    "StepKind",
    "Verdict",
]
