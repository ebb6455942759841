"""Causal discovery: the logical pipeline and the FCI reference"""
from src.discovery.fci import FciResult, RuleApplication, SepsetTable, rule_coverage, run_fci
from src.discovery.loci import (
    LociConfig,
    LociResult,
    derivation_of,
    find_inferred_blocking_nodes,
    reconstruct_pag,
    run,
    run_from_facts,
    summary_dict,
)

__all__ = [
    "FciResult",
    "LociConfig",
    "LociResult",
    "RuleApplication",
    "SepsetTable",
    "derivation_of",
    "find_inferred_blocking_nodes",
    "reconstruct_pag",
    "rule_coverage",
    "run",
    "run_fci",
    "run_from_facts",
    "summary_dict",
]
