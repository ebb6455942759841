"""Independence oracles and the minimal-independence search"""
from src.oracles.base_oracle import IndependenceOracle
from src.oracles.caching_oracle import CachingOracle, query_cache
from src.oracles.dag_oracle import DagOracle, dag_oracle
from src.oracles.fact_log import FactLog, format_fact_log, parse_fact_log
from src.oracles.replay_oracle import ReplayOracle, replay_oracle
from src.oracles.search import (
    find_destroyers,
    find_minimal_independence,
    record_destroyers,
    verify_minimal,
)

__all__ = [
    "CachingOracle",
    "DagOracle",
    "FactLog",
    "IndependenceOracle",
    "ReplayOracle",
    "dag_oracle",
    "find_destroyers",
    "find_minimal_independence",
    "format_fact_log",
    "parse_fact_log",
    "query_cache",
    "record_destroyers",
    "replay_oracle",
    "verify_minimal",
]
