"""Causal statements and their inference closure"""
from src.logic.statement_list import StatementList
from src.logic.trace import format_trace, trace_to_dict

__all__ = ["StatementList", "format_trace", "trace_to_dict"]
