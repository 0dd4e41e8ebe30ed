"""Prolog execution engine: unification, SLD resolution and tracing."""

from .arith import PrologError
from .bindings import Bindings, eval_arith, unify
from .machine import (
    FAILURE, RESOURCE_LIMIT, RUNTIME_ERROR, SUCCESS, ExecLimits, Machine,
    QueryOutcome, TraceEvent, format_trace, solve,
)

__all__ = [
    "Bindings", "ExecLimits", "Machine", "PrologError", "QueryOutcome", "TraceEvent",
    "SUCCESS", "FAILURE", "RESOURCE_LIMIT", "RUNTIME_ERROR",
    "eval_arith", "format_trace", "solve", "unify",
]
