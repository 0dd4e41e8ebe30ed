"""Constraint-guided enumeration of clause mutants."""

from .dsl import DSL, Production, build_dsl, tiny_dsl
from .encoding import (
    BOUND, FL, REPAIR, SEMI, UNBOUND, CompletedTree, EncodedClause, Node, changed_paths,
    complete_ast, decode, decode_clause, default_caps, dump_constraints, encode,
)
from .search import (
    FL_BUDGET, REPAIR_BUDGET, AssignmentSearch, Mutant, MutantStream, enumerate_mutants,
)

__all__ = [
    "DSL", "Production", "build_dsl", "tiny_dsl", "BOUND", "SEMI", "UNBOUND", "FL", "REPAIR",
    "CompletedTree", "EncodedClause", "Node", "changed_paths", "complete_ast", "decode",
    "decode_clause", "default_caps", "dump_constraints", "encode", "FL_BUDGET", "REPAIR_BUDGET",
    "AssignmentSearch", "Mutant", "MutantStream", "enumerate_mutants",
]
