"""Size and shape metrics of a program."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .terms import Program, depth


@dataclass(frozen=True)
class ProgramMetrics:
    clause_count: int
    predicate_count: int
    avg_clause_length: float
    clauses_per_predicate: dict
    clauses_per_predicate_mean: float
    max_nesting_depth: int

    def to_json(self) -> dict:
        return asdict(self)


def program_metrics(p: Program) -> ProgramMetrics:
    """Clause length counts the head plus each body goal."""
    n = len(p.clauses)
    if n == 0:
        return ProgramMetrics(0, 0, 0.0, {}, 0.0, 0)
    per_pred = {f"{name}/{arity}": len(ids) for (name, arity), ids in p.predicate_index.items()}
    lengths = [1 + len(c.body) for c in p.clauses]
    nesting = max(depth(t) for c in p.clauses for t in (c.head, *c.body))
    return ProgramMetrics(n, len(per_pred), sum(lengths) / n, per_pred,
                          sum(per_pred.values()) / len(per_pred), nesting)
