import pytest

from prodbg.metrics import program_metrics
from prodbg.parser import parse_program


def test_family(family):
    m = program_metrics(family)
    assert m.clause_count == 3 and m.predicate_count == 2
    assert m.avg_clause_length == pytest.approx(5 / 3)
    assert m.clauses_per_predicate == {"parent/2": 2, "grandparent/2": 1}
    assert m.clauses_per_predicate_mean == 1.5


def test_duplicate(buggy_duplicate):
    m = program_metrics(buggy_duplicate)
    assert m.clauses_per_predicate == {"duplicate/2": 2}
    # [H|T] inside the head is two levels below the head term
    assert m.max_nesting_depth == 3


def test_empty():
    m = program_metrics(parse_program(""))
    assert (m.clause_count, m.predicate_count, m.avg_clause_length, m.max_nesting_depth) == (0, 0, 0.0, 0)
    assert m.clauses_per_predicate == {}


def test_json_keys(family):
    assert set(program_metrics(family).to_json()) == {
        "clause_count", "predicate_count", "avg_clause_length", "clauses_per_predicate",
        "clauses_per_predicate_mean", "max_nesting_depth"}
