import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodbg.analysis import (
    abstract_hint, clause_diff, edit_count, predicate_call_graph, relevant_predicates,
    transitive_closure,
)
from prodbg.parser import parse_clause, parse_program, parse_query
from prodbg.printer import clause_to_str
from prodbg.terms import Hole, children

BUGGY = "duplicate([H|T], L2) :- duplicate(T, L1), L2 = (H,H,L1)."
FIXED = "duplicate([H|T], L2) :- duplicate(T, L1), L2 = [H,H|L1]."


def test_diff_identical_is_empty():
    c = parse_clause(BUGGY)
    assert clause_diff(c, c) == set()


def test_diff_points_at_rhs():
    assert clause_diff(parse_clause(BUGGY), parse_clause(FIXED)) == {(2, 1)}


def test_diff_head_argument():
    assert clause_diff(parse_clause("duplicate([],[])."), parse_clause("duplicate(_,[]).")) == {(0, 0)}


def test_diff_variable_names_are_literal():
    assert clause_diff(parse_clause("p(X) :- q(X)."), parse_clause("p(Y) :- q(Y).")) == {(0, 0), (1, 0)}


def test_diff_extra_goal():
    assert clause_diff(parse_clause("p :- a."), parse_clause("p :- a, b.")) == {(2,)}


def test_hint_for_running_example():
    hint = abstract_hint(parse_clause(BUGGY), parse_clause(FIXED))
    assert clause_to_str(hint, holes=True) == "duplicate([H|T], L2) :- duplicate(T, L1), L2 = ?."


def test_hint_on_fact():
    hint = abstract_hint(parse_clause("duplicate([],[1])."), parse_clause("duplicate([],[])."))
    assert clause_to_str(hint, holes=True) == "duplicate([], ?)."


def test_hint_confined_to_head():
    hint = abstract_hint(parse_clause("p(a, X) :- q(X)."), parse_clause("p(b, X) :- q(X)."))
    assert clause_to_str(hint, holes=True) == "p(?, X) :- q(X)."


def test_hint_identical_rejected():
    c = parse_clause(BUGGY)
    with pytest.raises(ValueError):
        abstract_hint(c, c)


def test_hint_inserted_goal():
    hint = abstract_hint(parse_clause("p(X) :- q(X), r(X)."), parse_clause("p(X) :- q(X), s(X), r(X)."))
    assert clause_to_str(hint, holes=True) == "p(X) :- q(X), ?, r(X)."


def test_edit_count():
    assert edit_count(parse_clause(BUGGY), parse_clause(BUGGY)) == 0
    assert edit_count(parse_clause("p(a)."), parse_clause("p(b).")) == 1
    assert edit_count(parse_clause("p(a)."), parse_clause("p(a) :- q.")) == 1


def test_call_graph_family(family):
    g = predicate_call_graph(family)
    assert g[("grandparent", 2)] == {("parent", 2)}
    assert g.get(("parent", 2), set()) == set()


def test_call_graph_facts_only():
    g = predicate_call_graph(parse_program("a. b(1)."))
    assert all(not v for v in g.values())


@pytest.mark.parametrize("src, key, expected", [
    ("a :- \\+ b.", ("a", 0), {("b", 0)}),
    ("a :- (b -> c ; d).", ("a", 0), {("b", 0), ("c", 0), ("d", 0)}),
    ("a(L) :- maplist(inc, L, M), msort(M, _).", ("a", 1), {("maplist", 3), ("inc", 2), ("msort", 2)}),
])
def test_call_graph_control(src, key, expected):
    assert predicate_call_graph(parse_program(src))[key] >= expected


def test_closure_examples(family):
    g = predicate_call_graph(family)
    assert transitive_closure(g, {("grandparent", 2)}) == {("grandparent", 2), ("parent", 2)}
    assert transitive_closure(g, set()) == set()
    cyc = {("a", 0): {("b", 0)}, ("b", 0): {("a", 0)}}
    assert transitive_closure(cyc, {("a", 0)}) == {("a", 0), ("b", 0)}


def test_relevant_predicates(family):
    goals = parse_query("grandparent(alice, carol).")
    assert relevant_predicates(family, goals) == {("grandparent", 2), ("parent", 2)}


graphs = st.dictionaries(st.integers(0, 6), st.sets(st.integers(0, 6), max_size=3), max_size=7)


@settings(max_examples=200, deadline=None)
@given(graphs, st.sets(st.integers(0, 6)), st.sets(st.integers(0, 6)))
def test_closure_monotone_and_idempotent(g, a, b):
    ca = transitive_closure(g, a)
    assert transitive_closure(g, ca) == ca
    assert ca <= transitive_closure(g, a | b)


def _holes(t):
    if isinstance(t, Hole):
        return 1
    return sum(_holes(c) for c in children(t))


def _matches(hint, full):
    if isinstance(hint, Hole):
        return True
    ch, cf = children(hint), children(full)
    if type(hint) is not type(full) or len(ch) != len(cf):
        return False
    if not ch:
        return hint == full
    if getattr(hint, "functor", None) != getattr(full, "functor", None):
        return False
    return all(_matches(x, y) for x, y in zip(ch, cf))


@pytest.mark.parametrize("a, b", [
    (BUGGY, FIXED),
    ("p(X, Y) :- X < Y, q(X).", "p(X, Y) :- X =< Y, q(Y)."),
    ("f([a, b|T]) :- g(T).", "f([a, c|T]) :- g(T)."),
])
def test_hint_matches_repaired_with_wildcards(a, b):
    ca, cb = parse_clause(a), parse_clause(b)
    hint = abstract_hint(ca, cb)
    assert sum(_holes(t) for t in (hint.head, *hint.body)) >= 1
    assert _matches(hint.head, cb.head)
    assert all(_matches(x, y) for x, y in zip(hint.body, cb.body))
    assert clause_diff(ca, cb) == clause_diff(cb, ca)
