import pytest

from prodbg.errors import EncodingError
from prodbg.mutation.dsl import build_dsl, tiny_dsl
from prodbg.mutation.encoding import REPAIR, complete_ast, dump_constraints, encode
from prodbg.mutation.search import AssignmentSearch, MutantStream, enumerate_mutants
from prodbg.parser import parse_clause, parse_program
from prodbg.printer import clause_to_str
from prodbg.terms import Struct, children

from oracles import exhaustive_mutants, random_tiny_case

FIG3_FACT = {"duplicate(_, []).", "duplicate([], V0).", "duplicate([], 1)."}
FIG3_RULE = {
    "duplicate([H|T], L2) :- duplicate(T, L1), L2 is (H, H, L1).",
    "duplicate([H|T], L2) :- duplicate(T, L1), L2 = (H, _, L1).",
    "duplicate([H|T], L2) :- duplicate(T, L1), L2 = [H, H, L1].",
}


def labels(dsl):
    return {p.label() for p in dsl.productions}


def test_dsl_for_duplicate(buggy_duplicate):
    got = labels(build_dsl(buggy_duplicate, 1))
    assert {"duplicate/2", "=/2", "[...|_]", "(...)", "H", "T", "L1", "L2", "V0", "_", "0", "1",
            "empty"} <= got


def test_dsl_curried_variants_with_maplist():
    p = parse_program("inc(A, B, C) :- C is A + B.\nall(X, Y) :- maplist(inc(1), X, Y).")
    got = labels(build_dsl(p, 1))
    assert {"inc/3", "inc/2", "inc/1"} <= got


def test_dsl_empty_program():
    d = build_dsl(parse_program(""), None)
    assert "empty" in labels(d) and "member/2" in labels(d)


def test_dsl_ids_dense(buggy_duplicate):
    d = build_dsl(buggy_duplicate, 0)
    assert [p.id for p in d.productions] == list(range(len(d)))


def test_fig3_fact_mutants(buggy_duplicate):
    texts = [m.text for m in enumerate_mutants(buggy_duplicate, 0, 1, budget=500)]
    assert FIG3_FACT <= set(texts)
    assert len(texts) == len(set(texts))


def test_fig3_rule_mutants(buggy_duplicate):
    texts = [m.text for m in enumerate_mutants(buggy_duplicate, 1, 1, budget=500)]
    assert FIG3_RULE <= set(texts)
    assert len(texts) == len(set(texts))


def test_budget_cut(buggy_duplicate):
    assert len(enumerate_mutants(buggy_duplicate, 1, 1, budget=1)) == 1
    assert enumerate_mutants(buggy_duplicate, 1, 1, budget=0) == []


def test_k_zero_rejected(buggy_duplicate):
    c = buggy_duplicate.clause(1)
    d = build_dsl(buggy_duplicate, 1)
    with pytest.raises(EncodingError):
        encode(complete_ast(c, d), d, 0)


def test_caps_too_small(buggy_duplicate):
    c = buggy_duplicate.clause(1)
    with pytest.raises(EncodingError):
        complete_ast(c, build_dsl(buggy_duplicate, 1), 1, 1)


def test_fact_padding_only():
    p = parse_program("a.")
    d = build_dsl(p, 0)
    tree = complete_ast(p.clause(0), d, 2, 3)
    head = tree.nodes[tree.roots[0]]
    assert len(head.children) == 3
    assert all(tree.nodes[c].orig == d.empty for c in head.children)


def test_completion_makes_list_expressible(buggy_duplicate):
    # the tuple node gains a third child slot, so [H, H|L1] is one assignment away
    c = buggy_duplicate.clause(1)
    d = build_dsl(buggy_duplicate, 1)
    tree = complete_ast(c, d)
    tup = next(n for n in tree.nodes if n.orig == d.lookup("tuple"))
    assert len(tup.children) == tree.branch_cap >= 3


def test_repair_mode_extra_root(buggy_duplicate):
    s = MutantStream(buggy_duplicate, 1, 1, REPAIR, budget=50, extra_body_roots=1)
    dump = dump_constraints(s.enc, type_impl=False)
    assert "position 0 domain [0..2]" in dump
    assert "card 1" in dump


def test_dump_lists_blocks(buggy_duplicate):
    s = MutantStream(buggy_duplicate, 0, 1, budget=2)
    list(s)
    dump = dump_constraints(s.enc, type_impl=False)
    assert dump.count("\nblock {") == 2
    assert dump.splitlines()[1].startswith("node 0 domain")


def _user_nesting_ok(t, user):
    if isinstance(t, Struct) and (t.functor, t.arity) in user:
        for ch in children(t):
            if isinstance(ch, Struct) and (ch.functor, ch.arity) in user:
                return False
    return all(_user_nesting_ok(ch, user) for ch in children(t))


@pytest.mark.parametrize("cid", [0, 1])
def test_mutant_invariants(buggy_duplicate, cid):
    user = {("duplicate", 2)}
    orig = buggy_duplicate.clause(cid)
    for m in enumerate_mutants(buggy_duplicate, cid, 1, budget=500):
        c = m.clause
        assert len(m.changed_paths) == 1
        assert c.key in user
        reparsed = parse_clause(clause_to_str(c))
        assert reparsed.same_shape(c)
        assert all(_user_nesting_ok(a, user) for a in c.head.args)
        for other in buggy_duplicate.clauses:
            if other.id != cid:
                assert clause_to_str(m.program.clause(other.id)) == clause_to_str(other)
        assert clause_to_str(c) != clause_to_str(orig)


def test_k2_changes_two_nodes(buggy_duplicate):
    ms = enumerate_mutants(buggy_duplicate, 0, 2, budget=200)
    assert ms and all(len(m.changed_paths) == 2 for m in ms)


def test_deterministic_order(buggy_duplicate):
    a = [m.text for m in enumerate_mutants(buggy_duplicate, 1, 1, budget=100)]
    b = [m.text for m in enumerate_mutants(buggy_duplicate, 1, 1, budget=100)]
    assert a == b


def test_smaller_mutants_first(buggy_duplicate):
    added = [m.added for m in enumerate_mutants(buggy_duplicate, 1, 2, REPAIR, budget=300)]
    assert added == sorted(added)


def _engine_set(seed, k):
    spec, user, c = random_tiny_case(seed)
    d = tiny_dsl(spec, user=user)
    tree = complete_ast(c, d, 3, 2)
    enc = encode(tree, d, k)
    got = set()
    for val, _ in AssignmentSearch(enc, max_added=k).solutions():
        got.add(frozenset((tree.nodes[i].path, None if d[v].kind == "empty" else (d[v].kind, d[v].symbol))
                          for i, v in enumerate(val)))
    return got, exhaustive_mutants(c, spec, user, k=k)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("seed", range(0, 50, 7))
def test_oracle_equivalence_higher_k(seed, k):
    spec, user, c = random_tiny_case(seed)
    d = tiny_dsl(spec, user=user)
    n_nodes = len(complete_ast(c, d, 3, 2))
    if k > n_nodes:
        pytest.skip("clause too small")
    got, expected = _engine_set(seed, k)
    assert got == expected
