import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodbg.engine import (
    FAILURE, RESOURCE_LIMIT, RUNTIME_ERROR, SUCCESS, Bindings, ExecLimits, Machine, PrologError,
    eval_arith, format_trace, solve, unify,
)
from prodbg.parser import parse_program, parse_query, parse_term
from prodbg.printer import term_to_str
from prodbg.terms import Atom, Var


def run(src, query, **kw):
    return solve(parse_program(src), query, **kw)


def ports(outcome, program):
    return [(e.port, term_to_str(e.goal), None if e.clause_id is None else program.ordinal(e.clause_id))
            for e in outcome.trace]


def test_grandparent_trace(family):
    out = solve(family, "grandparent(alice, carol).", trace_on=True)
    assert out.status == SUCCESS
    assert ports(out, family) == [
        ("call", "grandparent(alice, carol)", 0),
        ("call", "parent(alice, _A)", 0),
        ("exit", "parent(alice, bob)", None),
        ("call", "parent(bob, carol)", 1),
        ("exit", "parent(bob, carol)", None),
        ("exit", "grandparent(alice, carol)", None),
    ]
    # global ids internally
    assert [e.clause_id for e in out.trace if e.port == "call"] == [2, 0, 1]


def test_trace_dump_format(family):
    out = solve(family, "grandparent(alice, carol).", trace_on=True)
    first = format_trace(out.trace, family).splitlines()[0]
    assert first == "0\tcall\t0\tgrandparent(alice, carol)\t#0"


def test_failed_head_match_is_not_attributed():
    p = parse_program("q(1).\nq(2).\nr :- q(2).")
    out = solve(p, "r.", trace_on=True)
    calls = [e.clause_id for e in out.trace if e.port == "call"]
    # q(1) never unifies with q(2); the call names the clause that matched
    assert calls == [2, 1]


def test_redo_and_fail_ports():
    p = parse_program("q(1).\nq(2).\nr(X) :- q(X), X > 1.")
    out = solve(p, "r(X).", trace_on=True)
    seq = [e.port for e in out.trace]
    assert out.status == SUCCESS
    assert out.first_solution == {"X": parse_term("2")}
    assert "redo" in seq
    redo = next(e for e in out.trace if e.port == "redo")
    assert redo.clause_id == 1


def test_duplicate_buggy_fails(buggy_duplicate):
    assert solve(buggy_duplicate, "duplicate([1,2],[1,1,2,2]).").status == FAILURE


def test_duplicate_fixed_succeeds(fixed_duplicate):
    out = solve(fixed_duplicate, "duplicate([1,2], X).")
    assert out.status == SUCCESS
    assert term_to_str(out.first_solution["X"]) == "[1, 1, 2, 2]"


def test_step_limit():
    out = run("p :- p.", "p.", limits=ExecLimits(max_steps=1000))
    assert out.status == RESOURCE_LIMIT


def test_depth_limit():
    out = run("n(X) :- n(s(X)).", "n(z).", limits=ExecLimits(max_steps=10**7, max_depth=50))
    assert out.status == RESOURCE_LIMIT


def test_unknown_predicate_modes():
    p = parse_program("a :- b.")
    assert Machine(p).solve("a.").status == RUNTIME_ERROR
    assert Machine(p, unknown="fail").solve("a.").status == FAILURE


def test_arith_on_unbound_is_error():
    assert run("p(Y) :- Y is X + 1.", "p(Y).").status == RUNTIME_ERROR


@pytest.mark.parametrize("query", ["p.", "q."])
def test_cut_commits(query):
    src = "p :- !, fail.\np.\nq :- r(X), !, X > 1.\nr(1).\nr(2)."
    assert run(src, query).status == FAILURE


def test_cut_is_local_to_clause():
    src = "t(X) :- s(X).\nt(3).\ns(X) :- member(X, [1,2]), !.\n"
    p = parse_program(src)
    m = Machine(p)
    assert m.solve("t(3).").status == SUCCESS
    # the cut in s/1 prunes member/2 but leaves t/1's second clause open
    assert m.solve("t(X), X == 3.").status == SUCCESS
    assert m.solve("s(X), X == 2.").status == FAILURE


def test_negation_as_failure():
    src = "likes(a, b).\nlonely(X) :- \\+ likes(X, _)."
    assert run(src, "lonely(c).").status == SUCCESS
    assert run(src, "lonely(a).").status == FAILURE


def test_if_then_else():
    src = "sign(X, S) :- (X > 0 -> S = pos ; X < 0 -> S = neg ; S = zero)."
    for x, s in (("3", "pos"), ("-2", "neg"), ("0", "zero")):
        out = run(src, f"sign({x}, S).")
        assert out.first_solution["S"] == Atom(s)


@pytest.mark.parametrize("query, status", [
    ("member(2, [1,2,3]).", SUCCESS),
    ("member(4, [1,2,3]).", FAILURE),
    ("append(X, [3], [1,2,3]), X == [1,2].", SUCCESS),
    ("length([a,b,c], N), N =:= 3.", SUCCESS),
    ("length(L, 2), L = [_, _].", SUCCESS),
    ("between(1, 5, X), X * X =:= 16.", SUCCESS),
    ("msort([b, a, c, a], [a, a, b, c]).", SUCCESS),
    ("maplist(succ_, [1,2], [2,3]).", SUCCESS),
    ("call(succ_, 1, X), X == 2.", SUCCESS),
    ("X = f(Y), Y = 1, X == f(1).", SUCCESS),
    ("a \\= a.", FAILURE),
    ("f(X) \\== f(Y).", SUCCESS),
    ("1 + 2 =:= 3.", SUCCESS),
    ("3 =\\= 3.", FAILURE),
    ("true, \\+ fail.", SUCCESS),
    ("X is 7 // 2, X == 3.", SUCCESS),
    ("X = 7 // 2, X == 3.", FAILURE),
])
def test_builtins(query, status):
    assert run("succ_(X, Y) :- Y is X + 1.", query).status == status


def test_unify_examples():
    b = unify(Var("X"), Atom("bob"))
    assert b is not None and b.resolve(Var("X")) == Atom("bob")
    b = unify(parse_term("parent(alice, Y)"), parse_term("parent(alice, bob)"))
    assert b.resolve(Var("Y")) == Atom("bob")
    assert unify(parse_term("f(X, X)"), parse_term("f(a, b)")) is None


def test_unify_leaves_input_untouched():
    b0 = Bindings({"Z": Atom("z")})
    assert unify(parse_term("f(a)"), parse_term("g(a)"), b0) is None
    assert dict(b0.subst) == {"Z": Atom("z")}


@pytest.mark.parametrize("expr, value", [("2+3*4", 14), ("7 mod 3", 1), ("-7 // 2", -3), ("-7 mod 2", 1), ("-(3)", -3)])
def test_eval_arith(expr, value):
    assert eval_arith(parse_term(expr)) == value


@pytest.mark.parametrize("expr", ["X + 1", "foo + 1", "1 / 0", "7 / 2"])
def test_eval_arith_errors(expr):
    with pytest.raises(PrologError):
        eval_arith(parse_term(expr))


def test_exec_limits_positive():
    with pytest.raises(ValueError):
        ExecLimits(max_steps=0)


def test_determinism(family):
    a = solve(family, "grandparent(X, Y).", trace_on=True)
    b = solve(family, "grandparent(X, Y).", trace_on=True)
    assert a.trace == b.trace and a.first_solution == b.first_solution


# -- port discipline on random programs ------------------------------------------

CONSTS = ["a", "b", "c"]


@st.composite
def small_programs(draw):
    lines = []
    for name in ("p", "q", "r"):
        for _ in range(draw(st.integers(1, 3))):
            args = [draw(st.sampled_from(CONSTS + ["X", "Y"])) for _ in range(2)]
            body = []
            if name != "r":
                callee = "q" if name == "p" else "r"
                for _ in range(draw(st.integers(0, 2))):
                    body.append(f"{callee}({draw(st.sampled_from(['X', 'Y'] + CONSTS))}, "
                                f"{draw(st.sampled_from(['X', 'Y', 'Z']))})")
            head = f"{name}({', '.join(args)})"
            lines.append(head + (" :- " + ", ".join(body) if body else "") + ".")
    return "\n".join(lines)


def check_ports(trace, program):
    """Replays the trace against a stack of live activations.

    Every exit/redo/fail must belong to a live activation at its depth, a call
    hangs under a live parent, and a redo never moves back to an earlier clause.
    Activations left without alternatives may drop off silently.
    """
    live = []  # [depth, ordinal, parent index into live or -1]

    def latest(d):
        for i in range(len(live) - 1, -1, -1):
            if live[i][0] == d:
                return i
        raise AssertionError(f"no live activation at depth {d}")

    def descends(i, anc):
        while i != -1:
            if i == anc:
                return True
            i = live[i][2]
        return False

    def cut_back(keep):
        # drop later entries that are not descendants of keep
        survivors = [j for j in range(len(live)) if j <= keep or descends(j, keep)]
        remap = {old: new for new, old in enumerate(survivors)}
        live[:] = [[live[j][0], live[j][1], remap.get(live[j][2], -1)] for j in survivors]

    for i, ev in enumerate(trace):
        assert ev.seq == i
        d = ev.depth
        if ev.port == "call":
            parent = latest(d - 1) if d > 0 else -1
            ordinal = None if ev.clause_id is None else program.ordinal(ev.clause_id)
            live.append([d, ordinal, parent])
            if ev.clause_id is None:
                # no head matched: the next event fails this goal
                assert trace[i + 1].port == "fail" and trace[i + 1].depth == d
        elif ev.port == "exit":
            assert ev.clause_id is None
            latest(d)
        elif ev.port == "fail":
            assert ev.clause_id is None
            k = latest(d)
            cut_back(k)
            del live[k:]
        else:
            assert ev.clause_id is not None
            k = latest(d)
            cut_back(k)
            ordinal = program.ordinal(ev.clause_id)
            assert live[k][1] is not None and ordinal >= live[k][1]
            live[k][1] = ordinal


@settings(max_examples=150, deadline=None)
@given(small_programs(), st.sampled_from(["p(X, Y).", "p(a, Y).", "p(X, c).", "q(b, b)."]))
def test_port_discipline(src, query):
    p = parse_program(src)
    out = solve(p, query, trace_on=True, unknown="fail")
    assert out.status in (SUCCESS, FAILURE)
    check_ports(out.trace, p)
    for ev in out.trace:
        if ev.clause_id is not None:
            assert p.clause(ev.clause_id).key == (ev.goal.functor, ev.goal.arity)
