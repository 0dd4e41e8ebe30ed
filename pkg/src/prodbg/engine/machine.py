"""SLD resolution machine with cut, negation as failure and a four-port tracer."""

from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field

from ..parser import parse_program, parse_query
from ..terms import Program, Term
from .arith import PrologError, evaluate
from .runtime import (
    Namer, Ref, Trail, compare, compile_clause, deref, instantiate, list_items,
    make_list, to_runtime, to_syntax, unify, unify_head,
)

SUCCESS = "success"
FAILURE = "failure"
RESOURCE_LIMIT = "resource_limit"
RUNTIME_ERROR = "runtime_error"


@dataclass(frozen=True)
class ExecLimits:
    max_steps: int = 100_000
    max_depth: int = 5_000
    wall_clock_ms: int = 2_000

    def __post_init__(self):
        for name in ("max_steps", "max_depth", "wall_clock_ms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    port: str
    goal: Term
    clause_id: int | None
    depth: int


@dataclass
class QueryOutcome:
    status: str
    first_solution: dict | None = None
    trace: list = field(default_factory=list)
    steps_used: int = 0
    error: str | None = None


class _LimitExceeded(Exception):
    pass


# -- machine records ---------------------------------------------------------

class _Frame:
    __slots__ = ("goal", "next", "act", "cutb", "depth")

    def __init__(self, goal, nxt, act, cutb, depth):
        self.goal = goal
        self.next = nxt
        self.act = act
        self.cutb = cutb
        self.depth = depth


class _Act:
    """One traced activation of a user predicate."""

    __slots__ = ("parent", "depth", "goal", "snap", "cid")

    def __init__(self, parent, depth, goal):
        self.parent = parent
        self.depth = depth
        self.goal = goal
        self.snap = None
        self.cid = None


class _Exit:
    __slots__ = ("act",)

    def __init__(self, act):
        self.act = act


class _CutTo:
    __slots__ = ("height",)

    def __init__(self, height):
        self.height = height


class _NafFail:
    __slots__ = ("height",)

    def __init__(self, height):
        self.height = height


_ALT, _CLAUSES = 0, 1


class _ChoicePoint:
    __slots__ = ("kind", "trail", "cont", "goal", "clauses", "idx", "act", "parent_act", "depth")

    def __init__(self, kind, trail, cont, goal=None, clauses=None, idx=0, act=None,
                 parent_act=None, depth=0):
        self.kind = kind
        self.trail = trail
        self.cont = cont
        self.goal = goal
        self.clauses = clauses
        self.idx = idx
        self.act = act
        self.parent_act = parent_act
        self.depth = depth


# -- builtins ----------------------------------------------------------------

def _bi_unify(m, a, b):
    return unify(a, b, m.trail)


def _bi_not_unify(m, a, b):
    mark = m.trail.mark()
    ok = unify(a, b, m.trail)
    m.trail.undo(mark)
    return not ok


def _bi_eq(m, a, b):
    return compare(a, b) == 0


def _bi_neq(m, a, b):
    return compare(a, b) != 0


def _bi_is(m, a, b):
    return unify(a, evaluate(b), m.trail)


def _cmp(op):
    def f(m, a, b):
        return op(evaluate(a), evaluate(b))
    return f


def _bi_msort(m, a, b):
    items = list_items(a)
    if items is None:
        raise PrologError("instantiation_error", "msort/2: partial list")
    items.sort(key=functools.cmp_to_key(compare))
    return unify(b, make_list(items), m.trail)


def _bi_length(m, lst, n):
    count = 0
    t = deref(lst)
    while type(t) is tuple and len(t) == 3 and t[0] == ".":
        count += 1
        t = deref(t[2])
    if t == "[]":
        return unify(n, count, m.trail)
    if type(t) is not Ref:
        return False
    nv = deref(n)
    if type(nv) is int:
        if nv < count:
            return False
        return unify(t, make_list([Ref() for _ in range(nv - count)]), m.trail)
    if type(nv) is Ref:
        return ("$length_enum", lst, 0, n)
    raise PrologError("type_error", f"length/2: integer expected, got {nv!r}")


CORE_BUILTINS = {
    ("=", 2): _bi_unify,
    ("\\=", 2): _bi_not_unify,
    ("==", 2): _bi_eq,
    ("\\==", 2): _bi_neq,
    ("is", 2): _bi_is,
    ("=:=", 2): _cmp(lambda x, y: x == y),
    ("=\\=", 2): _cmp(lambda x, y: x != y),
    ("<", 2): _cmp(lambda x, y: x < y),
    (">", 2): _cmp(lambda x, y: x > y),
    ("=<", 2): _cmp(lambda x, y: x <= y),
    (">=", 2): _cmp(lambda x, y: x >= y),
}

LIB_BUILTINS = {
    ("msort", 2): _bi_msort,
    ("length", 2): _bi_length,
}

CONTROL = {(",", 2), ("true", 0), ("fail", 0), ("false", 0), ("!", 0), (";", 2),
           ("->", 2), ("\\+", 1), ("not", 1)} | {("call", n) for n in range(1, 9)}

LIBRARY_SOURCE = r"""
member(X, [X|_]).
member(X, [_|T]) :- member(X, T).
append([], L, L).
append([H|T], L, [H|R]) :- append(T, L, R).
between(L, H, L) :- L =< H.
between(L, H, X) :- L < H, L1 is L + 1, between(L1, H, X).
maplist(_, []).
maplist(G, [X|Xs]) :- call(G, X), maplist(G, Xs).
maplist(_, [], []).
maplist(G, [X|Xs], [Y|Ys]) :- call(G, X, Y), maplist(G, Xs, Ys).
maplist(_, [], [], []).
maplist(G, [X|Xs], [Y|Ys], [Z|Zs]) :- call(G, X, Y, Z), maplist(G, Xs, Ys, Zs).
'$length_enum'([], N, N).
'$length_enum'([_|T], N0, N) :- N1 is N0 + 1, '$length_enum'(T, N1, N).
"""


@functools.lru_cache(maxsize=None)
def _library() -> dict:
    preds: dict = {}
    for c in parse_program(LIBRARY_SOURCE).clauses:
        preds.setdefault(c.key, []).append(compile_clause(c, traced=False))
    return {k: tuple(v) for k, v in preds.items()}


BUILTIN_KEYS = frozenset(CONTROL) | frozenset(CORE_BUILTINS) | frozenset(LIB_BUILTINS) | \
    frozenset(k for k in _library() if not k[0].startswith("$"))


# -- the machine -------------------------------------------------------------

class Machine:
    """Executes queries against one program; one query at a time."""

    def __init__(self, program: Program, limits: ExecLimits | None = None, unknown: str = "error"):
        if unknown not in ("error", "fail"):
            raise ValueError("unknown must be 'error' or 'fail'")
        self.program = program
        self.limits = limits or ExecLimits()
        self.unknown = unknown
        preds: dict = {}
        for c in program.clauses:
            preds.setdefault(c.key, []).append(compile_clause(c))
        self.preds = {k: tuple(v) for k, v in preds.items()}
        self.library = _library()
        self.trail = Trail()

    # public -------------------------------------------------------------

    def solve(self, goals, trace: bool = False) -> QueryOutcome:
        if isinstance(goals, str):
            goals = parse_query(goals)
        env: dict = {}
        rgoals = [to_runtime(g, env) for g in goals]
        self.trail = Trail()
        events: list = []
        self._events = events if trace else None
        self._steps = 0
        try:
            ok = self._run(rgoals)
        except _LimitExceeded as e:
            return QueryOutcome(RESOURCE_LIMIT, None, events, self._steps, str(e))
        except PrologError as e:
            return QueryOutcome(RUNTIME_ERROR, None, events, self._steps, str(e))
        except RecursionError:
            return QueryOutcome(RUNTIME_ERROR, None, events, self._steps, "resource_error: recursion")
        if not ok:
            return QueryOutcome(FAILURE, None, events, self._steps)
        namer = Namer("_G")
        sol = {name: to_syntax(ref, namer) for name, ref in env.items()}
        return QueryOutcome(SUCCESS, sol, events, self._steps)

    # tracing helpers ------------------------------------------------------

    def _emit(self, port, act, goal, cid):
        ev = self._events
        ev.append(TraceEvent(len(ev), port, goal, cid, act.depth))

    @staticmethod
    def _chain(act) -> list:
        out = []
        while act is not None:
            out.append(act)
            act = act.parent
        out.reverse()
        return out

    def _transition(self, old_leaf, new_leaf, redo_leaf: bool):
        old, new = self._chain(old_leaf), self._chain(new_leaf)
        p = 0
        while p < len(old) and p < len(new) and old[p] is new[p]:
            p += 1
        if redo_leaf and p == len(new):
            fails, redos = old[p:], new[-1:]
        else:
            fails, redos = old[p:], new[p:]
        for a in reversed(fails):
            self._emit("fail", a, a.snap, None)
        for a in redos:
            self._emit("redo", a, to_syntax(a.goal), a.cid)

    # core loop ----------------------------------------------------------

    def _run(self, goals) -> bool:
        limits = self.limits
        max_steps, max_depth = limits.max_steps, limits.max_depth
        deadline = time.perf_counter() + limits.wall_clock_ms / 1000.0
        trail = self.trail
        cps: list = []
        tracing = self._events is not None
        preds, library = self.preds, self.library

        cont = None
        for g in reversed(goals):
            cont = _Frame(g, cont, None, 0, 0)

        steps = 0
        while True:
            if cont is None:
                self._steps = steps
                return True
            goal = cont.goal
            tg = type(goal)
            if tg is _Exit:
                if tracing:
                    a = goal.act
                    self._emit("exit", a, to_syntax(a.goal), None)
                cont = cont.next
                continue
            if tg is _CutTo:
                del cps[goal.height:]
                cont = cont.next
                continue

            steps += 1
            if steps > max_steps:
                self._steps = steps - 1
                raise _LimitExceeded(f"step limit {max_steps} exceeded")
            if not steps & 255 and time.perf_counter() > deadline:
                self._steps = steps
                raise _LimitExceeded(f"wall-clock limit {limits.wall_clock_ms} ms exceeded")

            nxt, act, cutb, depth = cont.next, cont.act, cont.cutb, cont.depth
            ok = True
            fail_leaf = act

            if tg is _NafFail:
                del cps[goal.height:]
                ok = False
            else:
                while type(goal) is Ref and goal.ref is not None:
                    goal = goal.ref
                tg = type(goal)
                if tg is str:
                    name, args = goal, ()
                elif tg is tuple:
                    name, args = goal[0], goal[1:]
                elif tg is Ref:
                    self._steps = steps
                    raise PrologError("instantiation_error", "goal is an unbound variable")
                else:
                    self._steps = steps
                    raise PrologError("type_error", f"callable expected, got {goal!r}")
                key = (name, len(args))

                if key in CONTROL:
                    if name == ",":
                        cont = _Frame(args[0], _Frame(args[1], nxt, act, cutb, depth), act, cutb, depth)
                        continue
                    if name == "true":
                        cont = nxt
                        continue
                    if name == "!":
                        del cps[cutb:]
                        cont = nxt
                        continue
                    if name in ("fail", "false"):
                        ok = False
                    elif name == ";" or name == "->":
                        if name == ";":
                            lhs = deref(args[0])
                            if type(lhs) is tuple and len(lhs) == 3 and lhs[0] == "->":
                                cond, then, other = lhs[1], lhs[2], args[1]
                            else:
                                cps.append(_ChoicePoint(_ALT, trail.mark(),
                                                        _Frame(args[1], nxt, act, cutb, depth)))
                                cont = _Frame(args[0], nxt, act, cutb, depth)
                                continue
                        else:
                            cond, then, other = args[0], args[1], "fail"
                        h0 = len(cps)
                        cps.append(_ChoicePoint(_ALT, trail.mark(), _Frame(other, nxt, act, cutb, depth)))
                        after = _Frame(_CutTo(h0), _Frame(then, nxt, act, cutb, depth), act, cutb, depth)
                        cont = _Frame(cond, after, act, len(cps), depth)
                        continue
                    elif name in ("\\+", "not"):
                        h0 = len(cps)
                        cps.append(_ChoicePoint(_ALT, trail.mark(), _Frame("true", nxt, act, cutb, depth)))
                        cont = _Frame(args[0], _Frame(_NafFail(h0), None, act, cutb, depth),
                                      act, len(cps), depth)
                        continue
                    else:  # call/N
                        target = deref(args[0])
                        extra = args[1:]
                        if type(target) is Ref:
                            self._steps = steps
                            raise PrologError("instantiation_error", "call/N on unbound goal")
                        if type(target) is str:
                            newgoal = (target,) + extra if extra else target
                        elif type(target) is tuple:
                            newgoal = target + extra
                        else:
                            self._steps = steps
                            raise PrologError("type_error", f"callable expected, got {target!r}")
                        cont = _Frame(newgoal, nxt, act, len(cps), depth)
                        continue
                elif key in CORE_BUILTINS:
                    ok = CORE_BUILTINS[key](self, *args)
                else:
                    clauses = preds.get(key)
                    traced = clauses is not None
                    if clauses is None:
                        fn = LIB_BUILTINS.get(key)
                        if fn is not None:
                            res = fn(self, *args)
                            if type(res) is tuple:
                                cont = _Frame(res, nxt, act, cutb, depth)
                                continue
                            ok = res
                            clauses = ()
                        else:
                            clauses = library.get(key)
                            if clauses is None:
                                if self.unknown == "error":
                                    self._steps = steps
                                    raise PrologError("existence_error", f"unknown procedure {name}/{len(args)}")
                                ok = False
                                clauses = ()
                    if clauses:
                        if depth + 1 > max_depth:
                            self._steps = steps
                            raise _LimitExceeded(f"depth limit {max_depth} exceeded")
                        new_act = None
                        if tracing and traced:
                            new_act = _Act(act, act.depth + 1 if act is not None else 0, goal)
                            new_act.snap = to_syntax(goal)
                        h0 = len(cps)
                        mark = trail.mark()
                        n = len(clauses)
                        i = 0
                        frame = None
                        while i < n:
                            cc = clauses[i]
                            frame = [None] * cc.nvars
                            if unify_head(cc.head, goal, frame, trail):
                                break
                            trail.undo(mark)
                            i += 1
                        if i == n:
                            if new_act is not None:
                                self._emit("call", new_act, new_act.snap, None)
                                self._emit("fail", new_act, new_act.snap, None)
                            ok = False
                        else:
                            if new_act is not None:
                                new_act.cid = cc.cid
                                self._emit("call", new_act, new_act.snap, cc.cid)
                            if i + 1 < n:
                                cps.append(_ChoicePoint(_CLAUSES, mark, nxt, goal, clauses, i + 1,
                                                        new_act, act, depth))
                            cont = self._body(cc, frame, new_act, act, h0, depth + 1, nxt)
                            continue

            if ok:
                cont = nxt
                continue
            cont = self._backtrack(cps, fail_leaf, tracing)
            if cont is None:
                self._steps = steps
                return False

    def _body(self, cc, frame, new_act, parent_act, cutb, depth, nxt):
        if new_act is not None:
            nxt = _Frame(_Exit(new_act), nxt, new_act, cutb, depth)
            body_act = new_act
        else:
            body_act = parent_act
        for g in reversed(cc.body):
            nxt = _Frame(instantiate(g, frame), nxt, body_act, cutb, depth)
        return nxt if nxt is not None else _Frame("true", None, body_act, cutb, depth)

    def _backtrack(self, cps, fail_leaf, tracing):
        trail = self.trail
        while cps:
            cp = cps[-1]
            trail.undo(cp.trail)
            if cp.kind == _ALT:
                cps.pop()
                if tracing:
                    self._transition(fail_leaf, cp.cont.act, False)
                return cp.cont
            clauses, goal = cp.clauses, cp.goal
            n, i = len(clauses), cp.idx
            frame = None
            while i < n:
                cc = clauses[i]
                frame = [None] * cc.nvars
                if unify_head(cc.head, goal, frame, trail):
                    break
                trail.undo(cp.trail)
                i += 1
            if i == n:
                cps.pop()
                continue
            h0 = len(cps) - 1
            if i + 1 < n:
                cp.idx = i + 1
            else:
                cps.pop()
            a = cp.act
            if a is not None:
                a.cid = cc.cid
                self._transition(fail_leaf, a, True)
            return self._body(cc, frame, a, cp.parent_act, h0, cp.depth + 1, cp.cont)
        if tracing:
            for a in reversed(self._chain(fail_leaf)):
                self._emit("fail", a, a.snap, None)
        return None


def solve(program: Program, goals, limits: ExecLimits | None = None, trace_on: bool = False,
          unknown: str = "error") -> QueryOutcome:
    """Run a query (goal list or query text) and return the first-solution outcome."""
    return Machine(program, limits, unknown).solve(goals, trace_on)


def format_trace(events, program: Program | None = None) -> str:
    """One event per line: SEQ, PORT, DEPTH, GOAL, CLAUSE (``#k`` within predicate or ``-``)."""
    from ..printer import term_to_str

    lines = []
    for ev in events:
        if ev.clause_id is None:
            tag = "-"
        elif program is not None:
            tag = f"#{program.ordinal(ev.clause_id)}"
        else:
            tag = f"#{ev.clause_id}"
        lines.append(f"{ev.seq}\t{ev.port}\t{ev.depth}\t{term_to_str(ev.goal)}\t{tag}")
    return "".join(line + "\n" for line in lines)
