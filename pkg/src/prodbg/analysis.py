"""Structural comparison of clauses, hint abstraction and call graphs."""

from __future__ import annotations

import difflib
from collections import deque

from .printer import term_to_str
from .terms import (
    HOLE, Anon, Atom, Clause, Curly, Cut, Hole, Int, PList, Program, Struct,
    Tuple, Var, children, indicator,
)


def label(t) -> tuple:
    """Node label used for structural comparison: kind, symbol and child count."""
    if isinstance(t, Struct):
        return ("struct", t.functor, t.arity)
    if isinstance(t, PList):
        return ("list_c" if t.tail is not None else "list", None, len(t.elems))
    if isinstance(t, Tuple):
        return ("tuple", None, len(t.elems))
    if isinstance(t, Curly):
        return ("curly", None, len(t.elems))
    if isinstance(t, Atom):
        return ("atom", t.name, 0)
    if isinstance(t, Int):
        return ("int", t.value, 0)
    if isinstance(t, Var):
        return ("var", t.name, 0)
    if isinstance(t, Anon):
        return ("anon", None, 0)
    if isinstance(t, Cut):
        return ("cut", None, 0)
    if isinstance(t, Hole):
        return ("hole", None, 0)
    raise TypeError(f"unknown term {t!r}")


def _count_nodes(t) -> int:
    return 1 + sum(_count_nodes(c) for c in children(t))


def _term_edits(a, b) -> int:
    if a is None and b is None:
        return 0
    if a is None:
        return _count_nodes(b)
    if b is None:
        return _count_nodes(a)
    ca, cb = children(a), children(b)
    n = 0 if label(a) == label(b) else 1
    for i in range(max(len(ca), len(cb))):
        n += _term_edits(ca[i] if i < len(ca) else None, cb[i] if i < len(cb) else None)
    return n


def edit_count(a: Clause, b: Clause) -> int:
    """Number of node positions whose label differs or that exist in only one clause."""
    n = _term_edits(a.head, b.head)
    for i in range(max(len(a.body), len(b.body))):
        n += _term_edits(a.body[i] if i < len(a.body) else None,
                         b.body[i] if i < len(b.body) else None)
    return n


def program_edit_count(a: Program, b: Program) -> int:
    n = 0
    for i in range(max(len(a.clauses), len(b.clauses))):
        ca = a.clauses[i] if i < len(a.clauses) else None
        cb = b.clauses[i] if i < len(b.clauses) else None
        if ca is None or cb is None:
            c = ca or cb
            n += _count_nodes(c.head) + sum(_count_nodes(g) for g in c.body)
        else:
            n += edit_count(ca, cb)
    return n


def _diff(a, b, path, out):
    if a == b:
        return
    if label(a) != label(b):
        out.add(path)
        return
    for i, (x, y) in enumerate(zip(children(a), children(b))):
        _diff(x, y, path + (i,), out)


def clause_diff(a: Clause, b: Clause) -> set:
    """Paths of the shallowest differing subterms; a path starts with the slot (0 = head).

    A body goal present in only one clause is reported as its slot path.
    """
    out: set = set()
    _diff(a.head, b.head, (0,), out)
    for i in range(max(len(a.body), len(b.body))):
        if i >= len(a.body) or i >= len(b.body):
            out.add((i + 1,))
        else:
            _diff(a.body[i], b.body[i], (i + 1,), out)
    return out


def _abstract(a, b):
    if a == b:
        return a
    if label(a) != label(b):
        return HOLE
    ca, cb = children(a), children(b)
    new = tuple(_abstract(x, y) for x, y in zip(ca, cb))
    if isinstance(a, Struct):
        return Struct(a.functor, new)
    if isinstance(a, PList):
        if a.tail is None:
            return PList(new)
        return PList(new[:-1], new[-1])
    if isinstance(a, Tuple):
        return Tuple(new)
    if isinstance(a, Curly):
        return Curly(new)
    return HOLE


def abstract_hint(original: Clause, repaired: Clause) -> Clause:
    """The original clause with every subterm changed by the repair replaced by a hole."""
    if original.head == repaired.head and original.body == repaired.body:
        raise ValueError("clauses are identical; there is nothing to hint at")
    head = _abstract(original.head, repaired.head)
    if not isinstance(head, (Atom, Struct)):
        head = Atom("?")
    if len(original.body) == len(repaired.body):
        body = tuple(_abstract(x, y) for x, y in zip(original.body, repaired.body))
        return Clause(original.id, head, body, original.span)
    ka = [term_to_str(g) for g in original.body]
    kb = [term_to_str(g) for g in repaired.body]
    body = []
    sm = difflib.SequenceMatcher(a=ka, b=kb, autojunk=False)
    for op, i1, i2, j1, j2 in sm.get_opcodes():
        if op == "equal":
            body.extend(original.body[i1:i2])
        elif op == "replace":
            for i in range(max(i2 - i1, j2 - j1)):
                if i1 + i < i2 and j1 + i < j2:
                    body.append(_abstract(original.body[i1 + i], repaired.body[j1 + i]))
                else:
                    body.append(HOLE)
        elif op == "insert":
            body.append(HOLE)
        else:
            body.extend(HOLE for _ in range(i2 - i1))
    # collapse runs of adjacent holes so the hint does not reveal goal counts
    compact = []
    for g in body:
        if isinstance(g, Hole) and compact and isinstance(compact[-1], Hole):
            continue
        compact.append(g)
    return Clause(original.id, head, tuple(compact), original.span)


# -- call graph ------------------------------------------------------------------

_CONTROL = {(",", 2), (";", 2), ("->", 2), ("\\+", 1), ("not", 1)}


def _closure_target(t, extra: int):
    if isinstance(t, Atom):
        return (t.name, extra)
    if isinstance(t, Struct):
        return (t.functor, t.arity + extra)
    return None


def goal_predicates(goal) -> set:
    """Predicate indicators a goal may invoke directly, looking through control constructs."""
    out: set = set()
    todo = [goal]
    while todo:
        g = todo.pop()
        if isinstance(g, Tuple):
            todo.extend(g.elems)
            continue
        if isinstance(g, (Var, Anon, Int, Cut, Hole, PList, Curly)):
            continue
        key = indicator(g)
        if key in _CONTROL:
            todo.extend(g.args)
            continue
        out.add(key)
        if isinstance(g, Struct):
            if g.functor == "call":
                tgt = _closure_target(g.args[0], g.arity - 1)
                if tgt is not None:
                    if tgt[1] == 0 or tgt in _CONTROL:
                        todo.append(g.args[0])
                    else:
                        out.add(tgt)
            elif g.functor == "maplist" and g.arity >= 2:
                tgt = _closure_target(g.args[0], g.arity - 1)
                if tgt is not None:
                    out.add(tgt)
    return out


def predicate_call_graph(program: Program) -> dict:
    graph: dict = {key: set() for key in program.predicate_index}
    for c in program.clauses:
        for g in c.body:
            graph[c.key] |= goal_predicates(g)
    return graph


def transitive_closure(graph: dict, roots) -> set:
    seen = set(roots)
    queue = deque(seen)
    while queue:
        node = queue.popleft()
        for nxt in graph.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def relevant_predicates(program: Program, goals) -> set:
    roots: set = set()
    for g in goals:
        roots |= goal_predicates(g)
    return transitive_closure(predicate_call_graph(program), roots)
