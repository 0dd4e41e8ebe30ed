"""Functional unification over syntax trees.

The machine uses trail-based mutable cells; this module offers the same
operation as a pure function returning a new substitution, which is handy for
tests and for callers that work on syntax trees directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..terms import NIL, Anon, Atom, Curly, Cut, Int, PList, Struct, Tuple, Var
from .arith import evaluate
from .runtime import to_runtime


@dataclass(frozen=True)
class Bindings:
    subst: dict = field(default_factory=dict)
    generation: int = 0

    def __getitem__(self, name: str):
        return self.subst[name]

    def __contains__(self, name: str) -> bool:
        return name in self.subst

    def __len__(self) -> int:
        return len(self.subst)

    def walk(self, t):
        while isinstance(t, Var) and t.name in self.subst:
            t = self.subst[t.name]
        return t

    def resolve(self, t):
        """Apply the substitution until no bound variable remains."""
        t = self.walk(canonical(t))
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(self.resolve(a) for a in t.args))
        return t


def canonical(t):
    """Rewrite list, tuple, curly and cut sugar into plain compound terms."""
    if isinstance(t, PList):
        tail = canonical(t.tail) if t.tail is not None else NIL
        for e in reversed(t.elems):
            tail = Struct(".", (canonical(e), tail))
        return tail
    if isinstance(t, Tuple):
        out = canonical(t.elems[-1])
        for e in reversed(t.elems[:-1]):
            out = Struct(",", (canonical(e), out))
        return out
    if isinstance(t, Curly):
        return Struct("{}", (canonical(Tuple(t.elems)),))
    if isinstance(t, Cut):
        return Atom("!")
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(canonical(a) for a in t.args))
    return t


def _freshen(t, counter: list):
    if isinstance(t, Anon):
        counter[0] += 1
        return Var(f"_G{counter[0]}")
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(_freshen(a, counter) for a in t.args))
    return t


def unify(t1, t2, b: Bindings | None = None) -> Bindings | None:
    """Return bindings extending ``b`` that make ``t1`` and ``t2`` equal, or None."""
    b = b or Bindings()
    counter = [b.generation]
    t1 = _freshen(canonical(t1), counter)
    t2 = _freshen(canonical(t2), counter)
    subst = dict(b.subst)

    def walk(t):
        while isinstance(t, Var) and t.name in subst:
            t = subst[t.name]
        return t

    stack = [(t1, t2)]
    while stack:
        a, c = stack.pop()
        a, c = walk(a), walk(c)
        if a == c:
            continue
        if isinstance(a, Var):
            subst[a.name] = c
        elif isinstance(c, Var):
            subst[c.name] = a
        elif isinstance(a, Struct) and isinstance(c, Struct):
            if a.functor != c.functor or a.arity != c.arity:
                return None
            stack.extend(zip(a.args, c.args))
        else:
            return None
    return Bindings(subst, counter[0])


def eval_arith(t, b: Bindings | None = None) -> int:
    """Evaluate an integer arithmetic expression under ``b``."""
    b = b or Bindings()
    return evaluate(to_runtime(b.resolve(t), {}))


__all__ = ["Bindings", "canonical", "eval_arith", "unify"]
