"""Runtime term representation used by the machine.

Atoms are ``str``, integers are ``int``, compound terms are tuples
``(name, arg1, ..., argN)`` and variables are mutable :class:`Ref` cells.
Lists use ``'.'``/``'[]'``, tuples ``','`` and curly terms ``'{}'``.
"""

from __future__ import annotations

import itertools

from ..terms import (
    ANON, CUT, NIL, Anon, Atom, Clause, Curly, Cut, Hole, Int, PList, Struct,
    Tuple, Var,
)


class Ref:
    __slots__ = ("ref",)

    def __init__(self):
        self.ref = None

    def __repr__(self):
        return f"_G{id(self) & 0xFFFF:x}" if self.ref is None else f"Ref({self.ref!r})"


class VarSlot:
    __slots__ = ("i",)

    def __init__(self, i: int):
        self.i = i


class Skel:
    """Non-ground compound inside a compiled clause."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args: tuple):
        self.name = name
        self.args = args


def deref(t):
    while type(t) is Ref:
        r = t.ref
        if r is None:
            return t
        t = r
    return t


class Trail:
    __slots__ = ("cells",)

    def __init__(self):
        self.cells: list[Ref] = []

    def bind(self, v: Ref, t):
        v.ref = t
        self.cells.append(v)

    def mark(self) -> int:
        return len(self.cells)

    def undo(self, mark: int):
        cells = self.cells
        while len(cells) > mark:
            cells.pop().ref = None


def unify(a, b, trail: Trail) -> bool:
    """Unify two runtime terms, recording bindings on ``trail``. No occurs check."""
    stack = [(a, b)]
    pop, extend = stack.pop, stack.extend
    cells = trail.cells
    while stack:
        a, b = pop()
        while type(a) is Ref and a.ref is not None:
            a = a.ref
        while type(b) is Ref and b.ref is not None:
            b = b.ref
        if a is b:
            continue
        ta = type(a)
        if ta is Ref:
            a.ref = b
            cells.append(a)
            continue
        tb = type(b)
        if tb is Ref:
            b.ref = a
            cells.append(b)
            continue
        if ta is tuple:
            if tb is not tuple or len(a) != len(b) or a[0] != b[0]:
                return False
            extend(zip(a[1:], b[1:]))
        elif ta is not tb or a != b:
            return False
    return True


def instantiate(s, frame: list):
    t = type(s)
    if t is VarSlot:
        v = frame[s.i]
        if v is None:
            v = frame[s.i] = Ref()
        return v
    if t is Skel:
        return (s.name,) + tuple([instantiate(a, frame) for a in s.args])
    return s


def unify_head(s, term, frame: list, trail: Trail) -> bool:
    """Unify a compiled head skeleton against a runtime term."""
    t = type(s)
    if t is VarSlot:
        cur = frame[s.i]
        if cur is None:
            frame[s.i] = term
            return True
        return unify(cur, term, trail)
    while type(term) is Ref and term.ref is not None:
        term = term.ref
    if type(term) is Ref:
        trail.bind(term, instantiate(s, frame))
        return True
    if t is Skel:
        if type(term) is not tuple or len(term) != len(s.args) + 1 or term[0] != s.name:
            return False
        for sa, ta in zip(s.args, term[1:]):
            if not unify_head(sa, ta, frame, trail):
                return False
        return True
    return unify(s, term, trail)


# -- conversion from syntax trees ------------------------------------------


def _conj(items: list):
    out = items[-1]
    for it in reversed(items[:-1]):
        out = (",", it, out)
    return out


class _Compiler:
    def __init__(self):
        self.slots: dict[str, int] = {}
        self.n = 0

    def fresh(self) -> VarSlot:
        s = VarSlot(self.n)
        self.n += 1
        return s

    def conv(self, t):
        if isinstance(t, Var):
            if t.name not in self.slots:
                self.slots[t.name] = self.n
                self.n += 1
            return VarSlot(self.slots[t.name])
        if isinstance(t, Anon):
            return self.fresh()
        if isinstance(t, Atom):
            return t.name
        if isinstance(t, Int):
            return t.value
        if isinstance(t, Cut):
            return "!"
        if isinstance(t, Struct):
            return self._mk(t.functor, [self.conv(a) for a in t.args])
        if isinstance(t, PList):
            tail = self.conv(t.tail) if t.tail is not None else "[]"
            for e in reversed(t.elems):
                tail = self._mk(".", [self.conv(e), tail])
            return tail
        if isinstance(t, Tuple):
            items = [self.conv(e) for e in t.elems]
            out = items[-1]
            for it in reversed(items[:-1]):
                out = self._mk(",", [it, out])
            return out
        if isinstance(t, Curly):
            items = [self.conv(e) for e in t.elems]
            out = items[-1]
            for it in reversed(items[:-1]):
                out = self._mk(",", [it, out])
            return self._mk("{}", [out])
        if isinstance(t, Hole):
            raise ValueError("hole terms are not executable")
        raise TypeError(f"unknown term {t!r}")

    @staticmethod
    def _mk(name: str, args: list):
        if any(type(a) in (VarSlot, Skel) for a in args):
            return Skel(name, tuple(args))
        return (name,) + tuple(args)


class CompiledClause:
    __slots__ = ("cid", "head", "body", "nvars", "traced")

    def __init__(self, cid, head, body, nvars, traced):
        self.cid = cid
        self.head = head
        self.body = body
        self.nvars = nvars
        self.traced = traced


def compile_clause(c: Clause, traced: bool = True) -> CompiledClause:
    comp = _Compiler()
    head = comp.conv(c.head)
    body = tuple(comp.conv(g) for g in c.body)
    return CompiledClause(c.id, head, body, comp.n, traced)


def to_runtime(t, env: dict[str, Ref]):
    """Convert a syntax term using ``env`` for named variables."""
    if isinstance(t, Var):
        v = env.get(t.name)
        if v is None:
            v = env[t.name] = Ref()
        return v
    if isinstance(t, Anon):
        return Ref()
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Int):
        return t.value
    if isinstance(t, Cut):
        return "!"
    if isinstance(t, Struct):
        return (t.functor,) + tuple(to_runtime(a, env) for a in t.args)
    if isinstance(t, PList):
        tail = to_runtime(t.tail, env) if t.tail is not None else "[]"
        for e in reversed(t.elems):
            tail = (".", to_runtime(e, env), tail)
        return tail
    if isinstance(t, Tuple):
        return _conj([to_runtime(e, env) for e in t.elems])
    if isinstance(t, Curly):
        return ("{}", _conj([to_runtime(e, env) for e in t.elems]))
    if isinstance(t, Hole):
        raise ValueError("hole terms are not executable")
    raise TypeError(f"unknown term {t!r}")


def _letters():
    for n in itertools.count(1):
        for combo in itertools.product("ABCDEFGHIJKLMNOPQRSTUVWXYZ", repeat=n):
            yield "".join(combo)


class Namer:
    """Assign readable names to unbound runtime variables."""

    def __init__(self, prefix: str = "_"):
        self.prefix = prefix
        self.names: dict[int, str] = {}
        self._gen = _letters()

    def __call__(self, v: Ref) -> str:
        key = id(v)
        name = self.names.get(key)
        if name is None:
            name = self.names[key] = self.prefix + next(self._gen)
        return name


def to_syntax(t, namer: Namer | None = None):
    """Convert a runtime term back to a syntax tree (bindings applied)."""
    if namer is None:
        namer = Namer()
    t = deref(t)
    tt = type(t)
    if tt is Ref:
        return Var(namer(t))
    if tt is int:
        return Int(t)
    if tt is str:
        return CUT if t == "!" else Atom(t)
    name = t[0]
    if name == "." and len(t) == 3:
        elems = []
        while type(t) is tuple and len(t) == 3 and t[0] == ".":
            elems.append(to_syntax(t[1], namer))
            t = deref(t[2])
        tail = None if t == "[]" else to_syntax(t, namer)
        return PList(tuple(elems), tail)
    if name == "," and len(t) == 3:
        elems = []
        while type(t) is tuple and len(t) == 3 and t[0] == ",":
            elems.append(to_syntax(t[1], namer))
            t = deref(t[2])
        elems.append(to_syntax(t, namer))
        return Tuple(tuple(elems))
    if name == "{}" and len(t) == 2:
        inner = to_syntax(t[1], namer)
        return Curly(inner.elems if isinstance(inner, Tuple) else (inner,))
    return Struct(name, tuple(to_syntax(a, namer) for a in t[1:]))


# -- standard order of terms -----------------------------------------------

def _order_class(t) -> int:
    tt = type(t)
    if tt is Ref:
        return 0
    if tt is int:
        return 1
    if tt is str:
        return 3
    return 4


def compare(a, b) -> int:
    a, b = deref(a), deref(b)
    if a is b:
        return 0
    ca, cb = _order_class(a), _order_class(b)
    if ca != cb:
        return -1 if ca < cb else 1
    if ca == 0:
        return -1 if id(a) < id(b) else 1
    if ca in (1, 3):
        return 0 if a == b else (-1 if a < b else 1)
    if len(a) != len(b):
        return -1 if len(a) < len(b) else 1
    if a[0] != b[0]:
        return -1 if a[0] < b[0] else 1
    for x, y in zip(a[1:], b[1:]):
        c = compare(x, y)
        if c:
            return c
    return 0


def list_items(t):
    """Items of a proper runtime list, or None if partial/improper."""
    out = []
    t = deref(t)
    while type(t) is tuple and len(t) == 3 and t[0] == ".":
        out.append(t[1])
        t = deref(t[2])
    return out if t == "[]" else None


def make_list(items, tail="[]"):
    out = tail
    for it in reversed(items):
        out = (".", it, out)
    return out


__all__ = [
    "Ref", "Trail", "deref", "unify", "to_runtime", "to_syntax", "compile_clause",
    "CompiledClause", "instantiate", "unify_head", "compare", "list_items", "make_list",
    "Namer", "ANON", "NIL",
]
