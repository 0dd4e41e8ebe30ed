"""Immutable syntax tree for the supported Prolog subset."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union


@dataclass(frozen=True, slots=True)
class Atom:
    name: str


@dataclass(frozen=True, slots=True)
class Int:
    value: int


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Anon:
    """The anonymous variable ``_``; every occurrence is a fresh variable."""


@dataclass(frozen=True, slots=True)
class Struct:
    """Compound term, including operator applications such as ``X = Y``."""

    functor: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound term needs at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True, slots=True)
class PList:
    """List literal ``[a, b]`` or, with a tail, ``[a, b|T]``."""

    elems: tuple
    tail: "Term | None" = None

    def __post_init__(self):
        if not self.elems:
            raise ValueError("list literal needs at least one element; use Atom('[]')")


@dataclass(frozen=True, slots=True)
class Tuple:
    elems: tuple

    def __post_init__(self):
        if not self.elems:
            raise ValueError("tuple needs at least one element")


@dataclass(frozen=True, slots=True)
class Curly:
    elems: tuple

    def __post_init__(self):
        if not self.elems:
            raise ValueError("curly term needs at least one element; use Atom('{}')")


@dataclass(frozen=True, slots=True)
class Cut:
    pass


@dataclass(frozen=True, slots=True)
class Hole:
    """Placeholder used only in hints; renders as ``?``."""


Term = Union[Atom, Int, Var, Anon, Struct, PList, Tuple, Curly, Cut, Hole]

NIL = Atom("[]")
CUT = Cut()
ANON = Anon()
HOLE = Hole()


@dataclass(frozen=True, slots=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int


@dataclass(frozen=True)
class Clause:
    id: int
    head: Term
    body: tuple = ()
    span: Span | None = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.head, (Atom, Struct)):
            raise ValueError(f"clause head must be an atom or compound, got {type(self.head).__name__}")

    @property
    def key(self) -> tuple[str, int]:
        return indicator(self.head)

    @property
    def is_fact(self) -> bool:
        return not self.body

    def same_shape(self, other: "Clause") -> bool:
        """Structural equality ignoring id and span."""
        return self.head == other.head and self.body == other.body


@dataclass(frozen=True)
class Program:
    clauses: tuple = ()
    directives: tuple = ()

    @cached_property
    def predicate_index(self) -> dict[tuple[str, int], list[int]]:
        index: dict[tuple[str, int], list[int]] = {}
        for c in self.clauses:
            index.setdefault(c.key, []).append(c.id)
        return index

    def __len__(self) -> int:
        return len(self.clauses)

    def clause(self, cid: int) -> Clause:
        return self.clauses[cid]

    def ordinal(self, cid: int) -> int:
        """Index of a clause within its own predicate."""
        return self.predicate_index[self.clauses[cid].key].index(cid)

    def replace_clause(self, cid: int, head: Term, body: tuple) -> "Program":
        old = self.clauses[cid]
        new = Clause(cid, head, tuple(body), old.span)
        clauses = self.clauses[:cid] + (new,) + self.clauses[cid + 1:]
        return Program(clauses, self.directives)

    def same_shape(self, other: "Program") -> bool:
        return (len(self.clauses) == len(other.clauses)
                and all(a.same_shape(b) for a, b in zip(self.clauses, other.clauses))
                and self.directives == other.directives)


def renumber(clauses, directives=()) -> Program:
    """Build a Program assigning ids 0..n-1 in the given order."""
    out = tuple(Clause(i, c.head, tuple(c.body), c.span) for i, c in enumerate(clauses))
    return Program(out, tuple(directives))


def indicator(t: Term) -> tuple[str, int]:
    if isinstance(t, Atom):
        return (t.name, 0)
    if isinstance(t, Struct):
        return (t.functor, t.arity)
    if isinstance(t, Cut):
        return ("!", 0)
    if isinstance(t, Tuple):
        return (",", 2)
    if isinstance(t, PList):
        return (".", 2)
    if isinstance(t, Curly):
        return ("{}", 1)
    raise TypeError(f"not callable: {t!r}")


def children(t: Term) -> tuple:
    """Ordered child terms as they appear in the source (list tail last)."""
    if isinstance(t, Struct):
        return t.args
    if isinstance(t, PList):
        return t.elems + ((t.tail,) if t.tail is not None else ())
    if isinstance(t, (Tuple, Curly)):
        return t.elems
    return ()


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from subterms(c)


def variables(t: Term) -> list[str]:
    """Named variables in first-occurrence order."""
    seen: dict[str, None] = {}
    for s in subterms(t):
        if isinstance(s, Var):
            seen.setdefault(s.name, None)
    return list(seen)


def clause_variables(c: Clause) -> list[str]:
    seen: dict[str, None] = {}
    for t in (c.head, *c.body):
        for v in variables(t):
            seen.setdefault(v, None)
    return list(seen)


def depth(t: Term) -> int:
    cs = children(t)
    return 1 + max((depth(c) for c in cs), default=0)


def contains_hole(t: Term) -> bool:
    return any(isinstance(s, Hole) for s in subterms(t))
