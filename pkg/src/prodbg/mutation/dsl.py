"""Productions of the term grammar that mutants are built from."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..analysis import goal_predicates
from ..terms import (
    Anon, Atom, Clause, Curly, Cut, Int, PList, Program, Struct, Tuple, Var,
    clause_variables, subterms,
)

KINDS = ("predicate", "op2", "op1", "list", "list_c", "tuple", "curly", "atom",
         "variable", "integer", "anonymous", "cut", "empty")

OP2 = ("=", "\\=", "==", "\\==", "is", "=:=", "=\\=", "<", ">", "=<", ">=",
       "+", "-", "*", "/", "//", "mod", ";", "->")
OP1 = ("\\+", "-")
ARITH_OPS = frozenset({"+", "-", "*", "/", "//", "mod"})
GOAL_OP1 = frozenset({"\\+"})

# engine predicates offered to every clause, on top of the program's own symbols
BUILTIN_PREDICATES = (("member", 2), ("append", 3), ("length", 2), ("msort", 2), ("between", 3))
BUILTIN_ATOMS = ("[]",)
CALLABLE_ATOMS = frozenset({"true", "fail", "false"})

# minimum number of children for the variable-arity constructors
VARIADIC_MIN = {"list": 1, "list_c": 2, "tuple": 2, "curly": 1}

TERM, OPT, EMPTY = "term", "opt", "empty"


@dataclass(frozen=True)
class Production:
    id: int
    kind: str
    symbol: object = None
    output_type: str = TERM
    child_types: tuple = ()

    @property
    def variadic(self) -> bool:
        return self.kind in VARIADIC_MIN

    @property
    def is_leaf(self) -> bool:
        return not self.child_types

    @property
    def min_children(self) -> int:
        return VARIADIC_MIN.get(self.kind, len(self.child_types))

    def child_type(self, k: int) -> str:
        """Type expected at child slot ``k`` (slots past the end must stay empty)."""
        if k < len(self.child_types):
            return self.child_types[k]
        return OPT if self.variadic else EMPTY

    def label(self) -> str:
        if self.kind == "predicate":
            return f"{self.symbol[0]}/{self.symbol[1]}"
        if self.kind in ("op2", "op1"):
            return f"{self.symbol}/{2 if self.kind == 'op2' else 1}"
        if self.kind in ("atom", "variable", "integer"):
            return str(self.symbol)
        return {"list": "[...]", "list_c": "[...|_]", "tuple": "(...)", "curly": "{...}",
                "anonymous": "_", "cut": "!", "empty": "empty"}[self.kind]


@dataclass
class DSL:
    productions: list
    user_predicates: frozenset = frozenset()    # production ids defined by program clauses
    callable: frozenset = frozenset()           # production ids allowed as body goals
    index: dict = field(default_factory=dict)   # (kind, symbol) -> id

    def __post_init__(self):
        for i, p in enumerate(self.productions):
            if p.id != i:
                raise ValueError("production ids must be dense and ordered")
            self.index.setdefault((p.kind, p.symbol), i)

    def __len__(self) -> int:
        return len(self.productions)

    def __getitem__(self, pid: int) -> Production:
        return self.productions[pid]

    @property
    def empty(self) -> int:
        return self.index[("empty", None)]

    def lookup(self, kind: str, symbol=None) -> int:
        return self.index[(kind, symbol)]

    def production_of(self, t) -> int:
        """Production id for the root of a syntax term."""
        if isinstance(t, Struct):
            if t.arity == 2 and ("op2", t.functor) in self.index:
                return self.index[("op2", t.functor)]
            if t.arity == 1 and ("op1", t.functor) in self.index:
                return self.index[("op1", t.functor)]
            return self.index[("predicate", (t.functor, t.arity))]
        if isinstance(t, Atom):
            pid = self.index.get(("predicate", (t.name, 0)))
            return pid if pid is not None else self.index[("atom", t.name)]
        if isinstance(t, Int):
            return self.index[("integer", t.value)]
        if isinstance(t, Var):
            return self.index[("variable", t.name)]
        if isinstance(t, Anon):
            return self.index[("anonymous", None)]
        if isinstance(t, Cut):
            return self.index[("cut", None)]
        if isinstance(t, PList):
            return self.index[("list_c" if t.tail is not None else "list", None)]
        if isinstance(t, Tuple):
            return self.index[("tuple", None)]
        if isinstance(t, Curly):
            return self.index[("curly", None)]
        raise TypeError(f"term has no production: {t!r}")

    def describe(self) -> list[str]:
        return [f"{p.id}\t{p.kind}\t{p.label()}\t{p.output_type}\t{' '.join(p.child_types)}"
                for p in self.productions]


class _Builder:
    def __init__(self):
        self.prods: list[Production] = []
        self.seen: set = set()

    def add(self, kind, symbol=None, child_types=(), output_type=TERM):
        key = (kind, symbol)
        if key in self.seen:
            return
        self.seen.add(key)
        self.prods.append(Production(len(self.prods), kind, symbol, output_type, tuple(child_types)))


def _program_symbols(program: Program):
    """Predicate indicators, compound functors, atoms and integers occurring in the program."""
    preds: dict = {}
    functors: dict = {}
    atoms: dict = {}
    ints: set = set()
    for c in program.clauses:
        preds.setdefault(c.key, None)
    for c in program.clauses:
        for g in c.body:
            for key in sorted(goal_predicates(g)):
                if key[1] == 0 and key[0] in ("!",):
                    continue
                preds.setdefault(key, None)
        for t in (c.head, *c.body):
            for s in subterms(t):
                if isinstance(s, Struct):
                    functors.setdefault((s.functor, s.arity), None)
                elif isinstance(s, Atom):
                    atoms.setdefault(s.name, None)
                elif isinstance(s, Int):
                    ints.add(s.value)
    return preds, functors, atoms, ints


def build_dsl(program: Program, target: int | None = None, fresh_vars: int = 2,
              builtins: bool = True) -> DSL:
    """Productions for mutating clause ``target`` of ``program``."""
    if target is not None and not 0 <= target < len(program.clauses):
        raise IndexError(f"no clause {target}")
    preds, functors, atoms, ints = _program_symbols(program)
    user = list(program.predicate_index)
    b = _Builder()
    b.add("empty", None, (), EMPTY)

    pred_keys: list = []
    for key in user:
        pred_keys.append(key)
    for key in preds:
        if key not in pred_keys:
            pred_keys.append(key)
    if builtins:
        for key in BUILTIN_PREDICATES:
            if key not in pred_keys:
                pred_keys.append(key)
    for key in functors:
        name, n = key
        if n == 2 and name in OP2 or n == 1 and name in OP1 or name == ",":
            continue
        if key not in pred_keys:
            pred_keys.append(key)
    # curried variants, needed when closures are passed to maplist
    if any(name == "maplist" for name, _ in preds):
        for name, n in list(pred_keys):
            for m in range(n - 1, 0, -1):
                if (name, m) not in pred_keys:
                    pred_keys.append((name, m))
    pred_keys = [k for k in pred_keys if k[0] not in ("!", ",") and k not in (("\\+", 1),)
                 and not (k[1] == 2 and k[0] in OP2) and not (k[1] == 1 and k[0] in OP1)]
    for name, n in pred_keys:
        b.add("predicate", (name, n), (TERM,) * n)
    for op in OP2:
        b.add("op2", op, (TERM, TERM))
    for op in OP1:
        b.add("op1", op, (TERM,))
    for kind, m in VARIADIC_MIN.items():
        b.add(kind, None, (TERM,) * m)
    pred_names0 = {name for name, n in pred_keys if n == 0}
    for name in list(BUILTIN_ATOMS) + list(atoms):
        if name not in pred_names0 and name != "!":
            b.add("atom", name)
    names = clause_variables(program.clause(target)) if target is not None else []
    for name in names:
        b.add("variable", name)
    fresh, i = [], 0
    while len(fresh) < fresh_vars:
        if f"V{i}" not in names:
            fresh.append(f"V{i}")
        i += 1
    for name in fresh:
        b.add("variable", name)
    b.add("anonymous")
    for v in sorted(ints | {0, 1}):
        b.add("integer", v)
    b.add("cut")

    prods = b.prods
    user_ids = frozenset(p.id for p in prods if p.kind == "predicate" and p.symbol in set(user))
    callable_ids = frozenset(
        p.id for p in prods
        if p.kind == "predicate"
        or (p.kind == "op2" and p.symbol not in ARITH_OPS)
        or (p.kind == "op1" and p.symbol in GOAL_OP1)
        or p.kind == "cut"
        or (p.kind == "atom" and p.symbol in CALLABLE_ATOMS))
    return DSL(prods, user_ids, callable_ids)


def tiny_dsl(spec: list[tuple], user: tuple = (), callable_: tuple | None = None) -> DSL:
    """Build a DSL from explicit ``(kind, symbol)`` pairs; ``empty`` is added first."""
    b = _Builder()
    b.add("empty", None, (), EMPTY)
    for kind, symbol in spec:
        if kind == "predicate":
            b.add(kind, symbol, (TERM,) * symbol[1])
        elif kind == "op2":
            b.add(kind, symbol, (TERM, TERM))
        elif kind == "op1":
            b.add(kind, symbol, (TERM,))
        elif kind in VARIADIC_MIN:
            b.add(kind, None, (TERM,) * VARIADIC_MIN[kind])
        else:
            b.add(kind, symbol)
    prods = b.prods
    user_ids = frozenset(p.id for p in prods if p.kind == "predicate" and p.symbol in set(user))
    if callable_ is None:
        callable_ids = frozenset(p.id for p in prods if p.kind in ("predicate", "op2", "cut"))
    else:
        callable_ids = frozenset(p.id for p in prods if (p.kind, p.symbol) in set(callable_))
    return DSL(prods, user_ids, callable_ids)


def clause_symbols_covered(dsl: DSL, c: Clause) -> bool:
    try:
        for t in (c.head, *c.body):
            for s in subterms(t):
                dsl.production_of(s)
    except (KeyError, TypeError):
        return False
    return True
