"""Finite-domain view of a clause: completed node tree, bindings and constraints."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EncodingError
from ..terms import (
    ANON, CUT, Atom, Clause, Curly, Int, PList, Program, Struct, Tuple, Var,
    children, depth,
)
from .dsl import DSL, EMPTY, OPT, TERM

BOUND, SEMI, UNBOUND = "bound", "semi_bound", "unbound"
FL, REPAIR = "fl", "repair"


@dataclass
class Node:
    id: int
    path: tuple          # (root slot, child index, ...)
    level: int           # 1 for roots
    orig: int            # original production id (the empty production for padding)
    binding: str = SEMI
    parent: int | None = None
    index: int = 0       # position among the parent's children
    children: list = field(default_factory=list)
    padding: bool = False
    role: str = "term"   # head, body, extra or term


@dataclass
class CompletedTree:
    nodes: list
    roots: list              # node ids of head, body slots, then extra roots
    n_body: int
    n_extra: int
    depth_cap: int
    branch_cap: int

    def __len__(self) -> int:
        return len(self.nodes)


def source_shape(c: Clause) -> tuple[int, int]:
    """(depth, branching) of the clause's term trees."""
    terms = (c.head, *c.body)
    d = max(depth(t) for t in terms)
    b = 0
    stack = list(terms)
    while stack:
        t = stack.pop()
        cs = children(t)
        b = max(b, len(cs))
        stack.extend(cs)
    return d, b


def default_caps(c: Clause) -> tuple[int, int]:
    d, b = source_shape(c)
    return d + 1, max(b, 3)


def complete_ast(c: Clause, dsl: DSL, depth_cap: int | None = None, branch_cap: int | None = None,
                 extra_body_roots: int = 0) -> CompletedTree:
    """Pad the clause's trees with empty nodes to uniform depth and branching.

    Original nodes are numbered first in preorder, then padding nodes, then extra
    body roots and their padding, so ids of source nodes do not depend on the caps.
    """
    d_src, b_src = source_shape(c)
    dcap, bcap = default_caps(c)
    depth_cap = dcap if depth_cap is None else depth_cap
    branch_cap = bcap if branch_cap is None else branch_cap
    if depth_cap < d_src or branch_cap < b_src:
        raise EncodingError(f"caps ({depth_cap}, {branch_cap}) smaller than clause shape ({d_src}, {b_src})")

    nodes: list[Node] = []
    roots: list[int] = []
    pending: list[tuple] = []   # padding to create after all source nodes

    def add(path, level, orig, parent, index, padding, role):
        n = Node(len(nodes), path, level, orig, SEMI, parent, index, [], padding, role)
        nodes.append(n)
        if parent is not None:
            nodes[parent].children.append(n.id)
        return n.id

    def walk(t, path, level, parent, index, role):
        nid = add(path, level, dsl.production_of(t), parent, index, False, role)
        cs = children(t)
        for i, ch in enumerate(cs):
            walk(ch, path + (i,), level + 1, nid, i, "term")
        if level < depth_cap:
            for i in range(len(cs), branch_cap):
                pending.append((path + (i,), level + 1, nid, i))
        return nid

    terms = (c.head, *c.body)
    for slot, t in enumerate(terms):
        roots.append(walk(t, (slot,), 1, None, 0, "head" if slot == 0 else "body"))

    def pad(path, level, parent, index, role="term"):
        nid = add(path, level, dsl.empty, parent, index, True, role)
        if level < depth_cap:
            for i in range(branch_cap):
                pad(path + (i,), level + 1, nid, i)
        return nid

    for path, level, parent, index in pending:
        pad(path, level, parent, index)
    # children lists must be in slot order
    for n in nodes:
        n.children.sort(key=lambda cid: nodes[cid].index)
    for j in range(extra_body_roots):
        roots.append(pad((len(terms) + j,), 1, None, 0, "extra"))
    return CompletedTree(nodes, roots, len(c.body), extra_body_roots, depth_cap, branch_cap)


@dataclass
class EncodedClause:
    tree: CompletedTree
    dsl: DSL
    k: int
    mode: str
    clause: Clause
    domains: list            # per node: allowed production ids, ascending
    compat: dict             # (production id, child slot) -> frozenset of production ids
    semi_bound: list         # node ids carrying a relaxation variable
    blocked: set = field(default_factory=set)
    guard_user_nesting: bool = True

    @property
    def nodes(self) -> list:
        return self.tree.nodes

    @property
    def n_positions(self) -> int:
        return self.tree.n_body

    def relaxation(self, assignment) -> list[bool]:
        """r_i for every semi-bound node under an assignment of node values."""
        nodes = self.tree.nodes
        return [assignment[i] != nodes[i].orig for i in self.semi_bound]


def compatibility(dsl: DSL, branch_cap: int) -> dict:
    nonempty = frozenset(p.id for p in dsl.productions if p.output_type != EMPTY)
    empty = frozenset({dsl.empty})
    table = {}
    for p in dsl.productions:
        for k in range(branch_cap):
            ct = p.child_type(k) if p.output_type != EMPTY else EMPTY
            table[(p.id, k)] = nonempty if ct == TERM else (nonempty | empty if ct == OPT else empty)
    return table


def encode(tree: CompletedTree, dsl: DSL, k: int, mode: str = FL, clause: Clause | None = None,
           guard_user_nesting: bool = True) -> EncodedClause:
    if k < 1:
        raise EncodingError("k must be at least 1; the original clause is not a mutant")
    if mode not in (FL, REPAIR):
        raise EncodingError(f"unknown mode {mode!r}")
    nodes = tree.nodes
    for n in nodes:
        if n.role == "extra" or (n.padding and mode == FL):
            n.binding = SEMI
        elif n.padding:
            n.binding = SEMI if n.role == "extra" else UNBOUND
        else:
            n.binding = SEMI
    semi = [n.id for n in nodes if n.binding == SEMI]
    if k > len(semi):
        raise EncodingError(f"k={k} exceeds the {len(semi)} semi-bound nodes")

    all_ids = list(range(len(dsl)))
    leaves = [p.id for p in dsl.productions if p.is_leaf]
    head_ok = sorted(dsl.user_predicates)
    body_ok = sorted(dsl.callable | {dsl.empty})
    cuts = {p.id for p in dsl.productions if p.kind == "cut"}
    domains = []
    for n in nodes:
        if n.binding == BOUND:
            dom = [n.orig]
        else:
            dom = leaves if n.level >= tree.depth_cap else all_ids
            if n.role == "head":
                dom = [v for v in dom if v in set(head_ok)]
            elif n.role in ("body", "extra"):
                allowed = set(body_ok)
                dom = [v for v in dom if v in allowed or v == n.orig]
            else:
                # a cut only makes sense as a goal
                dom = [v for v in dom if v not in cuts or v == n.orig]
            if n.orig not in dom and n.binding != UNBOUND:
                dom = sorted(set(dom) | {n.orig})
        domains.append(sorted(dom))
    return EncodedClause(tree, dsl, k, mode, clause, domains, compatibility(dsl, tree.branch_cap),
                         semi, set(), guard_user_nesting)


# -- decoding -------------------------------------------------------------------

def _build(enc: EncodedClause, assignment, nid: int):
    dsl = enc.dsl
    node = enc.tree.nodes[nid]
    p = dsl[assignment[nid]]
    if p.kind == "empty":
        return None
    kids = []
    for cid in node.children:
        t = _build(enc, assignment, cid)
        if t is not None:
            kids.append(t)
    if len(kids) < p.min_children or (not p.variadic and len(kids) != len(p.child_types)):
        raise EncodingError(f"node {nid}: {p.label()} with {len(kids)} children")
    kind = p.kind
    if kind == "predicate":
        return Atom(p.symbol[0]) if p.symbol[1] == 0 else Struct(p.symbol[0], tuple(kids))
    if kind in ("op2", "op1"):
        return Struct(p.symbol, tuple(kids))
    if kind == "list":
        return PList(tuple(kids))
    if kind == "list_c":
        return PList(tuple(kids[:-1]), kids[-1])
    if kind == "tuple":
        return Tuple(tuple(kids))
    if kind == "curly":
        return Curly(tuple(kids))
    if kind == "atom":
        return Atom(p.symbol)
    if kind == "variable":
        return Var(p.symbol)
    if kind == "integer":
        return Int(p.symbol)
    if kind == "anonymous":
        return ANON
    if kind == "cut":
        return CUT
    raise EncodingError(f"cannot decode production {p!r}")


def decode_clause(enc: EncodedClause, assignment, positions=()) -> Clause:
    tree = enc.tree
    head = _build(enc, assignment, tree.roots[0])
    if not isinstance(head, (Atom, Struct)):
        raise EncodingError("decoded head is not callable")
    body_slots = tree.roots[1:1 + tree.n_body]
    extras = tree.roots[1 + tree.n_body:]
    original = [t for t in (_build(enc, assignment, r) for r in body_slots) if t is not None]
    inserted: dict[int, list] = {}
    for j, r in enumerate(extras):
        t = _build(enc, assignment, r)
        if t is not None:
            inserted.setdefault(positions[j] if j < len(positions) else len(original), []).append(t)
    body = []
    for i in range(len(original) + 1):
        body.extend(inserted.get(i, ()))
        if i < len(original):
            body.append(original[i])
    cid = enc.clause.id if enc.clause is not None else 0
    span = enc.clause.span if enc.clause is not None else None
    return Clause(cid, head, tuple(body), span)


def decode(enc: EncodedClause, assignment, program: Program, positions=()) -> Program:
    c = decode_clause(enc, assignment, positions)
    return program.replace_clause(c.id, c.head, c.body)


def changed_paths(enc: EncodedClause, assignment) -> frozenset:
    nodes = enc.tree.nodes
    return frozenset(nodes[i].path for i in enc.semi_bound if assignment[i] != nodes[i].orig)


# -- debug dump -----------------------------------------------------------------

def dump_constraints(enc: EncodedClause, type_impl: bool = True) -> str:
    """Line-oriented listing of the constraint store."""
    dsl = enc.dsl
    out = [f"# mode {enc.mode} nodes {len(enc.nodes)} productions {len(dsl)} "
           f"depth {enc.tree.depth_cap} branch {enc.tree.branch_cap}"]
    for n in enc.nodes:
        dom = enc.domains[n.id]
        out.append(f"node {n.id} domain [{' '.join(map(str, dom))}] binding {n.binding} "
                   f"orig {n.orig} ({dsl[n.orig].label()}) path {'.'.join(map(str, n.path))}")
    for n in enc.nodes:
        if n.binding == SEMI:
            out.append(f"relax r{n.id} <-> n{n.id} != {n.orig}")
    if type_impl:
        for p in dsl.productions:
            for k in range(enc.tree.branch_cap):
                ok = sorted(enc.compat[(p.id, k)])
                out.append(f"type-impl {p.id} child {k} {{{' '.join(map(str, ok))}}}")
    out.append(f"contiguous body {' '.join(map(str, enc.tree.roots[1:]))}")
    for j in range(enc.tree.n_extra):
        out.append(f"position {j} domain [0..{enc.tree.n_body}]")
    out.append(f"card {enc.k}")
    for blk in sorted(enc.blocked):
        vals, pos = blk
        body = ", ".join(f"n{i}={v}" for i, v in enumerate(vals))
        if pos:
            body += ", " + ", ".join(f"p{j}={v}" for j, v in enumerate(pos))
        out.append(f"block {{{body}}}")
    return "".join(line + "\n" for line in out)
