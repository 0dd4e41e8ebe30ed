"""Backtracking enumeration of mutant assignments and decoding into programs."""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..errors import EncodingError, PrologSyntaxError, UnsupportedConstruct
from ..parser import parse_clause
from ..printer import clause_to_str
from ..terms import Clause, Program
from .dsl import build_dsl
from .encoding import (
    FL, REPAIR, SEMI, EncodedClause, changed_paths, complete_ast, decode_clause, encode,
)

FL_BUDGET = 500
REPAIR_BUDGET = 5000


@dataclass(frozen=True)
class Mutant:
    program: Program
    changed_paths: frozenset
    k: int
    origin: int
    assignment: tuple = ()
    positions: tuple = ()
    added: int = 0

    @property
    def clause(self) -> Clause:
        return self.program.clause(self.origin)

    @property
    def text(self) -> str:
        return clause_to_str(self.clause)


class AssignmentSearch:
    """Depth-first enumeration of assignments satisfying an encoded clause.

    Solutions come out ordered by the number of non-empty added nodes, then
    lexicographically by node values (production ids ascending), then by
    insertion positions. Every emitted assignment is added to the blocking set.
    """

    def __init__(self, enc: EncodedClause, max_added: int | None = None, deadline: float | None = None):
        self.enc = enc
        self.deadline = deadline
        self.truncated = False
        nodes = enc.tree.nodes
        n = len(nodes)
        self.n = n
        empty = enc.dsl.empty
        self.empty = empty
        self.orig = [nd.orig for nd in nodes]
        self.semi = [nd.binding == SEMI for nd in nodes]
        self.added_node = [nd.orig == empty for nd in nodes]
        self.parent = [nd.parent for nd in nodes]
        self.index = [nd.index for nd in nodes]
        self.kids = [list(nd.children) for nd in nodes]
        # previous sibling whose emptiness forces this node empty
        self.prev = [None] * n
        for nd in nodes:
            if nd.parent is not None and nd.index > 0:
                sib = nodes[nd.parent].children
                self.prev[nd.id] = sib[nd.index - 1]
        roots = enc.tree.roots
        for a, b in zip(roots[1:], roots[2:]):
            self.prev[b] = a
        self.variadic = [p.variadic for p in enc.dsl.productions]
        self.user = enc.dsl.user_predicates
        self.semi_suffix = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            self.semi_suffix[i] = self.semi_suffix[i + 1] + (1 if self.semi[i] else 0)
        self.pad_sub = [0] * n
        for i in range(n - 1, -1, -1):
            self.pad_sub[i] = (1 if self.added_node[i] else 0) + sum(self.pad_sub[c] for c in self.kids[i])
        if max_added is None:
            max_added = enc.k if enc.mode == FL else 4
        self.max_added = min(max_added, sum(self.added_node))
        self._cache: dict = {}
        self.body_slots = roots[1:1 + enc.tree.n_body]
        self.extras = roots[1 + enc.tree.n_body:]

    def candidates(self, i: int, val: list) -> list[int]:
        p = self.parent[i]
        prev = self.prev[i]
        key = (i, None if p is None else val[p], prev is not None and val[prev] == self.empty)
        out = self._cache.get(key)
        if out is None:
            out = self._cache[key] = self._candidates(i, val)
        return out

    def _candidates(self, i: int, val: list) -> list[int]:
        enc = self.enc
        dom = enc.domains[i]
        p = self.parent[i]
        empty = self.empty
        prev = self.prev[i]
        if p is not None:
            pv = val[p]
            allowed = enc.compat[(pv, self.index[i])]
            if prev is not None and val[prev] == empty and self.variadic[pv]:
                return [empty] if empty in allowed and empty in dom else []
            out = [v for v in dom if v in allowed]
            if enc.guard_user_nesting and pv in self.user:
                parent_orig = pv == self.orig[p]
                out = [v for v in out if v not in self.user or (parent_orig and v == self.orig[i])]
            return out
        if prev is not None and val[prev] == empty:
            return [empty] if empty in dom else []
        return list(dom)

    def solutions(self):
        for a in range(self.max_added + 1):
            yield from self._level(a)
            if self.truncated:
                return

    def _level(self, target_added: int):
        enc = self.enc
        n, k = self.n, enc.k
        empty = self.empty
        only_empty = frozenset((empty,))
        val = [empty] * n
        killed = [False] * n
        orig, semi, added_node = self.orig, self.semi, self.added_node
        kids, pad_sub, semi_suffix, index = self.kids, self.pad_sub, self.semi_suffix, self.index
        compat = enc.compat
        open_pad = sum(added_node)
        cands: list = [None] * n
        ptr = [0] * n
        r_at = [0] * (n + 1)
        a_at = [0] * (n + 1)
        dec_at = [0] * n
        newly_at: list = [()] * n

        def undo(i):
            nonlocal open_pad
            open_pad += dec_at[i]
            for c in newly_at[i]:
                killed[c] = False
            newly_at[i] = ()
            val[i] = empty

        i = 0
        if n == 0:
            if k == 0 and target_added == 0:
                yield from self._positions(val)
            return
        cands[0] = self.candidates(0, val)
        ptr[0] = 0
        ticks = 0
        deadline = self.deadline
        forced = [empty]
        while i >= 0:
            ticks += 1
            if deadline is not None and not ticks & 1023 and time.monotonic() > deadline:
                self.truncated = True
                return
            if i == n:
                if r_at[n] == k and a_at[n] == target_added:
                    yield from self._positions(val)
                i -= 1
                undo(i)
                continue
            cl = cands[i]
            if ptr[i] >= len(cl):
                i -= 1
                if i >= 0:
                    undo(i)
                continue
            v = cl[ptr[i]]
            ptr[i] += 1
            r2 = r_at[i] + (1 if semi[i] and v != orig[i] else 0)
            if r2 > k:
                continue
            a2 = a_at[i] + (1 if added_node[i] and v != empty else 0)
            if a2 > target_added:
                continue
            was_killed = killed[i]
            dec = 1 if (added_node[i] and not was_killed) else 0
            newly = []
            for c in kids[i]:
                if not killed[c] and compat[(v, index[c])] == only_empty:
                    killed[c] = True
                    newly.append(c)
                    if not was_killed:
                        dec += pad_sub[c]
            if a2 + open_pad - dec < target_added or r2 + semi_suffix[i + 1] < k:
                for c in newly:
                    killed[c] = False
                continue
            open_pad -= dec
            dec_at[i] = dec
            newly_at[i] = newly
            val[i] = v
            r_at[i + 1] = r2
            a_at[i + 1] = a2
            i += 1
            if i < n:
                cands[i] = forced if killed[i] else self.candidates(i, val)
                ptr[i] = 0

    def _positions(self, val):
        empty = self.empty
        m = sum(1 for s in self.body_slots if val[s] != empty)
        choices = [[0] if val[r] == empty else list(range(m + 1)) for r in self.extras]
        out = [()]
        for ch in choices:
            out = [o + (c,) for o in out for c in ch]
        for pos in out:
            key = (tuple(val), pos)
            if key in self.enc.blocked:
                continue
            self.enc.blocked.add(key)
            yield key[0], pos


class MutantStream:
    """Iterator over decoded, de-duplicated mutants of one clause."""

    def __init__(self, program: Program, cid: int, k: int = 1, mode: str = FL, budget: int | None = None,
                 extra_body_roots: int = 0, fresh_vars: int = 2, max_added: int | None = None,
                 time_budget_ms: float | None = None, depth_cap: int | None = None,
                 branch_cap: int | None = None):
        if budget is None:
            budget = FL_BUDGET if mode == FL else REPAIR_BUDGET
        self.program = program
        self.cid = cid
        self.k = k
        self.budget = budget
        self.truncated = False
        self.emitted = 0
        self.rejected = 0
        clause = program.clause(cid)
        self.dsl = build_dsl(program, cid, fresh_vars)
        tree = complete_ast(clause, self.dsl, depth_cap, branch_cap,
                            extra_body_roots if mode == REPAIR else 0)
        self.enc = encode(tree, self.dsl, k, mode, clause)
        deadline = None if time_budget_ms is None else time.monotonic() + time_budget_ms / 1000.0
        self.search = AssignmentSearch(self.enc, max_added, deadline)
        self._orig_text = clause_to_str(clause)

    def __iter__(self):
        if self.budget <= 0:
            return
        seen = {self._orig_text}
        for assignment, pos in self.search.solutions():
            try:
                c = decode_clause(self.enc, assignment, pos)
                text = clause_to_str(c)
            except (EncodingError, ValueError):
                self.rejected += 1
                continue
            if text in seen:
                continue
            seen.add(text)
            try:
                reparsed = parse_clause(text, c.id)
            except (PrologSyntaxError, UnsupportedConstruct):
                self.rejected += 1
                continue
            if not reparsed.same_shape(c):
                self.rejected += 1
                continue
            prog = self.program.replace_clause(c.id, c.head, c.body)
            added = sum(1 for i, nd in enumerate(self.enc.nodes)
                        if nd.orig == self.dsl.empty and assignment[i] != self.dsl.empty)
            yield Mutant(prog, changed_paths(self.enc, assignment), self.k, c.id, assignment, pos, added)
            self.emitted += 1
            if self.emitted >= self.budget:
                return
        self.truncated = self.search.truncated


def enumerate_mutants(program: Program, cid: int, k: int = 1, mode: str = FL, budget: int | None = None,
                      **kw) -> list[Mutant]:
    return list(MutantStream(program, cid, k, mode, budget, **kw))
