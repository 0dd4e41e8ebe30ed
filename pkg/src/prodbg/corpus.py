"""Synthetic buggy instances, ground-truth faulty clauses and localization quality."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analysis import predicate_call_graph, goal_predicates, transitive_closure
from .engine import ExecLimits
from .errors import CorpusError, PrologSyntaxError, UnsupportedConstruct
from .harness import run_suite
from .mutation import FL, MutantStream
from .parser import parse_program
from .printer import program_to_str
from .sbfl import Ranking
from .terms import (
    ANON, Clause, Int, PList, Program, Struct, Tuple, Curly, Var, children,
)

EDIT_KINDS = ("mutant", "comparison_flip", "off_by_one", "variable_swap", "goal_deletion",
              "argument_abstraction")

COMPARISON_FLIPS = {
    "<": ("=<", ">", ">="), ">": (">=", "<", "=<"), "=<": ("<", ">="), ">=": (">", "=<"),
    "=:=": ("=\\=",), "=\\=": ("=:=",), "==": ("\\==",), "\\==": ("==",), "=": ("\\=",),
    "\\=": ("=",),
}

DEFAULT_KS = (1, 3, 5, 10)


@dataclass
class BuggyInstance:
    buggy: Program
    fixed: Program
    ground_truth: frozenset
    suite: list
    seed: int
    recipe: list = field(default_factory=list)

    def to_json(self, **paths) -> dict:
        d = {"ground_truth": sorted(self.ground_truth), "seed": self.seed, "recipe": self.recipe,
             "buggy": program_to_str(self.buggy), "fixed": program_to_str(self.fixed)}
        d.update(paths)
        return d


@dataclass(frozen=True)
class FLQuality:
    min_rank: int
    acc_at_k: dict
    expense: float
    n_clauses: int

    def to_json(self) -> dict:
        return {"min_rank": self.min_rank, "expense": self.expense,
                **{f"acc@{k}": v for k, v in sorted(self.acc_at_k.items())}}


# -- term editing -----------------------------------------------------------------

def _paths(t, path=()):
    yield path, t
    for i, c in enumerate(children(t)):
        yield from _paths(c, path + (i,))


def clause_paths(c: Clause):
    """(path, subterm) pairs; the first path element is the slot (0 = head)."""
    for slot, t in enumerate((c.head, *c.body)):
        for p, s in _paths(t):
            yield (slot,) + p, s


def _replace(t, path, new):
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, Struct):
        args = list(t.args)
        args[i] = _replace(args[i], rest, new)
        return Struct(t.functor, tuple(args))
    if isinstance(t, PList):
        if i < len(t.elems):
            elems = list(t.elems)
            elems[i] = _replace(elems[i], rest, new)
            return PList(tuple(elems), t.tail)
        return PList(t.elems, _replace(t.tail, rest, new))
    if isinstance(t, (Tuple, Curly)):
        elems = list(t.elems)
        elems[i] = _replace(elems[i], rest, new)
        return type(t)(tuple(elems))
    raise ValueError(f"no child {i} in {t!r}")


def replace_at(c: Clause, path, new) -> Clause:
    terms = [c.head, *c.body]
    terms[path[0]] = _replace(terms[path[0]], path[1:], new)
    return Clause(c.id, terms[0], tuple(terms[1:]), c.span)


def _edit_comparison(c, rng):
    sites = [(p, s) for p, s in clause_paths(c)
             if isinstance(s, Struct) and s.arity == 2 and s.functor in COMPARISON_FLIPS]
    if not sites:
        return None
    p, s = rng.choice(sites)
    return replace_at(c, p, Struct(rng.choice(COMPARISON_FLIPS[s.functor]), s.args))


def _edit_off_by_one(c, rng):
    sites = [(p, s) for p, s in clause_paths(c) if isinstance(s, Int)]
    if not sites:
        return None
    p, s = rng.choice(sites)
    return replace_at(c, p, Int(s.value + rng.choice((-1, 1))))


def _edit_variable_swap(c, rng):
    sites = [(p, s) for p, s in clause_paths(c) if isinstance(s, Var)]
    names = sorted({s.name for _, s in sites})
    if len(names) < 2:
        return None
    p, s = rng.choice(sites)
    return replace_at(c, p, Var(rng.choice([n for n in names if n != s.name])))


def _edit_goal_deletion(c, rng):
    if not c.body:
        return None
    i = rng.randrange(len(c.body))
    return Clause(c.id, c.head, c.body[:i] + c.body[i + 1:], c.span)


def _edit_argument(c, rng):
    if not isinstance(c.head, Struct):
        return None
    sites = [i for i, a in enumerate(c.head.args) if a != ANON]
    if not sites:
        return None
    return replace_at(c, (0, rng.choice(sites)), ANON)


def _edit_mutant(program, cid, rng, budget=200):
    ms = list(MutantStream(program, cid, 1, FL, budget))
    if not ms:
        return None
    return rng.choice(ms).clause


_RULES = {
    "comparison_flip": _edit_comparison,
    "off_by_one": _edit_off_by_one,
    "variable_swap": _edit_variable_swap,
    "goal_deletion": _edit_goal_deletion,
    "argument_abstraction": _edit_argument,
}


def apply_edit(program: Program, kind: str, cid: int, rng: random.Random) -> Program | None:
    c = program.clause(cid)
    new = _edit_mutant(program, cid, rng) if kind == "mutant" else _RULES[kind](c, rng)
    if new is None or new.same_shape(c):
        return None
    return program.replace_clause(cid, new.head, new.body)


def _reparses(p: Program) -> bool:
    try:
        return parse_program(program_to_str(p)).same_shape(p)
    except (PrologSyntaxError, UnsupportedConstruct):
        return False


def inject_bugs(correct: Program, suite, n_bugs: int = 1, seed: int = 0, kinds=EDIT_KINDS,
                max_tries: int = 100, limits: ExecLimits | None = None) -> BuggyInstance:
    if n_bugs < 1:
        raise CorpusError("n_bugs must be at least 1")
    suite = list(suite)
    if not suite:
        raise CorpusError("an empty suite cannot expose an injected bug")
    if not correct.clauses:
        raise CorpusError("program has no clauses to edit")
    base = run_suite(correct, suite, limits)
    if not base.all_pass:
        raise CorpusError("the correct program must pass its whole suite")
    rng = random.Random(seed)
    for _ in range(max_tries):
        prog, recipe = correct, []
        for _ in range(n_bugs):
            for _ in range(20):
                kind = rng.choice(kinds)
                cid = rng.randrange(len(prog.clauses))
                edited = apply_edit(prog, kind, cid, rng)
                if edited is not None:
                    prog = edited
                    recipe.append({"kind": kind, "clause": cid})
                    break
        truth = frozenset(a.id for a, b in zip(prog.clauses, correct.clauses) if not a.same_shape(b))
        if not truth or not _reparses(prog):
            continue
        if run_suite(prog, suite, limits).all_pass:
            continue
        return BuggyInstance(prog, correct, truth, suite, seed, recipe)
    raise CorpusError(f"no failing variant found in {max_tries} attempts")


# -- ground truth -------------------------------------------------------------------

def align(buggy: Program, fixed: Program) -> dict:
    """Map each buggy clause id to its counterpart in ``fixed`` by (predicate, ordinal)."""
    out = {}
    for key, ids in buggy.predicate_index.items():
        other = fixed.predicate_index.get(key, [])
        for i, cid in enumerate(ids):
            out[cid] = other[i] if i < len(other) else None
    return out


def modified_clauses(buggy: Program, fixed: Program) -> set:
    out = set()
    for cid, fid in align(buggy, fixed).items():
        if fid is None or not buggy.clause(cid).same_shape(fixed.clause(fid)):
            out.add(cid)
    return out


def ground_truth(buggy: Program, fixed: Program, newly_passed) -> frozenset:
    graph = predicate_call_graph(fixed)
    for key, calls in predicate_call_graph(buggy).items():
        graph.setdefault(key, set()).update(calls)
    roots: set = set()
    for test in newly_passed:
        for g in test.goal:
            roots |= goal_predicates(g)
    relevant = transitive_closure(graph, roots)
    return frozenset(cid for cid in modified_clauses(buggy, fixed)
                     if buggy.clause(cid).key in relevant)


# -- quality --------------------------------------------------------------------------

def fl_quality(ranking: Ranking, truth, ks=DEFAULT_KS, at_least_one: bool = False) -> FLQuality:
    truth = set(truth)
    if not truth:
        raise CorpusError("ground truth is empty")
    order = ranking.order
    if not truth <= set(order):
        raise CorpusError("ground truth contains clauses missing from the ranking")
    n = len(order)
    min_rank = next(i for i, cid in enumerate(order, 1) if cid in truth)
    acc = {}
    for k in ks:
        hit = len(truth & set(order[:k]))
        acc[k] = (1.0 if hit else 0.0) if at_least_one else hit / len(truth)
    return FLQuality(min_rank, acc, 100.0 * min_rank / n, n)


def batch_min_ranks(orders, truths) -> np.ndarray:
    """MinRank for many rankings of the same program size at once."""
    orders = [list(o) for o in orders]
    if not orders:
        return np.zeros(0, dtype=np.int64)
    n = len(orders[0])
    pos = np.zeros((len(orders), n), dtype=np.int64)
    mask = np.zeros((len(orders), n), dtype=np.bool_)
    for i, (order, truth) in enumerate(zip(orders, truths)):
        for p, cid in enumerate(order, 1):
            pos[i, cid] = p
        for cid in truth:
            mask[i, cid] = True
    return _kernels.min_ranks(pos, mask)


def aggregate(qualities, n_timeouts: int = 0, ks=DEFAULT_KS) -> dict:
    qualities = list(qualities)
    total = len(qualities) + n_timeouts
    out = {"instances": len(qualities),
           "timeout_pct": 100.0 * n_timeouts / total if total else 0.0}
    if not qualities:
        out.update({"min_rank_mean": None, "expense_mean": None, **{f"acc@{k}": None for k in ks}})
        return out
    out["min_rank_mean"] = sum(q.min_rank for q in qualities) / len(qualities)
    out["expense_mean"] = sum(q.expense for q in qualities) / len(qualities)
    for k in ks:
        out[f"acc@{k}"] = sum(q.acc_at_k[k] for q in qualities) / len(qualities)
    return out


def write_manifest(instances, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, inst in enumerate(instances):
            fh.write(json.dumps(inst.to_json(index=i), sort_keys=True) + "\n")


def read_manifest(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
