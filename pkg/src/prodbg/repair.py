"""Mutation-based program repair guided by a fault-localization ranking."""

from __future__ import annotations

import difflib
import time
from dataclasses import dataclass, field

from .analysis import abstract_hint, program_edit_count
from .engine import ExecLimits
from .harness import Flips, SuiteResult, compare_results, run_suite
from .mutation import REPAIR, MutantStream
from .printer import clause_to_str, program_to_str
from .sbfl import Ranking
from .terms import Program

REPAIRED, NOT_FOUND, TIMEOUT = "repaired", "not_found", "timeout"


@dataclass(frozen=True)
class RepairConfig:
    max_k: int = 2
    top_n_clauses: int = 3
    mutant_budget: int = 5000
    time_budget_ms: int = 60_000
    extra_body_roots: int = 1
    max_added: int = 4
    limits: ExecLimits = field(default_factory=ExecLimits)
    # "first": stop at the first accepted candidate; "best": scan the whole
    # (k, clause) stream that produced it and keep the select_best winner
    selection: str = "best"

    def __post_init__(self):
        if self.selection not in ("first", "best"):
            raise ValueError("selection must be 'first' or 'best'")
        for name in ("max_k", "top_n_clauses", "mutant_budget", "time_budget_ms"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.extra_body_roots < 0 or self.max_added < 0:
            raise ValueError("extra_body_roots and max_added must be non-negative")


@dataclass(frozen=True)
class Patch:
    clause: int
    original: str
    repaired: str


@dataclass
class RepairResult:
    status: str
    patch: Patch | None = None
    program: Program | None = None
    flipped_to_pass: frozenset = frozenset()
    flipped_to_fail: frozenset = frozenset()
    hint: str | None = None
    diff: str | None = None
    candidates_tested: int = 0
    k: int | None = None
    millis: float = 0.0

    def to_json(self) -> dict:
        return {"status": self.status,
                "clause": None if self.patch is None else self.patch.clause,
                "diff": self.diff, "hint": self.hint,
                "flipped_to_pass": sorted(self.flipped_to_pass),
                "candidates_tested": self.candidates_tested,
                "millis": round(self.millis, 3)}


def accepts(flips: Flips) -> bool:
    """At least one test newly passes and none newly fails."""
    return len(flips.flipped_to_pass) >= 1 and not flips.flipped_to_fail


def unified_diff(original: Program, repaired: Program) -> str:
    a = program_to_str(original).splitlines(keepends=True)
    b = program_to_str(repaired).splitlines(keepends=True)
    return "".join(difflib.unified_diff(a, b, "original.pl", "repaired.pl"))


def make_hint(original: Program, repaired: Program) -> str:
    """The changed clauses of ``original`` with repaired subterms replaced by ``?``."""
    lines = []
    n = max(len(original.clauses), len(repaired.clauses))
    for i in range(n):
        a = original.clauses[i] if i < len(original.clauses) else None
        b = repaired.clauses[i] if i < len(repaired.clauses) else None
        if a is not None and b is not None:
            if a.same_shape(b):
                continue
            lines.append(clause_to_str(abstract_hint(a, b), holes=True))
        else:
            lines.append("?.")
    if not lines:
        raise ValueError("programs are identical; nothing to hint")
    return "\n".join(lines)


def _changed_clause(original: Program, repaired: Program) -> int | None:
    for a, b in zip(original.clauses, repaired.clauses):
        if not a.same_shape(b):
            return a.id
    return None


def _finish(status, program, cand, flips, tested, k, t0) -> RepairResult:
    millis = (time.perf_counter() - t0) * 1000.0
    if cand is None:
        return RepairResult(status, candidates_tested=tested, millis=millis)
    cid = _changed_clause(program, cand)
    patch = Patch(cid, clause_to_str(program.clause(cid)), clause_to_str(cand.clause(cid)))
    return RepairResult(status, patch, cand, flips.flipped_to_pass, flips.flipped_to_fail,
                        make_hint(program, cand), unified_diff(program, cand), tested, k, millis)


def repair(program: Program, suite, ranking: Ranking | None = None, cfg: RepairConfig | None = None,
           targets=None, base: SuiteResult | None = None) -> RepairResult:
    """Search mutants of the top-ranked clauses, one then two changes and so on.

    ``targets`` replaces the ranking with a fixed clause list (simulated perfect
    localization). Accepted candidates fix a test and break none. With
    ``selection="best"`` the search still stops at the first (k, clause) pair
    that yields one, but keeps scanning that pair's mutants for a candidate that
    fixes more tests; a candidate fixing every failing test ends the scan.
    """
    cfg = cfg or RepairConfig()
    t0 = time.perf_counter()
    deadline = time.monotonic() + cfg.time_budget_ms / 1000.0
    suite = list(suite)
    if base is None:
        base = run_suite(program, suite, cfg.limits)
    if base.all_pass:
        return _finish(NOT_FOUND, program, None, None, 0, None, t0)
    if targets is None:
        if ranking is None:
            raise ValueError("repair needs a ranking or explicit target clauses")
        targets = ranking.top(cfg.top_n_clauses)
    targets = [t for t in targets if 0 <= t < len(program.clauses)]
    tested = 0
    for k in range(1, cfg.max_k + 1):
        for cid in targets:
            remaining_ms = (deadline - time.monotonic()) * 1000.0
            if remaining_ms <= 0:
                return _finish(TIMEOUT, program, None, None, tested, None, t0)
            stream = MutantStream(program, cid, k, REPAIR, cfg.mutant_budget,
                                  extra_body_roots=cfg.extra_body_roots, max_added=cfg.max_added,
                                  time_budget_ms=remaining_ms)
            accepted = []
            for m in stream:
                if time.monotonic() > deadline:
                    break
                res = run_suite(m.program, suite, cfg.limits)
                tested += 1
                flips = compare_results(base, res)
                if accepts(flips):
                    accepted.append((m.program, flips))
                    if cfg.selection == "first" or flips.flipped_to_pass == base.failing:
                        break
            if accepted:
                best, flips = select_best(accepted, program)
                return _finish(REPAIRED, program, best, flips, tested, k, t0)
            if time.monotonic() > deadline:
                return _finish(TIMEOUT, program, None, None, tested, None, t0)
    return _finish(NOT_FOUND, program, None, None, tested, None, t0)


def select_best(candidates, original: Program):
    """Most tests fixed, then fewest edited nodes, then earliest.

    ``candidates`` is a sequence of ``(program, flips)`` pairs that all pass acceptance.
    """
    if not candidates:
        raise ValueError("no candidates to choose from")
    best_i = min(range(len(candidates)),
                 key=lambda i: (-len(candidates[i][1].flipped_to_pass),
                                program_edit_count(original, candidates[i][0]), i))
    return candidates[best_i]


def verify(program: Program, patched: Program, suite, limits: ExecLimits | None = None) -> bool:
    """Re-run both programs from scratch and check the acceptance predicate."""
    suite = list(suite)
    return accepts(compare_results(run_suite(program, suite, limits), run_suite(patched, suite, limits)))
