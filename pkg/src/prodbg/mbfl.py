"""Mutation-based fault localization: kill matrices, Metallaxis and MUSE."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .engine import ExecLimits
from .harness import PASS, SuiteResult, run_suite
from .mutation import FL, FL_BUDGET, Mutant, MutantStream
from .sbfl import Ranking, rank
from .terms import Program

MBFL_FORMULAS = ("metallaxis", "muse")


@dataclass
class KillMatrix:
    killed: np.ndarray          # (mutants, tests) bool
    origin: np.ndarray          # clause id per mutant
    base_failed: np.ndarray     # (tests,) bool, failing on the original program
    n_clauses: int
    mutants: list = field(default_factory=list)

    @property
    def n_failed(self) -> int:
        return int(self.base_failed.sum())

    @property
    def n_passed(self) -> int:
        return int(len(self.base_failed) - self.base_failed.sum())

    def stats(self):
        """(kf, kp): failing and passing tests that kill each mutant."""
        return _kernels.kill_stats(self.killed, self.base_failed)


def generate_mutants(program: Program, cid: int, budget: int = FL_BUDGET, **kw) -> list[Mutant]:
    if budget <= 0:
        return []
    return list(MutantStream(program, cid, 1, FL, budget, **kw))


def _pass_mask(result: SuiteResult) -> np.ndarray:
    return np.array([o.outcome == PASS for o in result.outcomes], dtype=np.bool_)


def kill_matrix(program: Program, mutants, suite, limits: ExecLimits | None = None,
                base: SuiteResult | None = None) -> KillMatrix:
    suite = list(suite)
    if base is None:
        base = run_suite(program, suite, limits)
    base_pass = _pass_mask(base)
    rows = []
    for m in mutants:
        res = run_suite(m.program, suite, limits)
        rows.append(_pass_mask(res) != base_pass)
    killed = np.array(rows, dtype=np.bool_).reshape(len(rows), len(suite))
    origin = np.array([m.origin for m in mutants], dtype=np.int64)
    return KillMatrix(killed, origin, ~base_pass, len(program.clauses), list(mutants))


def metallaxis_scores(km: KillMatrix) -> np.ndarray:
    kf, kp = km.stats()
    return _kernels.metallaxis(kf, kp, km.origin, km.n_clauses, km.n_failed)


def muse_scores(km: KillMatrix) -> np.ndarray:
    # a kill on an originally failing test is a fail-to-pass flip, and vice versa
    f2p, p2f = km.stats()
    return _kernels.muse(f2p, p2f, km.origin, km.n_clauses, km.n_failed, km.n_passed)


def mbfl_scores(km: KillMatrix, formula: str = "metallaxis") -> np.ndarray:
    if formula == "metallaxis":
        return metallaxis_scores(km)
    if formula == "muse":
        return muse_scores(km)
    raise ValueError(f"unknown MBFL formula {formula!r}; choose from {', '.join(MBFL_FORMULAS)}")


def localize(program: Program, suite, formula: str = "metallaxis", limits: ExecLimits | None = None,
             budget: int = FL_BUDGET, base: SuiteResult | None = None) -> tuple[Ranking, KillMatrix]:
    mutants = []
    for cid in range(len(program.clauses)):
        mutants.extend(generate_mutants(program, cid, budget))
    km = kill_matrix(program, mutants, suite, limits, base)
    return rank(mbfl_scores(km, formula), program), km


def dump_csv(km: KillMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["clause", "mutant"] + [f"t{j}" for j in range(km.killed.shape[1])])
    for i, m in enumerate(km.mutants):
        w.writerow([int(km.origin[i]), m.text] + [int(x) for x in km.killed[i]])
    return buf.getvalue()
