"""Spectrum-based fault localization over clauses."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import FORMULAS
from .errors import SuiteError
from .harness import ERROR, PASS, TIMEOUT, SuiteResult
from .printer import clause_to_str
from .terms import Program

DEFAULT_FORMULA = "ochiai"


@dataclass(frozen=True)
class Spectrum:
    ep: np.ndarray
    ef: np.ndarray
    np_: np.ndarray
    nf: np.ndarray
    n_passed: int
    n_failed: int

    def __len__(self) -> int:
        return len(self.ep)

    def counters(self, cid: int) -> dict:
        return {"e_p": int(self.ep[cid]), "e_f": int(self.ef[cid]),
                "n_p": int(self.np_[cid]), "n_f": int(self.nf[cid])}


@dataclass(frozen=True)
class Ranking:
    entries: tuple  # ((clause id, score), ...) best first

    @property
    def order(self) -> list[int]:
        return [cid for cid, _ in self.entries]

    def position(self, cid: int) -> int:
        """1-based rank of a clause."""
        return self.order.index(cid) + 1

    def top(self, n: int) -> list[int]:
        return self.order[:n]

    def __len__(self) -> int:
        return len(self.entries)


def executed_clauses(trace) -> set[int]:
    """Clauses with at least one call or redo event attributed to them."""
    return {ev.clause_id for ev in trace
            if ev.port in ("call", "redo") and ev.clause_id is not None}


def coverage_matrix(result: SuiteResult, program: Program, include_errors: bool = False):
    """Boolean (tests x clauses) coverage plus the failing-test mask, for the tests that count."""
    rows, failed = [], []
    n = len(program.clauses)
    for o in result.outcomes:
        if o.outcome in (ERROR, TIMEOUT) and not include_errors:
            continue
        if o.trace is None:
            raise SuiteError(f"test {o.id} has no trace; run the suite with tracing on")
        row = np.zeros(n, dtype=np.bool_)
        for cid in executed_clauses(o.trace):
            if 0 <= cid < n:
                row[cid] = True
        rows.append(row)
        failed.append(o.outcome != PASS)
    cov = np.array(rows, dtype=np.bool_).reshape(len(rows), n)
    return cov, np.array(failed, dtype=np.bool_)


def spectrum_from_matrix(cov, failed) -> Spectrum:
    cov = np.asarray(cov, dtype=np.bool_)
    failed = np.asarray(failed, dtype=np.bool_)
    ep, ef, np_, nf = _kernels.spectrum_counts(cov, failed)
    n_failed = int(failed.sum())
    return Spectrum(ep, ef, np_, nf, len(failed) - n_failed, n_failed)


def collect_spectrum(result: SuiteResult, program: Program, include_errors: bool = False) -> Spectrum:
    cov, failed = coverage_matrix(result, program, include_errors)
    return spectrum_from_matrix(cov, failed)


def score(spectrum: Spectrum, formula: str = DEFAULT_FORMULA) -> np.ndarray:
    return _kernels.formula_scores(spectrum.ep, spectrum.ef, spectrum.np_, spectrum.nf, formula)


def score_counts(ef: int, nf: int, ep: int, np_: int, formula: str) -> float:
    """Score a single counter tuple."""
    return float(_kernels.formula_scores([ep], [ef], [np_], [nf], formula)[0])


def rank(scores, program: Program | None = None) -> Ranking:
    """Order clauses by descending score; ties go to the later clause."""
    if isinstance(scores, dict):
        items = list(scores.items())
    else:
        items = list(enumerate(np.asarray(scores, dtype=np.float64).tolist()))
    if program is not None and len(items) != len(program.clauses):
        raise ValueError(f"{len(items)} scores for {len(program.clauses)} clauses")
    items.sort(key=lambda cs: (-cs[1], -cs[0]))
    return Ranking(tuple((int(c), float(s)) for c, s in items))


def localize(result: SuiteResult, program: Program, formula: str = DEFAULT_FORMULA,
             include_errors: bool = False) -> tuple[Ranking, Spectrum]:
    spec = collect_spectrum(result, program, include_errors)
    return rank(score(spec, formula), program), spec


def ranking_to_json(ranking: Ranking, program: Program, formula: str | None = None,
                    spectrum: Spectrum | None = None) -> dict:
    rows = []
    for pos, (cid, s) in enumerate(ranking.entries, 1):
        c = program.clause(cid)
        row = {"clause": cid, "score": s, "rank": pos, "text": clause_to_str(c),
               "span": None if c.span is None else [c.span.line, c.span.col, c.span.end_line, c.span.end_col]}
        if spectrum is not None:
            row["counters"] = spectrum.counters(cid)
        rows.append(row)
    return {"formula": formula, "ranking": rows}


def dump_ranking(ranking: Ranking, program: Program, formula: str | None = None,
                 spectrum: Spectrum | None = None) -> str:
    return json.dumps(ranking_to_json(ranking, program, formula, spectrum), indent=2)


__all__ = [
    "FORMULAS", "DEFAULT_FORMULA", "Spectrum", "Ranking", "collect_spectrum", "coverage_matrix",
    "spectrum_from_matrix", "score", "score_counts", "rank", "localize", "ranking_to_json",
    "dump_ranking", "executed_clauses",
]
