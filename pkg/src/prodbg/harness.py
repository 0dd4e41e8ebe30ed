"""Pass/fail test suites: loading, running and comparing results."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .engine import (
    FAILURE, RESOURCE_LIMIT, RUNTIME_ERROR, SUCCESS, ExecLimits, Machine,
)
from .errors import PrologSyntaxError, SuiteError
from .parser import parse_query
from .terms import Program

SUCCEED, FAIL = "succeed", "fail"
PASS, FAILED, ERROR, TIMEOUT = "pass", "fail", "error", "timeout"


@dataclass(frozen=True)
class TestCase:
    id: int
    goal: tuple
    expectation: str
    raw_text: str

    __test__ = False  # keep pytest from collecting this class


@dataclass
class TestOutcome:
    id: int
    text: str
    expectation: str
    outcome: str
    status: str
    millis: float = 0.0
    trace: list | None = None
    error: str | None = None

    __test__ = False


@dataclass
class SuiteResult:
    outcomes: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __getitem__(self, tid: int) -> TestOutcome:
        return self.outcomes[tid]

    @property
    def passed(self) -> frozenset:
        return frozenset(o.id for o in self.outcomes if o.outcome == PASS)

    @property
    def failing(self) -> frozenset:
        return frozenset(o.id for o in self.outcomes if o.outcome != PASS)

    @property
    def all_pass(self) -> bool:
        return all(o.outcome == PASS for o in self.outcomes)

    def summary(self) -> dict:
        counts = {PASS: 0, FAILED: 0, ERROR: 0, TIMEOUT: 0}
        for o in self.outcomes:
            counts[o.outcome] += 1
        counts["total"] = len(self.outcomes)
        return counts

    def to_json(self) -> list:
        return [{"id": o.id, "text": o.text, "expectation": o.expectation,
                 "outcome": o.outcome, "millis": round(o.millis, 3)} for o in self.outcomes]


@dataclass(frozen=True)
class Flips:
    flipped_to_pass: frozenset
    flipped_to_fail: frozenset


def parse_suite(text: str) -> list[TestCase]:
    tests = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        sign, body = stripped[0], stripped[1:].strip()
        if sign not in "+-":
            raise SuiteError(f"line {lineno}: test must start with '+' or '-'")
        try:
            goals = parse_query(body)
        except PrologSyntaxError as e:
            raise SuiteError(f"line {lineno}: {e.message}") from e
        tests.append(TestCase(len(tests), tuple(goals), SUCCEED if sign == "+" else FAIL, body))
    return tests


def load_suite(path) -> list[TestCase]:
    return parse_suite(Path(path).read_text(encoding="utf-8"))


def classify(status: str, expectation: str) -> str:
    if status == RESOURCE_LIMIT:
        return TIMEOUT
    if status == RUNTIME_ERROR:
        return ERROR
    if (status == SUCCESS and expectation == SUCCEED) or (status == FAILURE and expectation == FAIL):
        return PASS
    return FAILED


def run_suite(program: Program, suite, limits: ExecLimits | None = None, trace_on: bool = False,
              unknown: str = "error") -> SuiteResult:
    machine = Machine(program, limits, unknown)
    outcomes = []
    for test in suite:
        t0 = time.perf_counter()
        res = machine.solve(list(test.goal), trace_on)
        millis = (time.perf_counter() - t0) * 1000.0
        outcomes.append(TestOutcome(test.id, test.raw_text, test.expectation,
                                    classify(res.status, test.expectation), res.status, millis,
                                    res.trace if trace_on else None, res.error))
    return SuiteResult(outcomes)


def compare_results(base: SuiteResult, cand: SuiteResult) -> Flips:
    if [(o.id, o.text) for o in base.outcomes] != [(o.id, o.text) for o in cand.outcomes]:
        raise SuiteError("results come from different suites")
    b, c = base.passed, cand.passed
    return Flips(frozenset(c - b), frozenset(b - c))


def dump_results(result: SuiteResult) -> str:
    return json.dumps(result.to_json(), indent=2)
