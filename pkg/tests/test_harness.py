import json

import pytest

from prodbg.engine import FAILURE, RESOURCE_LIMIT, RUNTIME_ERROR, SUCCESS, ExecLimits
from prodbg.errors import SuiteError
from prodbg.harness import (
    ERROR, FAIL, FAILED, PASS, SUCCEED, TIMEOUT, SuiteResult, TestOutcome, classify, compare_results,
    dump_results, load_suite, parse_suite, run_suite,
)
from prodbg.parser import parse_program

from conftest import load_program, load_tests


def test_parse_signs():
    suite = parse_suite("+ duplicate([1,2],[1,1,2,2]).\n- duplicate([1],[1]).\n")
    assert [t.expectation for t in suite] == [SUCCEED, FAIL]
    assert [t.id for t in suite] == [0, 1]
    assert suite[0].raw_text == "duplicate([1,2],[1,1,2,2])."


def test_comments_only():
    assert parse_suite("% nothing\n\n   % here\n") == []


def test_duplicate_lines_allowed():
    assert len(parse_suite("+ a.\n+ a.\n")) == 2


@pytest.mark.parametrize("text, line", [("+ a.\n? b.\n", 2), ("+ a.\n\n+ f(.\n", 3)])
def test_bad_lines_report_line(text, line):
    with pytest.raises(SuiteError, match=f"line {line}"):
        parse_suite(text)


def test_load_suite_file(tmp_path):
    p = tmp_path / "s.tests"
    p.write_text("% c\n+ x.\n", encoding="utf-8")
    assert len(load_suite(p)) == 1


def test_classify_table():
    table = {
        (SUCCESS, SUCCEED): PASS, (FAILURE, SUCCEED): FAILED,
        (SUCCESS, FAIL): FAILED, (FAILURE, FAIL): PASS,
        (RUNTIME_ERROR, SUCCEED): ERROR, (RUNTIME_ERROR, FAIL): ERROR,
        (RESOURCE_LIMIT, SUCCEED): TIMEOUT, (RESOURCE_LIMIT, FAIL): TIMEOUT,
    }
    for (status, exp), outcome in table.items():
        assert classify(status, exp) == outcome


def test_correct_duplicate_passes(fixed_duplicate, duplicate_suite):
    assert run_suite(fixed_duplicate, duplicate_suite).all_pass


def test_buggy_duplicate(buggy_duplicate):
    suite = parse_suite("+ duplicate([],[]).\n+ duplicate([1,2],[1,1,2,2]).\n")
    res = run_suite(buggy_duplicate, suite)
    assert [o.outcome for o in res.outcomes] == [PASS, FAILED]
    assert res.failing == {1}


def test_loop_times_out():
    res = run_suite(parse_program("p :- p."), parse_suite("+ p.\n"), ExecLimits(max_steps=500))
    assert res[0].outcome == TIMEOUT


def test_traces_only_when_asked(family):
    suite = parse_suite("+ grandparent(alice, carol).\n")
    assert run_suite(family, suite)[0].trace is None
    assert len(run_suite(family, suite, trace_on=True)[0].trace) == 6


def test_empty_suite(family):
    res = run_suite(family, [])
    assert len(res) == 0 and res.all_pass
    assert res.summary()["total"] == 0


def _result(*outcomes):
    return SuiteResult([TestOutcome(i, f"t{i}", SUCCEED, o, "") for i, o in enumerate(outcomes)])


def test_compare_examples():
    x = _result(FAILED, PASS)
    assert compare_results(x, x).flipped_to_pass == frozenset()
    flips = compare_results(x, _result(PASS, PASS))
    assert (flips.flipped_to_pass, flips.flipped_to_fail) == ({0}, set())
    flips = compare_results(_result(PASS), _result(TIMEOUT))
    assert (flips.flipped_to_pass, flips.flipped_to_fail) == (set(), {0})


def test_compare_antisymmetric():
    outcomes = [PASS, FAILED, ERROR, TIMEOUT]
    for a in outcomes:
        for b in outcomes:
            ra, rb = _result(a, b), _result(b, a)
            assert compare_results(ra, rb).flipped_to_pass == compare_results(rb, ra).flipped_to_fail


def test_compare_mismatch():
    with pytest.raises(SuiteError):
        compare_results(_result(PASS), _result(PASS, PASS))


def test_dump_shape(fixed_duplicate, duplicate_suite):
    rows = json.loads(dump_results(run_suite(fixed_duplicate, duplicate_suite)))
    assert set(rows[0]) == {"id", "text", "expectation", "outcome", "millis"}


@pytest.mark.parametrize("name", ["duplicate", "family", "len", "sum", "maxl", "rev", "count", "isort",
                                  "last", "evens"])
def test_fixture_programs_pass(name):
    assert run_suite(load_program(name), load_tests(name)).all_pass


def test_deterministic(buggy_duplicate, duplicate_suite):
    a = run_suite(buggy_duplicate, duplicate_suite, trace_on=True)
    b = run_suite(buggy_duplicate, duplicate_suite, trace_on=True)
    assert [o.trace for o in a.outcomes] == [o.trace for o in b.outcomes]
