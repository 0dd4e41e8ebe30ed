import pytest

from prodbg.engine import ExecLimits
from prodbg.harness import Flips, compare_results, parse_suite, run_suite
from prodbg.mutation.encoding import REPAIR
from prodbg.mutation.search import MutantStream
from prodbg.parser import parse_program
from prodbg.printer import clause_to_str
from prodbg.repair import (
    NOT_FOUND, REPAIRED, TIMEOUT, RepairConfig, accepts, make_hint, repair, select_best, verify,
)
from prodbg.sbfl import localize

SUITE3 = parse_suite("+ duplicate([],[]).\n+ duplicate([1],[1,1]).\n+ duplicate([1,2],[1,1,2,2]).\n")
LIMITS = ExecLimits(max_steps=20000, max_depth=2000)


def test_duplicate_repair(buggy_duplicate):
    base = run_suite(buggy_duplicate, SUITE3, LIMITS, trace_on=True)
    ranking, _ = localize(base, buggy_duplicate)
    res = repair(buggy_duplicate, SUITE3, ranking, RepairConfig(limits=LIMITS), base=base)
    assert res.status == REPAIRED
    assert res.patch.clause == 1
    assert res.patch.repaired.endswith("L2 = [H, H|L1].")
    assert res.flipped_to_pass >= {1, 2}
    assert res.flipped_to_fail == frozenset()
    assert res.hint == "duplicate([H|T], L2) :- duplicate(T, L1), L2 = ?."
    assert run_suite(res.program, SUITE3, LIMITS).all_pass
    assert verify(buggy_duplicate, res.program, SUITE3, LIMITS)
    # clauses outside the patch are untouched
    assert clause_to_str(res.program.clause(0)) == clause_to_str(buggy_duplicate.clause(0))
    assert "+duplicate([H|T], L2) :- duplicate(T, L1), L2 = [H, H|L1]." in res.diff


def test_perfect_targets(buggy_duplicate):
    res = repair(buggy_duplicate, SUITE3, cfg=RepairConfig(limits=LIMITS), targets=[1])
    assert res.status == REPAIRED and res.patch.clause == 1


def test_correct_program_not_found(fixed_duplicate):
    res = repair(fixed_duplicate, SUITE3, cfg=RepairConfig(limits=LIMITS), targets=[0, 1])
    assert res.status == NOT_FOUND
    assert res.flipped_to_pass == frozenset() and res.candidates_tested == 0


def test_tiny_time_budget(buggy_duplicate):
    res = repair(buggy_duplicate, SUITE3, cfg=RepairConfig(time_budget_ms=1, limits=LIMITS), targets=[1])
    assert res.status == TIMEOUT
    assert res.patch is None


def test_needs_ranking_or_targets(buggy_duplicate):
    with pytest.raises(ValueError):
        repair(buggy_duplicate, SUITE3, cfg=RepairConfig(limits=LIMITS))


@pytest.mark.parametrize("kw", [{"max_k": 0}, {"top_n_clauses": 0}, {"selection": "random"}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        RepairConfig(**kw)


def _flips(p, f=()):
    return Flips(frozenset(p), frozenset(f))


def test_accepts():
    assert accepts(_flips({0}))
    assert not accepts(_flips(()))
    assert not accepts(_flips({0}, {1}))


def test_select_best_examples():
    orig = parse_program("p(a, b).")
    one = parse_program("p(c, b).")
    three = parse_program("p(c, d) :- q.")
    a, b = (one, _flips({0})), (three, _flips({0, 1}))
    assert select_best([a, b], orig) is b
    a, b = (three, _flips({0})), (one, _flips({0}))
    assert select_best([a, b], orig) is b
    assert select_best([a], orig) is a
    # full tie goes to the earlier candidate
    twin = (parse_program("p(d, b)."), _flips({0}))
    assert select_best([b, twin], orig) is b
    with pytest.raises(ValueError):
        select_best([], orig)


def test_hint_examples():
    orig = parse_program("p(a) :- q.\nr(X) :- s(X).")
    head_only = parse_program("p(b) :- q.\nr(X) :- s(X).")
    assert make_hint(orig, head_only) == "p(?) :- q."
    both = parse_program("p(b) :- q.\nr(X) :- t(X).")
    assert make_hint(orig, both).splitlines() == ["p(?) :- q.", "r(X) :- ?."]
    with pytest.raises(ValueError):
        make_hint(orig, orig)


def test_k_sweep_is_minimal():
    # no single edit fixes a test without breaking another; Y is X + X needs two
    program = parse_program("double(X, Y) :- Z is X + 2.")
    suite = parse_suite("+ double(3, 6).\n- double(3, 5).\n+ double(5, 10).\n")
    cfg = RepairConfig(max_k=2, top_n_clauses=1, mutant_budget=3000, limits=LIMITS)
    res = repair(program, suite, cfg=cfg, targets=[0])
    assert res.status == REPAIRED and res.k == 2
    assert verify(program, res.program, suite, LIMITS)
    base = run_suite(program, suite, LIMITS)
    stream = MutantStream(program, 0, 1, REPAIR, cfg.mutant_budget, extra_body_roots=1,
                          max_added=cfg.max_added)
    for m in stream:
        assert not accepts(compare_results(base, run_suite(m.program, suite, LIMITS)))
    assert not stream.truncated


def test_deterministic(buggy_duplicate):
    cfg = RepairConfig(limits=LIMITS)
    a = repair(buggy_duplicate, SUITE3, cfg=cfg, targets=[1])
    b = repair(buggy_duplicate, SUITE3, cfg=cfg, targets=[1])
    assert (a.patch, a.candidates_tested) == (b.patch, b.candidates_tested)
