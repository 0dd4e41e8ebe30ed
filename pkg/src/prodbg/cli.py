"""Command-line entry point: ``prodbg <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, corpus, mbfl, sbfl
from .config import dump_defaults, load_config
from .errors import ProdbgError, PrologSyntaxError, SuiteError, UnsupportedConstruct
from .harness import load_suite, parse_suite, run_suite
from .parser import parse_program
from .printer import program_to_str
from .report import (EXIT_ERROR, EXIT_FAIL, EXIT_PASS, SECTIONS, check_sections, fl_section, limits_from, localize,
                     render_report, repair_config_from, repair_section, run_pipeline, tests_section)
from .repair import repair


class UsageError(ProdbgError):
    pass


def _global_flags(p: argparse.ArgumentParser) -> None:
    # SUPPRESS lets the flags appear before or after the subcommand without clobbering
    g = p.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS, help="TOML configuration file")
    g.add_argument("--steps", type=int, default=argparse.SUPPRESS, help="inference step limit per test")
    g.add_argument("--timeout-ms", type=int, default=argparse.SUPPRESS, help="wall-clock limit per test")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prodbg", description="Fault localization and repair for Prolog exercises.")
    p.add_argument("--version", action="version", version=f"prodbg {__version__}")
    _global_flags(p)
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp)
        return sp

    def program_and_suite(sp):
        sp.add_argument("program", help="Prolog source file")
        sp.add_argument("suite", help="test file, one '+goal' or '-goal' per line")

    def repair_flags(sp):
        sp.add_argument("--max-k", type=int)
        sp.add_argument("--top-n", type=int)
        sp.add_argument("--budget", type=int, help="mutants per clause and k")

    sp = cmd("test", "run the test suite")
    program_and_suite(sp)

    sp = cmd("localize", "rank clauses by suspiciousness")
    program_and_suite(sp)
    sp.add_argument("--method", choices=("sbfl", "mbfl", "llm"))
    sp.add_argument("--formula")
    sp.add_argument("--top", type=int, help="show only the first N clauses")

    sp = cmd("repair", "search for a patch")
    program_and_suite(sp)
    sp.add_argument("--fl", default=None, help="sbfl, mbfl, llm or perfect:ID[,ID...]")
    sp.add_argument("--formula")
    repair_flags(sp)

    sp = cmd("inject", "build buggy variants of a correct program")
    program_and_suite(sp)
    sp.add_argument("--bugs", type=int, default=1)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--out", default="corpus", help="output directory")

    sp = cmd("score", "localization quality over an injected corpus")
    sp.add_argument("manifest", help="manifest.jsonl written by inject")
    sp.add_argument("--method", choices=("sbfl", "mbfl"))
    sp.add_argument("--formula")
    sp.add_argument("--at-least-one", action="store_true", help="Acc@k counts a hit if any fault is in the top k")

    sp = cmd("report", "test, localize, repair and summarize")
    program_and_suite(sp)
    sp.add_argument("--sections", help=f"comma-separated subset of {','.join(SECTIONS)}")
    sp.add_argument("--format", choices=("text", "json"))
    sp.add_argument("--method", choices=("sbfl", "mbfl", "llm"))
    sp.add_argument("--formula")
    repair_flags(sp)

    cmd("defaults", "print the default configuration")
    return p


def _config(args) -> dict:
    over: dict = {}
    if getattr(args, "steps", None) is not None:
        over.setdefault("limits", {})["steps"] = args.steps
    if getattr(args, "timeout_ms", None) is not None:
        over.setdefault("limits", {})["timeout_ms"] = args.timeout_ms
    if getattr(args, "seed", None) is not None:
        over.setdefault("pipeline", {})["seed"] = args.seed
    fl = {}
    if getattr(args, "method", None):
        fl["method"] = args.method
    if getattr(args, "formula", None):
        fl["formula"] = args.formula
    if fl:
        over["fl"] = fl
    rep = {}
    for name, key in (("max_k", "max_k"), ("top_n", "top_n"), ("budget", "budget")):
        if getattr(args, name, None) is not None:
            rep[key] = getattr(args, name)
    if rep:
        over["repair"] = rep
    return load_config(getattr(args, "config", None), over)


def _load(args):
    try:
        program = parse_program(Path(args.program).read_text(encoding="utf-8"))
        suite = load_suite(args.suite)
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError(f"cannot read input: {e}") from e
    except (PrologSyntaxError, UnsupportedConstruct, SuiteError) as e:
        raise UsageError(f"cannot parse input: {e}") from e
    return program, suite


def _emit(obj, as_json: bool, text: str) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n" if as_json else text)


def cmd_test(args, cfg) -> int:
    program, suite = _load(args)
    result = run_suite(program, suite, limits_from(cfg))
    sec = tests_section(result)
    lines = [f"{r['outcome'].upper():<7} {'+' if r['expectation'] == 'succeed' else '-'} {r['text']}"
             for r in sec["results"]]
    lines.append(f"{sec['passed']}/{sec['total']} passed")
    _emit(sec, args.json, "\n".join(lines) + "\n")
    return EXIT_PASS if result.all_pass else EXIT_FAIL


def cmd_localize(args, cfg) -> int:
    program, suite = _load(args)
    result = run_suite(program, suite, limits_from(cfg), trace_on=True)
    notes: list = []
    ranking, method, formula = localize(program, suite, result, cfg, notes)
    top = args.top if args.top is not None else len(program.clauses)
    sec = fl_section(ranking, program, method, formula, top)
    sec["notes"] = notes
    lines = [f"{r['rank']:>3}. clause {r['clause']:<3} {r['score']:.6f}  {r['text']}" for r in sec["top"]]
    lines += [f"note: {n}" for n in notes]
    _emit(sec, args.json, "\n".join(lines) + "\n")
    return EXIT_PASS if result.all_pass else EXIT_FAIL


def _perfect_targets(spec: str, n: int) -> list[int]:
    try:
        ids = [int(x) for x in spec.split(":", 1)[1].split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"bad --fl {spec!r}; expected perfect:ID[,ID...]") from e
    bad = [i for i in ids if not 0 <= i < n]
    if not ids or bad:
        raise UsageError(f"bad clause ids in --fl {spec!r}")
    return ids


def cmd_repair(args, cfg) -> int:
    program, suite = _load(args)
    limits = limits_from(cfg)
    result = run_suite(program, suite, limits, trace_on=True)
    if result.all_pass:
        _emit({"status": "pass"}, args.json, "all tests pass; nothing to repair\n")
        return EXIT_PASS
    targets, ranking = None, None
    if args.fl and args.fl.startswith("perfect:"):
        targets = _perfect_targets(args.fl, len(program.clauses))
    else:
        if args.fl:
            cfg["fl"]["method"] = args.fl
        ranking, _, _ = localize(program, suite, result, cfg, [])
    res = repair(program, suite, ranking, repair_config_from(cfg), targets=targets, base=result)
    sec = repair_section(res)
    if res.status == "repaired":
        text = res.diff + f"\n{len(res.flipped_to_pass)} test(s) fixed after {res.candidates_tested} candidates\n"
    else:
        text = f"no repair found ({res.status}) after {res.candidates_tested} candidates\n"
    _emit(sec, args.json, text)
    return EXIT_FAIL


def cmd_inject(args, cfg) -> int:
    program, suite = _load(args)
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    suite_copy = out / "suite.txt"
    suite_copy.write_text(Path(args.suite).read_text(encoding="utf-8"), encoding="utf-8")
    seed = cfg["pipeline"]["seed"]
    rows = []
    for i in range(args.count):
        inst = corpus.inject_bugs(program, suite, args.bugs, seed + i, limits=limits_from(cfg))
        path = out / f"buggy_{i:04d}.pl"
        path.write_text(program_to_str(inst.buggy), encoding="utf-8")
        rows.append(inst.to_json(index=i, program=path.name, suite=suite_copy.name))
    with open(out / "manifest.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    _emit({"instances": len(rows), "manifest": str(out / "manifest.jsonl")}, args.json,
          f"wrote {len(rows)} instance(s) to {out / 'manifest.jsonl'}\n")
    return EXIT_PASS


def cmd_score(args, cfg) -> int:
    path = Path(args.manifest)
    try:
        rows = corpus.read_manifest(path)
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read manifest: {e}") from e
    limits = limits_from(cfg)
    method, formula = cfg["fl"]["method"], cfg["fl"]["formula"]
    qualities = []
    for row in rows:
        program = parse_program(row["buggy"])
        suite = parse_suite((path.parent / row["suite"]).read_text(encoding="utf-8"))
        result = run_suite(program, suite, limits, trace_on=True)
        if method == "mbfl":
            f = formula if formula in mbfl.MBFL_FORMULAS else "metallaxis"
            ranking, _ = mbfl.localize(program, suite, f, limits, cfg["fl"]["mutant_budget"], result)
        else:
            ranking, _ = sbfl.localize(result, program, formula, cfg["fl"]["include_errors"])
        qualities.append(corpus.fl_quality(ranking, row["ground_truth"], at_least_one=args.at_least_one))
    agg = corpus.aggregate(qualities)
    per = [dict(q.to_json(), index=row.get("index", i)) for i, (row, q) in enumerate(zip(rows, qualities))]
    text = "".join(f"{k}: {v}\n" for k, v in agg.items())
    _emit({"per_instance": per, "aggregate": agg}, args.json, text)
    return EXIT_PASS


def cmd_report(args, cfg) -> int:
    sections = cfg["report"]["sections"]
    if args.sections is not None:
        sections = [s.strip() for s in args.sections.split(",") if s.strip()]
    fmt = args.format or ("json" if args.json else "text")
    check_sections(sections)  # fail before the expensive run
    report, code, err = run_pipeline(args.program, args.suite, cfg)
    if report is None:
        raise UsageError(err)
    sys.stdout.write(render_report(report, sections, fmt))
    return code


COMMANDS = {"test": cmd_test, "localize": cmd_localize, "repair": cmd_repair, "inject": cmd_inject,
            "score": cmd_score, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("config", "steps", "timeout_ms", "seed"):
        if not hasattr(args, name):
            setattr(args, name, None)
    if not hasattr(args, "json"):
        args.json = False
    if args.command == "defaults":
        sys.stdout.write(dump_defaults())
        return EXIT_PASS
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ProdbgError, ValueError) as e:
        print(f"prodbg: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
