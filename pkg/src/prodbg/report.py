"""End-to-end pipeline (test, localize, repair, measure) and report rendering."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import mbfl, sbfl
from .config import DEFAULTS
from .engine import ExecLimits
from .errors import ProdbgError, PrologSyntaxError, SuiteError, UnsupportedConstruct
from .harness import SuiteResult, load_suite, run_suite
from .llm import EndpointConfig, LLMError, build_fl_prompt, parse_fl_response, query_model
from .metrics import program_metrics
from .parser import parse_program
from .printer import clause_to_str
from .repair import RepairConfig, RepairResult, repair
from .terms import Program

SECTIONS = ("tests", "fl", "repair_hint", "repair_full_diff", "metrics")
EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class ReportError(ProdbgError):
    pass


@dataclass
class Report:
    program_path: str
    tests: dict
    localization: dict | None = None
    repair: dict | None = None
    metrics: dict | None = None
    timing: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.tests["failed"] == 0


def limits_from(cfg: dict) -> ExecLimits:
    lim = cfg["limits"]
    return ExecLimits(lim["steps"], lim["depth"], lim["timeout_ms"])


def repair_config_from(cfg: dict, time_budget_ms: float | None = None) -> RepairConfig:
    r = cfg["repair"]
    budget = r["time_budget_ms"] if time_budget_ms is None else max(1, int(min(r["time_budget_ms"], time_budget_ms)))
    return RepairConfig(r["max_k"], r["top_n"], r["budget"], budget, r["extra_body_roots"],
                        r["max_added"], limits_from(cfg))


def tests_section(result: SuiteResult) -> dict:
    s = result.summary()
    return {"total": s["total"], "passed": s["pass"], "failed": s["total"] - s["pass"],
            "results": [{"id": o.id, "text": o.text, "expectation": o.expectation,
                         "outcome": o.outcome} for o in result.outcomes]}


def localize(program: Program, suite, result: SuiteResult, cfg: dict, notes: list):
    """Ranking for the configured method, falling back to SBFL when the LLM is unavailable."""
    fl = cfg["fl"]
    method = fl["method"]
    if method == "llm":
        llm = cfg["llm"]
        try:
            bundle = build_fl_prompt(llm["description"], llm["reference"], program)
            ecfg = EndpointConfig(llm["base_url"], llm["model"], llm["n"], llm["temperature"], llm["timeout"])
            texts = query_model(ecfg, bundle)
            return parse_fl_response(texts[0] if texts else "", program), "llm", None
        except (LLMError, ValueError) as e:
            notes.append(f"llm localization unavailable ({e}); using sbfl")
            method = "sbfl"
    if method == "mbfl":
        formula = fl["formula"] if fl["formula"] in mbfl.MBFL_FORMULAS else "metallaxis"
        ranking, _ = mbfl.localize(program, suite, formula, limits_from(cfg), fl["mutant_budget"], result)
        return ranking, "mbfl", formula
    if method != "sbfl":
        raise ReportError(f"unknown localization method {method!r}")
    formula = fl["formula"]
    ranking, _ = sbfl.localize(result, program, formula, fl["include_errors"])
    return ranking, "sbfl", formula


def fl_section(ranking, program: Program, method: str, formula, top: int) -> dict:
    rows = []
    for pos, (cid, score) in enumerate(ranking.entries[:top], 1):
        c = program.clause(cid)
        rows.append({"rank": pos, "clause": cid, "score": score, "text": clause_to_str(c),
                     "line": None if c.span is None else c.span.line})
    return {"method": method, "formula": formula, "top": rows}


def repair_section(res: RepairResult) -> dict:
    d = res.to_json()
    d["k"] = res.k
    d["patch"] = None if res.patch is None else {"clause": res.patch.clause, "original": res.patch.original,
                                                 "repaired": res.patch.repaired}
    return d


def run_pipeline(program_path, suite_path, cfg: dict | None = None) -> tuple[Report | None, int, str | None]:
    """Returns (report, exit code, error message)."""
    cfg = cfg or DEFAULTS
    t_start = time.perf_counter()
    deadline = time.monotonic() + cfg["pipeline"]["time_budget_ms"] / 1000.0
    try:
        program = parse_program(Path(program_path).read_text(encoding="utf-8"))
        suite = load_suite(suite_path)
    except (OSError, UnicodeDecodeError) as e:
        return None, EXIT_ERROR, f"cannot read input: {e}"
    except (PrologSyntaxError, UnsupportedConstruct, SuiteError) as e:
        return None, EXIT_ERROR, f"cannot parse input: {e}"

    timing = {}
    t0 = time.perf_counter()
    limits = limits_from(cfg)
    result = run_suite(program, suite, limits, trace_on=True)
    timing["tests_ms"] = (time.perf_counter() - t0) * 1000.0
    report = Report(str(program_path), tests_section(result), timing=timing)
    report.metrics = program_metrics(program).to_json()
    if result.all_pass:
        timing["total_ms"] = (time.perf_counter() - t_start) * 1000.0
        return _finish(report, cfg), EXIT_PASS, None

    try:
        t0 = time.perf_counter()
        ranking, method, formula = localize(program, suite, result, cfg, report.notes)
        timing["localization_ms"] = (time.perf_counter() - t0) * 1000.0
        report.localization = fl_section(ranking, program, method, formula, cfg["report"]["top"])
        remaining = (deadline - time.monotonic()) * 1000.0
        if remaining <= 0:
            report.notes.append("time budget exhausted before repair")
        else:
            t0 = time.perf_counter()
            res = repair(program, suite, ranking, repair_config_from(cfg, remaining), base=result)
            timing["repair_ms"] = (time.perf_counter() - t0) * 1000.0
            report.repair = repair_section(res)
    except ProdbgError as e:
        return None, EXIT_ERROR, str(e)
    timing["total_ms"] = (time.perf_counter() - t_start) * 1000.0
    return _finish(report, cfg), EXIT_FAIL, None


def _finish(report: Report, cfg: dict) -> Report:
    if cfg["pipeline"].get("zero_timing"):
        report.timing = {k: 0.0 for k in report.timing}
        if report.repair is not None:
            report.repair["millis"] = 0.0
    return report


def check_sections(sections) -> list:
    sections = list(sections)
    for s in sections:
        if s not in SECTIONS:
            raise ReportError(f"unknown report section {s!r}; choose from {', '.join(SECTIONS)}")
    return sections


def report_json(report: Report, sections=SECTIONS) -> dict:
    sections = check_sections(sections)
    rep = None
    if report.repair is not None and ("repair_hint" in sections or "repair_full_diff" in sections):
        rep = {"status": report.repair["status"], "k": report.repair["k"],
               "flipped_to_pass": report.repair["flipped_to_pass"],
               "candidates_tested": report.repair["candidates_tested"],
               "millis": report.repair["millis"]}
        if "repair_hint" in sections:
            rep["hint"] = report.repair["hint"]
        if "repair_full_diff" in sections:
            rep["diff"] = report.repair["diff"]
            rep["patch"] = report.repair["patch"]
    return {
        "status": "pass" if report.passed else "fail",
        "tests": report.tests if "tests" in sections else None,
        "localization": report.localization if "fl" in sections else None,
        "repair": rep,
        "metrics": report.metrics if "metrics" in sections else None,
        "timing": {k: round(v, 3) for k, v in sorted(report.timing.items())},
        "notes": list(report.notes),
    }


def render_report(report: Report, sections=SECTIONS, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report_json(report, sections), indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ReportError(f"unknown format {fmt!r}")
    sections = check_sections(sections)
    t = report.tests
    out = [f"{'PASS' if report.passed else 'FAIL'}: {t['passed']}/{t['total']} tests passed"]
    if "tests" in sections:
        out.append("")
        out.append("Tests")
        for r in t["results"]:
            sign = "+" if r["expectation"] == "succeed" else "-"
            out.append(f"  {r['outcome'].upper():<7} {sign} {r['text']}")
    if "fl" in sections and report.localization is not None:
        loc = report.localization
        name = loc["method"] + (f"/{loc['formula']}" if loc["formula"] else "")
        out.append("")
        out.append(f"Most suspicious clauses ({name})")
        for row in loc["top"]:
            where = f"line {row['line']}" if row["line"] is not None else f"clause {row['clause']}"
            out.append(f"  {row['rank']}. {where} (score {row['score']:.4f}): {row['text']}")
    if report.repair is not None and ("repair_hint" in sections or "repair_full_diff" in sections):
        rep = report.repair
        out.append("")
        if rep["status"] != "repaired":
            out.append(f"Repair: no fix found ({rep['status']}, {rep['candidates_tested']} candidates tried)")
        else:
            if "repair_hint" in sections:
                out.append("Hint (the parts marked ? need to change)")
                out.extend("  " + line for line in rep["hint"].splitlines())
            if "repair_full_diff" in sections:
                out.append("Suggested fix")
                out.extend("  " + line for line in rep["diff"].splitlines())
    if "metrics" in sections and report.metrics is not None:
        m = report.metrics
        out.append("")
        out.append("Metrics")
        out.append(f"  clauses: {m['clause_count']}, predicates: {m['predicate_count']}")
        out.append(f"  average clause length: {m['avg_clause_length']:.3f}")
        out.append(f"  clauses per predicate: {m['clauses_per_predicate_mean']:.3f}")
        out.append(f"  max nesting depth: {m['max_nesting_depth']}")
    for note in report.notes:
        out.append(f"note: {note}")
    return "\n".join(out) + "\n"
