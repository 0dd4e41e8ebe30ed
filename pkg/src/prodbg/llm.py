"""Prompt construction, chat-completions requests and response parsing."""

from __future__ import annotations

import json
import os
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass

from .errors import ProdbgError, PrologSyntaxError, UnsupportedConstruct
from .parser import parse_clause, parse_program
from .printer import clause_to_str, program_to_str
from .sbfl import Ranking
from .terms import Clause, Program

API_KEY_ENV = "PRODBG_LLM_API_KEY"
NO_FAULTY_CLAUSES = "(none identified)"

FL_SYSTEM = (
    "Your task is to find faulty clauses in a Prolog program.\n"
    "\n"
    "You should return a list of clauses in the program that are buggy.\n"
    "\n"
    "Your final answer should only include exact copies of the clauses in the program "
    "which you think contain bugs and nothing else."
)

FL_USER = (
    "Here is the program description for this program:\n"
    "\n"
    "{description}\n"
    "\n"
    "Here is the reference implementation for this program:\n"
    "\n"
    "{reference}\n"
    "\n"
    "And here is the program where you need to identify the faulty clauses:\n"
    "\n"
    "{student}\n"
)

REPAIR_SYSTEM = (
    "Your task is to repair faulty clauses in a Prolog program.\n"
    "\n"
    "You should return a minimal diff of the program, such that the buggy program is "
    "correct after applying the diff.\n"
    "\n"
    "You will be given a description of the problem, a correct reference implementation, "
    "a buggy implementation and a list of faulty clauses that should be corrected.\n"
    "\n"
    "Your final answer should include the diff and nothing else."
)

REPAIR_USER = (
    "Here is the program description for this program:\n"
    "\n"
    "{description}\n"
    "\n"
    "Here is the reference implementation for this program:\n"
    "\n"
    "{reference}\n"
    "\n"
    "And here is the program you need to correct:\n"
    "\n"
    "{student}\n"
    "\n"
    "And these are the faulty clauses in the program:\n"
    "\n"
    "{faulty}\n"
)


class LLMError(ProdbgError):
    pass


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str

    def messages(self) -> list[dict]:
        return [{"role": "system", "content": self.system}, {"role": "user", "content": self.user}]


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str = "http://localhost:8000/v1"
    model: str = "default"
    n_completions: int = 1
    temperature: float = 0.7
    timeout: float = 60.0
    api_key_env: str = API_KEY_ENV
    retries: int = 3
    backoff: float = 0.5

    def __post_init__(self):
        if self.n_completions < 1:
            raise ValueError("n_completions must be at least 1")


def _text(x) -> str:
    if isinstance(x, Program):
        return program_to_str(x).rstrip("\n")
    if isinstance(x, Clause):
        return clause_to_str(x)
    return str(x).strip("\n")


def _require(**slots):
    for name, value in slots.items():
        if value is None or not _text(value).strip():
            raise ValueError(f"{name} must not be empty")


def build_fl_prompt(description: str, reference, student) -> PromptBundle:
    """Programs may be given as text (used verbatim) or as parsed programs (pretty-printed)."""
    _require(description=description, reference=reference, student=student)
    user = FL_USER.format(description=_text(description), reference=_text(reference),
                          student=_text(student))
    return PromptBundle(FL_SYSTEM, user)


def build_repair_prompt(description: str, reference, student, faulty=()) -> PromptBundle:
    _require(description=description, reference=reference, student=student)
    faulty_text = "\n".join(_text(c) for c in faulty) if faulty else NO_FAULTY_CLAUSES
    user = REPAIR_USER.format(description=_text(description), reference=_text(reference),
                              student=_text(student), faulty=faulty_text)
    return PromptBundle(REPAIR_SYSTEM, user)


def request_body(cfg: EndpointConfig, bundle: PromptBundle) -> dict:
    return {"model": cfg.model, "messages": bundle.messages(), "n": cfg.n_completions,
            "temperature": cfg.temperature}


def query_model(cfg: EndpointConfig, bundle: PromptBundle) -> list[str]:
    """POST one chat-completions request and return the completion texts in order."""
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    data = json.dumps(request_body(cfg, bundle)).encode("utf-8")
    headers = {"Content-Type": "application/json"}
    key = os.environ.get(cfg.api_key_env)
    if key:
        headers["Authorization"] = f"Bearer {key}"
    last = None
    for attempt in range(cfg.retries + 1):
        if attempt:
            time.sleep(cfg.backoff * 2 ** (attempt - 1))
        req = urllib.request.Request(url, data=data, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=cfg.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
            break
        except urllib.error.HTTPError as e:
            last = f"HTTP {e.code} from {url}"
            if e.code in (401, 403):
                raise LLMError(f"authentication failed ({last}); set {cfg.api_key_env}") from e
            if e.code != 429 and e.code < 500:
                raise LLMError(last) from e
        except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as e:
            last = f"{type(e).__name__}: {e}"
        except json.JSONDecodeError as e:
            raise LLMError(f"malformed response from {url}: {e}") from e
    else:
        raise LLMError(f"endpoint unavailable after {cfg.retries + 1} attempts: {last}")
    try:
        choices = sorted(payload["choices"], key=lambda c: c.get("index", 0))
        return [c["message"]["content"] for c in choices]
    except (KeyError, TypeError) as e:
        raise LLMError(f"unexpected response shape: {e}") from e


# -- response parsing -------------------------------------------------------------

_FENCE = re.compile(r"^\s*```")


def _squash(s: str) -> str:
    return re.sub(r"\s+", "", s)


def _clause_key(text: str) -> str:
    try:
        return _squash(clause_to_str(parse_clause(text)))
    except (PrologSyntaxError, UnsupportedConstruct, ValueError):
        return _squash(text)


def _chunks(text: str):
    buf = []
    for line in text.splitlines():
        if _FENCE.match(line):
            continue
        s = line.strip()
        if not s:
            continue
        buf.append(s)
        if s.endswith("."):
            yield " ".join(buf)
            buf = []
    if buf:
        yield " ".join(buf)


def parse_fl_response(text: str, program: Program) -> Ranking:
    """Rank clauses named in the response first, then the rest in reverse source order."""
    keys: dict[str, int] = {}
    for c in program.clauses:
        keys.setdefault(_squash(clause_to_str(c)), c.id)
    matched: list[int] = []
    for chunk in _chunks(text or ""):
        cid = keys.get(_clause_key(chunk))
        if cid is not None and cid not in matched:
            matched.append(cid)
    rest = [c.id for c in reversed(program.clauses) if c.id not in matched]
    n = len(matched)
    entries = [(cid, float(n - i)) for i, cid in enumerate(matched)] + [(cid, 0.0) for cid in rest]
    return Ranking(tuple(entries))


_HUNK = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


def extract_diff(text: str) -> list[str] | None:
    lines = text.splitlines()
    fenced, inside, block = [], False, []
    for line in lines:
        if _FENCE.match(line):
            if inside:
                fenced.append(block)
                block = []
            inside = not inside
            continue
        if inside:
            block.append(line)
    for b in fenced:
        if any(_HUNK.match(x) for x in b):
            return b
    if any(_HUNK.match(x) for x in lines):
        return lines
    return None


def apply_unified_diff(source: str, diff_lines: list[str]) -> str | None:
    """Apply hunks to ``source``, matching lines modulo whitespace. None if they do not fit."""
    src = source.splitlines()
    out: list[str] = []
    pos = 0
    hunks: list[list[str]] = []
    for line in diff_lines:
        if line.startswith("---") or line.startswith("+++"):
            continue
        if _HUNK.match(line):
            hunks.append([])
        elif hunks and line[:1] in (" ", "-", "+", ""):
            hunks[-1].append(line)
    if not hunks:
        return None
    for hunk in hunks:
        old = [l[1:] for l in hunk if l[:1] in (" ", "-", "")]
        new = [l[1:] for l in hunk if l[:1] in (" ", "+", "")]
        old_keys = [_squash(l) for l in old]
        # drop blank trailing context produced by editors
        while old_keys and not old_keys[-1] and new and not _squash(new[-1]):
            old_keys.pop()
            old.pop()
            new.pop()
        start = None
        for i in range(pos, len(src) - len(old) + 1):
            if [_squash(l) for l in src[i:i + len(old)]] == old_keys:
                start = i
                break
        if start is None:
            return None
        out.extend(src[pos:start])
        out.extend(new)
        pos = start + len(old)
    out.extend(src[pos:])
    return "\n".join(out) + "\n"


def parse_repair_diff(text: str, program: Program, source: str | None = None) -> Program | None:
    diff = extract_diff(text or "")
    if diff is None:
        return None
    for base in ([source] if source else []) + [program_to_str(program)]:
        patched = apply_unified_diff(base, diff)
        if patched is None:
            continue
        try:
            return parse_program(patched)
        except (PrologSyntaxError, UnsupportedConstruct):
            return None
    return None
