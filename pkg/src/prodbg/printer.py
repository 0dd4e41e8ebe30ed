"""Canonical pretty-printing of terms, clauses and programs."""

from __future__ import annotations

import re

from .parser import INFIX_OPS, PREFIX_OPS
from .terms import (
    Anon, Atom, Clause, Curly, Cut, Hole, Int, PList, Program, Struct, Tuple, Var,
)

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_SYMBOL_ATOM = re.compile(r"[+\-*/\\^<>=~:.?@#&$]+\Z")


def quote_atom(name: str) -> str:
    if _PLAIN_ATOM.match(name) or name in ("[]", "{}", "!", ";"):
        return name
    if _SYMBOL_ATOM.match(name) and name != ".":
        return name
    esc = name.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t")
    return f"'{esc}'"


def term_to_str(t, prec: int = 1200, holes: bool = False) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Anon):
        return "_"
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Atom):
        text = quote_atom(t.name)
        if t.name == ",":
            return "','"
        if (t.name in INFIX_OPS or t.name in PREFIX_OPS) and prec < 999:
            return f"({text})"
        return text
    if isinstance(t, Cut):
        return "!"
    if isinstance(t, Hole):
        if not holes:
            raise ValueError("hole in term; render in hint mode")
        return "?"
    if isinstance(t, PList):
        inner = ", ".join(term_to_str(e, 999, holes) for e in t.elems)
        if t.tail is not None:
            inner += "|" + term_to_str(t.tail, 999, holes)
        return f"[{inner}]"
    if isinstance(t, Tuple):
        if len(t.elems) == 1:
            return term_to_str(t.elems[0], prec, holes)
        return "(" + ", ".join(term_to_str(e, 999, holes) for e in t.elems) + ")"
    if isinstance(t, Curly):
        return "{" + ", ".join(term_to_str(e, 999, holes) for e in t.elems) + "}"
    if isinstance(t, Struct):
        f, args = t.functor, t.args
        if len(args) == 2 and f in INFIX_OPS and f != ",":
            p, typ = INFIX_OPS[f]
            lp = p if typ == "yfx" else p - 1
            rp = p if typ == "xfy" else p - 1
            left = term_to_str(args[0], lp, holes)
            right = term_to_str(args[1], rp, holes)
            s = f"{left} {f} {right}"
            return f"({s})" if p > prec else s
        if len(args) == 1 and f in PREFIX_OPS:
            p, typ = PREFIX_OPS[f]
            a = args[0]
            if f == "-" and isinstance(a, Int):
                return f"-({a.value})"
            ap = p if typ == "fy" else p - 1
            inner = term_to_str(a, ap, holes)
            sep = " " if (f[-1].isalpha() or not f[-1].isalnum()) else ""
            if f == "-" and not inner.startswith(("-", "(")) and not inner[0].isdigit():
                sep = ""
            s = f"{f}{sep}{inner}"
            return f"({s})" if p > prec else s
        return quote_atom(f) + "(" + ", ".join(term_to_str(a, 999, holes) for a in args) + ")"
    raise TypeError(f"cannot print {t!r}")


def clause_to_str(c: Clause, holes: bool = False) -> str:
    head = term_to_str(c.head, 1199, holes)
    if not c.body:
        return head + "."
    body = ", ".join(term_to_str(g, 999, holes) for g in c.body)
    return f"{head} :- {body}."


def program_to_str(p: Program) -> str:
    lines = [":- " + term_to_str(d, 1199) + "." for d in p.directives]
    lines += [clause_to_str(c) for c in p.clauses]
    return "".join(line + "\n" for line in lines)


def pretty(node, holes: bool = False) -> str:
    if isinstance(node, Program):
        return program_to_str(node)
    if isinstance(node, Clause):
        return clause_to_str(node, holes)
    return term_to_str(node, 1200, holes)
