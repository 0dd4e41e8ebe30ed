"""Tokenizer and operator-precedence parser for the supported Prolog subset."""

from __future__ import annotations

from typing import NamedTuple

from .errors import PrologSyntaxError, UnsupportedConstruct
from .terms import (
    ANON, CUT, NIL, Atom, Clause, Curly, Int, PList, Program, Span, Struct,
    Tuple, Var, renumber,
)

# name -> (priority, type)
INFIX_OPS = {
    ":-": (1200, "xfx"),
    ";": (1100, "xfy"),
    "->": (1050, "xfy"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "\\=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "is": (700, "xfx"),
    "=:=": (700, "xfx"),
    "=\\=": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    "=<": (700, "xfx"),
    ">=": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
    "//": (400, "yfx"),
    "mod": (400, "yfx"),
}

PREFIX_OPS = {
    ":-": (1200, "fx"),
    "?-": (1200, "fx"),
    "\\+": (900, "fy"),
    "-": (200, "fy"),
}

SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
SOLO = set("!;")
PUNCT = set("()[]{},|")
TERMINATORS = {")", "]", "}", ",", "|"}


class Token(NamedTuple):
    kind: str  # name, qname, var, int, punct, end
    text: str
    line: int
    col: int
    end_line: int
    end_col: int
    layout: bool  # whitespace or comment directly before the token


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    line, col = 1, 1
    layout = True

    def adv(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            adv(1)
            layout = True
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                adv(1)
            layout = True
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise PrologSyntaxError("unterminated block comment", line, col)
            adv(j + 2 - i)
            layout = True
            continue
        sl, sc, start = line, col, i
        if ch.isdigit():
            if text.startswith("0'", i):
                raise UnsupportedConstruct("character code literal", sl, sc)
            if i + 1 < n and text[i] == "0" and text[i + 1] in "xob" and i + 2 < n and text[i + 2].isalnum():
                raise UnsupportedConstruct("radix integer literal", sl, sc)
            while i < n and text[i].isdigit():
                adv(1)
            if i + 1 < n and text[i] == "." and text[i + 1].isdigit():
                raise UnsupportedConstruct("float literal", sl, sc)
            if i < n and (text[i].isalpha() or text[i] == "_"):
                raise PrologSyntaxError(f"malformed number {text[start:i + 1]!r}", sl, sc)
            toks.append(Token("int", text[start:i], sl, sc, line, col, layout))
        elif ch == "_" or ch.isupper():
            while i < n and (text[i].isalnum() or text[i] == "_"):
                adv(1)
            toks.append(Token("var", text[start:i], sl, sc, line, col, layout))
        elif ch.isalpha():
            while i < n and (text[i].isalnum() or text[i] == "_"):
                adv(1)
            toks.append(Token("name", text[start:i], sl, sc, line, col, layout))
        elif ch == "'":
            adv(1)
            buf = []
            while True:
                if i >= n:
                    raise PrologSyntaxError("unterminated quoted atom", sl, sc)
                c = text[i]
                if c == "'":
                    if i + 1 < n and text[i + 1] == "'":
                        buf.append("'")
                        adv(2)
                        continue
                    adv(1)
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise PrologSyntaxError("bad escape", line, col)
                    e = text[i + 1]
                    mapping = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"', "`": "`"}
                    if e == "\n":
                        adv(2)
                        continue
                    if e not in mapping:
                        raise UnsupportedConstruct(f"escape sequence \\{e}", line, col)
                    buf.append(mapping[e])
                    adv(2)
                    continue
                if c == "\n":
                    raise PrologSyntaxError("newline in quoted atom", line, col)
                buf.append(c)
                adv(1)
            toks.append(Token("qname", "".join(buf), sl, sc, line, col, layout))
        elif ch == '"':
            raise UnsupportedConstruct("string literal", sl, sc)
        elif ch == "`":
            raise UnsupportedConstruct("back-quoted string", sl, sc)
        elif ch in PUNCT:
            adv(1)
            toks.append(Token("punct", ch, sl, sc, line, col, layout))
        elif ch in SOLO:
            adv(1)
            toks.append(Token("name", ch, sl, sc, line, col, layout))
        elif ch in SYMBOL_CHARS:
            if ch == "." and (i + 1 >= n or text[i + 1].isspace() or text[i + 1] == "%"):
                adv(1)
                toks.append(Token("end", ".", sl, sc, line, col, layout))
            else:
                while i < n and text[i] in SYMBOL_CHARS:
                    adv(1)
                toks.append(Token("name", text[start:i], sl, sc, line, col, layout))
        else:
            raise PrologSyntaxError(f"unexpected character {ch!r}", sl, sc)
        layout = False
    return toks


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self, k: int = 0) -> Token | None:
        j = self.pos + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            raise PrologSyntaxError("unexpected end of input",
                                    last.end_line if last else 1, last.end_col if last else 1)
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind not in ("punct", "end"):
            raise PrologSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.text == text

    def _infix(self, tok: Token | None):
        if tok is None:
            return None
        if tok.kind == "name" and tok.text in INFIX_OPS:
            return tok.text
        if tok.kind == "punct" and tok.text == ",":
            return ","
        if tok.kind == "punct" and tok.text == "|":
            return None
        return None

    def _starts_term(self, tok: Token | None) -> bool:
        if tok is None or tok.kind == "end":
            return False
        if tok.kind == "punct":
            return tok.text in "([{"
        if tok.kind == "name" and tok.text in INFIX_OPS and tok.text not in PREFIX_OPS:
            return False
        return True

    def parse(self, max_prec: int):
        left, left_prec = self.primary(max_prec)
        return self.infix_loop(left, left_prec, max_prec)

    def infix_loop(self, left, left_prec: int, max_prec: int):
        while True:
            tok = self.peek()
            op = self._infix(tok)
            if op is None:
                tok = self.peek()
                if tok is not None and tok.kind == "name" and tok.text not in INFIX_OPS and \
                        all(c in SYMBOL_CHARS for c in tok.text):
                    raise UnsupportedConstruct(f"operator {tok.text}", tok.line, tok.col)
                return left, left_prec
            prec, typ = INFIX_OPS[op]
            if prec > max_prec:
                return left, left_prec
            left_max = prec if typ == "yfx" else prec - 1
            right_max = prec if typ == "xfy" else prec - 1
            if left_prec > left_max:
                return left, left_prec
            self.next()
            right, _ = self.parse(right_max)
            left, left_prec = Struct(op, (left, right)), prec

    def primary(self, max_prec: int):
        tok = self.next()
        k = tok.kind
        if k == "int":
            return Int(int(tok.text)), 0
        if k == "var":
            return (ANON if tok.text == "_" else Var(tok.text)), 0
        if k == "end":
            raise PrologSyntaxError("unexpected end of clause", tok.line, tok.col)
        if k == "punct":
            if tok.text == "(":
                inner, _ = self.parse(1200)
                self.expect(")")
                if isinstance(inner, Struct) and inner.functor == "," and inner.arity == 2:
                    return Tuple(tuple(_flatten_comma(inner))), 0
                return inner, 0
            if tok.text == "[":
                if self.at_punct("]"):
                    self.next()
                    return self._maybe_call(NIL.name, tok)
                elems = [self.parse(999)[0]]
                while self.at_punct(","):
                    self.next()
                    elems.append(self.parse(999)[0])
                tail = None
                if self.at_punct("|"):
                    self.next()
                    tail = self.parse(999)[0]
                self.expect("]")
                return PList(tuple(elems), tail), 0
            if tok.text == "{":
                if self.at_punct("}"):
                    self.next()
                    return self._maybe_call("{}", tok)
                inner, _ = self.parse(1200)
                self.expect("}")
                return Curly(tuple(_flatten_comma(inner))), 0
            raise PrologSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)
        name = tok.text
        nxt = self.peek()
        if nxt is not None and nxt.kind == "punct" and nxt.text == "(" and not nxt.layout:
            return self._maybe_call(name, tok)
        if k == "name" and name == "-" and nxt is not None and nxt.kind == "int" and not nxt.layout:
            self.next()
            return Int(-int(nxt.text)), 0
        if k == "name" and name in PREFIX_OPS:
            prec, typ = PREFIX_OPS[name]
            if not self._starts_term(nxt) or (self._infix(nxt) is not None and not (
                    nxt.kind == "name" and nxt.text in PREFIX_OPS)):
                return Atom(name), (prec if prec <= max_prec else 0)
            if prec > max_prec:
                prec, typ = 999, typ
            arg_max = prec if typ == "fy" else prec - 1
            arg, _ = self.parse(arg_max)
            return Struct(name, (arg,)), prec
        if k == "name" and name == "!":
            return CUT, 0
        if k == "name" and name in INFIX_OPS:
            prec = INFIX_OPS[name][0]
            return Atom(name), (prec if prec <= max_prec else 0)
        if k == "name" and all(c in SYMBOL_CHARS for c in name):
            raise UnsupportedConstruct(f"operator {name}", tok.line, tok.col)
        return Atom(name), 0

    def _maybe_call(self, name: str, tok: Token):
        nxt = self.peek()
        if nxt is not None and nxt.kind == "punct" and nxt.text == "(" and not nxt.layout:
            self.next()
            args = [self.parse(999)[0]]
            while self.at_punct(","):
                self.next()
                args.append(self.parse(999)[0])
            self.expect(")")
            return Struct(name, tuple(args)), 0
        return Atom(name), 0


def _flatten_comma(t) -> list:
    out = []
    while isinstance(t, Struct) and t.functor == "," and t.arity == 2:
        out.append(t.args[0])
        t = t.args[1]
    out.append(t)
    return out


def _normalize(t):
    """Turn leftover ','/2 operator terms into tuples, recursively."""
    if isinstance(t, Struct):
        if t.functor == "," and t.arity == 2:
            return Tuple(tuple(_normalize(x) for x in _flatten_comma(t)))
        return Struct(t.functor, tuple(_normalize(a) for a in t.args))
    if isinstance(t, PList):
        return PList(tuple(_normalize(a) for a in t.elems),
                     _normalize(t.tail) if t.tail is not None else None)
    if isinstance(t, Tuple):
        return Tuple(tuple(_normalize(a) for a in t.elems))
    if isinstance(t, Curly):
        return Curly(tuple(_normalize(a) for a in t.elems))
    return t


def _body_goals(t) -> tuple:
    return tuple(_normalize(g) for g in _flatten_comma(t))


def _check_goal(g, tok: Token):
    if isinstance(g, (Int, PList)) or g is ANON:
        raise PrologSyntaxError(f"body goal is not callable: {g!r}", tok.line, tok.col)


def _split_statements(toks: list[Token]) -> list[list[Token]]:
    stmts, cur = [], []
    for t in toks:
        cur.append(t)
        if t.kind == "end":
            stmts.append(cur)
            cur = []
    if cur:
        last = cur[-1]
        raise PrologSyntaxError("missing '.' at end of clause", last.end_line, last.end_col)
    return stmts


def _parse_statement(toks: list[Token]):
    p = _Parser(toks)
    term, _ = p.parse(1200)
    end = p.next()
    if end.kind != "end":
        raise PrologSyntaxError(f"operator expected, found {end.text!r}", end.line, end.col)
    return term


def parse_program(text: str) -> Program:
    """Parse source text into a Program; clause ids follow source order."""
    clauses, directives = [], []
    for stmt in _split_statements(tokenize(text)):
        first, last = stmt[0], stmt[-1]
        term = _parse_statement(stmt)
        span = Span(first.line, first.col, last.end_line, last.end_col)
        if isinstance(term, Struct) and term.functor in (":-", "?-") and term.arity == 1:
            directives.append(_normalize(term.args[0]))
            continue
        if isinstance(term, Struct) and term.functor == ":-" and term.arity == 2:
            head, body = term.args
            goals = _body_goals(body)
            for g in goals:
                _check_goal(g, first)
        else:
            head, goals = term, ()
        head = _normalize(head)
        if not isinstance(head, (Atom, Struct)) or (isinstance(head, Struct) and head.functor in (",", ";", "->", ":-")):
            raise PrologSyntaxError(f"invalid clause head: {head!r}", first.line, first.col)
        clauses.append(Clause(len(clauses), head, goals, span))
    return Program(tuple(clauses), tuple(directives))


def parse_query(text: str) -> list:
    """Parse a goal sequence terminated by '.' into a list of goals."""
    stmts = _split_statements(tokenize(text))
    if len(stmts) != 1:
        raise PrologSyntaxError(f"expected exactly one query, found {len(stmts)}")
    term = _parse_statement(stmts[0])
    if isinstance(term, Struct) and term.functor == "?-" and term.arity == 1:
        term = term.args[0]
    goals = list(_body_goals(term))
    for g in goals:
        _check_goal(g, stmts[0][0])
    return goals


def parse_term(text: str):
    """Parse a single term (a trailing '.' is optional)."""
    text = text.strip()
    if not text.endswith("."):
        text += " ."
    stmts = _split_statements(tokenize(text))
    if len(stmts) != 1:
        raise PrologSyntaxError("expected a single term")
    return _normalize(_parse_statement(stmts[0]))


def parse_clause(text: str, cid: int = 0) -> Clause:
    prog = parse_program(text)
    if len(prog.clauses) != 1:
        raise PrologSyntaxError(f"expected one clause, found {len(prog.clauses)}")
    c = prog.clauses[0]
    return Clause(cid, c.head, c.body, c.span)


__all__ = ["parse_program", "parse_query", "parse_term", "parse_clause", "tokenize", "renumber"]
