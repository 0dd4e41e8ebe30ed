"""Integer arithmetic evaluation for ``is/2`` and comparisons."""

from __future__ import annotations

from .runtime import Ref, deref


class PrologError(Exception):
    """Runtime error raised inside the machine (instantiation, type, ...)."""

    def __init__(self, kind: str, detail: str):
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind}: {detail}")


def _div(a: int, b: int) -> int:
    if b == 0:
        raise PrologError("evaluation_error", "zero_divisor")
    if a % b:
        raise PrologError("type_error", f"integer division {a}/{b} is not exact")
    return a // b


def _intdiv(a: int, b: int) -> int:
    if b == 0:
        raise PrologError("evaluation_error", "zero_divisor")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _mod(a: int, b: int) -> int:
    if b == 0:
        raise PrologError("evaluation_error", "zero_divisor")
    return a % b


BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "//": _intdiv,
    "mod": _mod,
}

UNARY = {
    "-": lambda a: -a,
    "+": lambda a: a,
}


def evaluate(t) -> int:
    t = deref(t)
    tt = type(t)
    if tt is int:
        return t
    if tt is Ref:
        raise PrologError("instantiation_error", "arguments are not sufficiently instantiated")
    if tt is tuple:
        if len(t) == 3:
            fn = BINARY.get(t[0])
            if fn is not None:
                return fn(evaluate(t[1]), evaluate(t[2]))
        elif len(t) == 2:
            fn = UNARY.get(t[0])
            if fn is not None:
                return fn(evaluate(t[1]))
        raise PrologError("type_error", f"evaluable {t[0]}/{len(t) - 1}")
    raise PrologError("type_error", f"evaluable {t}/0")
