"""Named integer operators and the text syntax for exact inputs.

Values are typed as rationals ``p/q`` or quadratic surds such as
``(1+sqrt 5)/2``; matrices as row-major integer lists or by name.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .numeric import QuadraticSurd, simplify

_E1 = ((1, 1, 1), (1, 1, 0), (1, 0, 0))

OPERATORS: dict[str, tuple[tuple[int, ...], ...]] = {
    "fibonacci": ((0, 1), (1, 1)),
    "B": ((0, 1, 1), (0, 0, 1), (1, 0, 0)),
    "golden2d": ((3, 2, 1), (2, 2, 1), (1, 1, 1)),
    "E1": _E1,
    # the inverse of E1 - Id
    "E2": ((0, 1, 0), (1, -1, 1), (0, 1, -1)),
}


class ParseError(ValueError):
    def __init__(self, text: str, detail: str = ""):
        msg = f"parse error: {text!r}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt)|([-+*/()]))")


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(text, f"unexpected character at {pos}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    if not out:
        raise ParseError(text, "empty value")
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(self.text, f"expected {expected or 'a value'}")
        self.i += 1
        return tok

    def parse(self):
        value = self.expr()
        if self.peek() is not None:
            raise ParseError(self.text, f"trailing {self.peek()!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs == 0:
                    raise ParseError(self.text, "division by zero")
                value = value / rhs
        return value

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.atom()

    def atom(self):
        tok = self.take()
        if tok == "(":
            value = self.expr()
            self.take(")")
            return value
        if tok == "sqrt":
            arg = self.unary()
            arg = simplify(arg)
            if not isinstance(arg, (int, Fraction)):
                raise ParseError(self.text, "sqrt of a rational only")
            if arg < 0:
                raise ParseError(self.text, "sqrt of a negative number")
            return QuadraticSurd.sqrt(arg)
        if tok.isdigit():
            return Fraction(int(tok))
        raise ParseError(self.text, f"unexpected {tok!r}")


def parse_value(text: str):
    """Exact value of a rational or real-quadratic expression."""
    try:
        return simplify(_Parser(text).parse())
    except ParseError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise ParseError(text, str(exc)) from None


def parse_matrix(text: str):
    """Named operator or a row-major list of 4 or 9 integers."""
    key = text.strip()
    if key in OPERATORS:
        return OPERATORS[key]
    try:
        nums = [int(x) for x in re.split(r"[\s,;]+", key.strip("[]() ")) if x]
    except ValueError:
        raise ParseError(text, "matrix entries must be integers") from None
    if len(nums) == 4:
        return (tuple(nums[:2]), tuple(nums[2:]))
    if len(nums) == 9:
        return (tuple(nums[:3]), tuple(nums[3:6]), tuple(nums[6:]))
    raise ParseError(text, "need 4 or 9 entries or an operator name")


_VECTOR = re.compile(r"\(([^()]*)\)")


def parse_vectors(text: str) -> list[tuple[int, ...]]:
    """``"(1,2) (2,3)"`` -> ``[(1, 2), (2, 3)]``."""
    found = _VECTOR.findall(text)
    rest = _VECTOR.sub(" ", text).strip()
    if not found or rest:
        raise ParseError(text, "expected vectors like (1,2) (2,3)")
    out = []
    for body in found:
        try:
            out.append(tuple(int(x) for x in body.replace(",", " ").split()))
        except ValueError:
            raise ParseError(text, "vector entries must be integers") from None
    return out
