"""Recursive-descent parser for polynomial expressions.

Grammar::

    poly   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' ['-'] int)?
    base   := 'X' | 'Y' | 'i' | number | '(' poly ')'
"""

from __future__ import annotations

import re

from .errors import ParseError
from .poly import MAX_EXPONENT, LaurentPoly2

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|(.))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.replace("−", "-")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("op", m.group(2), m.start(2)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def poly(self) -> LaurentPoly2:
        sign = 1
        _, v, _ = self.peek()
        if v in "+-" and v:
            self.take()
            sign = -1 if v == "-" else 1
        acc = self.term() * sign
        while True:
            _, v, _ = self.peek()
            if v in ("+", "-"):
                self.take()
                t = self.term()
                acc = acc + t if v == "+" else acc - t
            else:
                return acc

    def term(self) -> LaurentPoly2:
        acc = self.factor()
        while self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> LaurentPoly2:
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, v, pos = self.take()
            if kind != "num" or not v.isdigit():
                raise ParseError("exponent must be an integer", pos)
            n = sign * int(v)
            if abs(n) > MAX_EXPONENT:
                raise ParseError(f"exponent {n} exceeds +-{MAX_EXPONENT}", pos)
            if n < 0 and len(base) != 1:
                raise ParseError("negative exponent applied to a non-monomial", pos)
            result = base**n
            for (i, j) in result.terms:
                if abs(i) > MAX_EXPONENT or abs(j) > MAX_EXPONENT:
                    raise ParseError("exponent out of range", pos)
            return result
        return base

    def base(self) -> LaurentPoly2:
        kind, v, pos = self.take()
        if kind == "num":
            return LaurentPoly2.constant(float(v))
        if v in ("X", "x"):
            return LaurentPoly2.monomial(1, 0)
        if v in ("Y", "y"):
            return LaurentPoly2.monomial(0, 1)
        if v in ("i", "I"):
            return LaurentPoly2.constant(1j)
        if v == "(":
            inner = self.poly()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)


def parse_poly(text: str) -> LaurentPoly2:
    """Parse an expression such as ``"1 + i*X + i*Y + X*Y"`` or ``"X^-1*Y + 2"``."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    p = _Parser(text)
    result = p.poly()
    kind, v, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {v!r}", pos)
    return result
