"""Text syntax for Hardy expressions.

Grammar (whitespace is ignored)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?            exponent must be constant
    atom    := NUMBER | 't' | NAME
             | ('log' | 'exp' | 'sqrt') '(' sum ')'
             | 'irr' '(' sum ')'            marks a constant irrational
             | '(' sum ')'
    NAME    := 'pi' | 'e' | 'phi' | 'sqrt2' | 'sqrt3' | 'sqrt5'

Numeric literals (``3``, ``1.5``, ``2e-3``) are exact rationals.  Named
constants are unmarked until wrapped in ``irr(...)``.
"""

from __future__ import annotations

import re
from fractions import Fraction

import mpmath

from ..errors import ParseError
from .expr import (
    IRRATIONAL,
    WORK_DPS,
    Const,
    HardyExpr,
    Node,
    T,
    add,
    div,
    exp_,
    log_,
    mul,
    neg,
    power,
    rational,
    sub,
)

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _named(name: str) -> Const:
    with mpmath.workdps(WORK_DPS):
        table = {
            "pi": mpmath.pi,
            "e": mpmath.e,
            "phi": (1 + mpmath.sqrt(5)) / 2,
            "sqrt2": mpmath.sqrt(2),
            "sqrt3": mpmath.sqrt(3),
            "sqrt5": mpmath.sqrt(5),
        }
        return Const(+table[name], None, None, name)


NAMES = ("pi", "e", "phi", "sqrt2", "sqrt3", "sqrt5")
FUNCS = ("log", "exp", "sqrt", "irr")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r} at {pos} in {self.text!r}")
            num, name, op = m.groups()
            start = m.start(m.lastindex)
            if num is not None:
                self.tokens.append(("num", num, start))
            elif name is not None:
                self.tokens.append(("name", name, start))
            else:
                self.tokens.append(("op", "^" if op == "**" else op, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r} at {tok[2]} in {self.text!r}, found {tok[1] or 'end'!r}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.sum()
        if self.peek()[0] != "end":
            tok = self.peek()
            raise ParseError(f"trailing input {tok[1]!r} at {tok[2]} in {self.text!r}")
        return node

    def sum(self) -> Node:
        node = self.product()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.product()
            node = add(node, rhs) if op == "+" else sub(node, rhs)
        return node

    def product(self) -> Node:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            node = mul(node, rhs) if op == "*" else div(node, rhs)
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            return neg(inner) if tok[1] == "-" else inner
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            pos = self.take()[2]
            e = self.unary()
            if not isinstance(e, Const):
                raise ParseError(f"exponent at {pos} must be a constant in {self.text!r}")
            return power(base, e)
        return base

    def atom(self) -> Node:
        kind, value, pos = self.take()
        if kind == "num":
            return rational(Fraction(value))
        if kind == "name":
            if value == "t":
                return T
            if value in NAMES and not (self.peek()[0] == "op" and self.peek()[1] == "("):
                return _named(value)
            if value in FUNCS:
                self.take("op", "(")
                start = self.peek()[2]
                inner = self.sum()
                end = self.peek()[2]
                self.take("op", ")")
                if value == "log":
                    return log_(inner)
                if value == "exp":
                    return exp_(inner)
                if value == "sqrt":
                    return power(inner, Fraction(1, 2))
                if not isinstance(inner, Const):
                    raise ParseError(f"irr() at {pos} applies to constants only in {self.text!r}")
                label = self.text[start:end].strip()
                return Const(inner.value, None, IRRATIONAL, label)
            raise ParseError(f"unknown name {value!r} at {pos} in {self.text!r}")
        if kind == "op" and value == "(":
            node = self.sum()
            self.take("op", ")")
            return node
        raise ParseError(f"unexpected {value or 'end'!r} at {pos} in {self.text!r}")


def parse(text: str) -> HardyExpr:
    """Parse the text syntax into a :class:`HardyExpr`.

    Raises:
        ParseError: on malformed input, with the offending position.
    """
    return HardyExpr(_Parser(text).parse())


def parse_constant(text: str) -> Const:
    """Parse a constant expression such as ``"sqrt2-1"``."""
    node = _Parser(text).parse()
    if not isinstance(node, Const):
        raise ParseError(f"{text!r} is not a constant")
    return node
