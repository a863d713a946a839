"""Parser for the observable expression language.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;          (* "/" only by a constant *)
    unary   = ("-" | "+") unary | power ;
    power   = atom [ ("^" | "**") integer ] ;
    atom    = number | "x" | "y" | "x1" | "x2" | "(" expr ")" | call ;
    call    = ("min" | "max") "(" expr { "," expr } ")"
            | "abs" "(" expr ")"
            | "clamp" "(" expr "," signed "," signed ")"
            | "pwl" "(" expr ";" signed "," signed { ";" signed "," signed } ")" ;
    signed  = [ "-" | "+" ] number ;

``pwl(e; t0,v0; t1,v1; ...)`` is the piecewise-linear function through the
listed breakpoints, held constant outside them, applied to ``e``.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from .errors import ExpressionError
from .observables import (
    Abs, Add, Clamp, Compose, Const, Max, Min, Mul, Neg, Observable, PiecewiseLinear, Power, Sub, X1, X2,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),;]))"
)


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character {src[pos:].lstrip()[:1]!r} at column {pos}")
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, msg: str):
        raise ExpressionError(f"{msg} at column {self.tok.pos} in {self.src!r}")

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.fail(f"expected {text!r}, found {found!r}")

    def parse(self) -> Observable:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Observable:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Observable:
        node = self.unary()
        while True:
            if self.accept("*"):
                node = Mul(node, self.unary())
            elif self.accept("/"):
                pos = self.tok.pos
                den = self.unary()
                if not isinstance(den, Const):
                    raise ExpressionError(f"division is only allowed by a constant (column {pos})")
                if den.c == 0:
                    raise ExpressionError(f"division by zero (column {pos})")
                node = Mul(node, Const(1.0 / den.c))
            else:
                return node

    def unary(self) -> Observable:
        if self.accept("-"):
            inner = self.unary()
            return Const(-inner.c) if isinstance(inner, Const) else Neg(inner)
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Observable:
        base = self.atom()
        if self.accept("^") or self.accept("**"):
            tok = self.tok
            if tok.kind != "num" or not re.fullmatch(r"\d+", tok.text) or int(tok.text) < 1:
                self.fail("exponent must be a positive integer literal")
            self.i += 1
            return Power(base, int(tok.text))
        return base

    def number(self) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        if sign > 0:
            self.accept("+")
        tok = self.tok
        if tok.kind != "num":
            self.fail("expected a number")
        self.i += 1
        return sign * float(tok.text)

    def atom(self) -> Observable:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            name = tok.text
            if name in ("x", "x1", "w1"):
                return X1
            if name in ("y", "x2", "w2"):
                return X2
            if name in ("min", "max", "abs", "clamp", "pwl"):
                return self.call(name)
            raise ExpressionError(f"unknown name {name!r} at column {tok.pos}")
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail(f"unexpected {tok.text or 'end of input'!r}")

    def call(self, name: str) -> Observable:
        self.expect("(")
        if name in ("min", "max"):
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self.expect(")")
            op = Min if name == "min" else Max
            node = args[0]
            for a in args[1:]:
                node = op(node, a)
            return node
        if name == "abs":
            node = Abs(self.expr())
            self.expect(")")
            return node
        if name == "clamp":
            inner = self.expr()
            self.expect(",")
            lo = self.number()
            self.expect(",")
            hi = self.number()
            self.expect(")")
            return Clamp(inner, lo, hi)
        inner = self.expr()
        pairs = []
        while self.accept(";"):
            t = self.number()
            self.expect(",")
            pairs.append((t, self.number()))
        self.expect(")")
        return Compose(PiecewiseLinear.from_pairs(pairs), inner)


def parse(src: str) -> Observable:
    """Parse an expression such as ``"2*x^2 + 3*y^2"`` into an observable."""
    if not isinstance(src, str) or not src.strip():
        raise ExpressionError("empty expression")
    return _Parser(src).parse()
