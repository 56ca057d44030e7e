"""Recursive-descent parser for the small math expression language.

Grammar (``^`` is right-associative, a leading minus binds tighter than ``^``)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?
    unary  := '-'? atom
    atom   := number | name | fn '(' expr ')' | '(' expr ')'

Names are restricted to the variables and constants the caller allows.
Evaluation is generic: leaves may be floats, arrays, jets or duals.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import jets
from .errors import ParseError

FUNCTIONS = {
    "sin": jets.sin,
    "cos": jets.cos,
    "exp": jets.exp,
    "log": jets.log,
    "sqrt": jets.sqrt,
    "atan": jets.atan,
}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.names = set(names)
        self._check_balance()

    def _check_balance(self):
        depth = 0
        for t in self.tokens:
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
                if depth < 0:
                    raise ParseError("unbalanced parentheses: unmatched ')'", t.pos)
        if depth > 0:
            raise ParseError("unbalanced parentheses: missing ')'", len(self.text))

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.text != text or t.kind == "end":
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", t.pos)
        return self.advance()

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.unary()
        if self.tok.text == "^" and self.tok.kind == "op":
            self.advance()
            node = BinOp("^", node, self.factor())
        return node

    def unary(self):
        if self.tok.text == "-" and self.tok.kind == "op":
            self.advance()
            return Neg(self.atom())
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                if self.tok.text == ",":
                    raise ParseError(f"function {t.text} takes exactly 1 argument", self.tok.pos)
                self.expect(")")
                return Call(t.text, arg)
            if t.text not in self.names:
                raise ParseError(f"unknown identifier {t.text!r}", t.pos)
            if self.tok.text == "(":
                raise ParseError(f"{t.text!r} is not a function", self.tok.pos)
            return Var(t.text)
        if t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.pos)
        raise ParseError(f"unexpected token {t.text!r}", t.pos)

    def finish(self):
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.text!r}", self.tok.pos)


def evaluate(node, env: Mapping[str, object]):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.arg, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.fn](evaluate(node.arg, env))
    a = evaluate(node.left, env)
    if node.op == "^" and isinstance(node.right, Num) and float(node.right.value).is_integer():
        return a ** int(node.right.value)
    b = evaluate(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    # general power through exp/log
    if not isinstance(a, (jets.Jet, jets.Dual)) and not isinstance(b, (jets.Jet, jets.Dual)):
        return a**b
    return jets.exp(b * jets.log(a))


@dataclass(frozen=True)
class Expression:
    """A parsed scalar expression over named variables."""

    text: str
    node: object
    variables: tuple
    constants: tuple = ()

    def __call__(self, *args, **kwargs):
        env = dict(self.constants)
        env.update(zip(self.variables, args))
        env.update(kwargs)
        return evaluate(self.node, env)


def parse_expression(text: str, variables: Sequence[str] = ("s",), constants: Mapping[str, float] | None = None) -> Expression:
    constants = dict(constants or {})
    p = _Parser(text, list(variables) + list(constants))
    if p.tok.kind == "end":
        raise ParseError("empty expression", 0)
    node = p.expr()
    p.finish()
    return Expression(text, node, tuple(variables), tuple(sorted(constants.items())))


@dataclass(frozen=True)
class SurfaceAst:
    text: str
    components: tuple

    def __call__(self, u, v):
        env = {"u": u, "v": v}
        return tuple(evaluate(c, env) for c in self.components)


def parse_surface(text: str) -> SurfaceAst:
    """Parse ``"(ex, ey, ez)"`` into three expression trees over u and v."""
    p = _Parser(text, ("u", "v"))
    p.expect("(")
    comps = [p.expr()]
    for _ in range(2):
        p.expect(",")
        comps.append(p.expr())
    p.expect(")")
    p.finish()
    return SurfaceAst(text, tuple(comps))
