"""
Parser and evaluator for scalar functions of one variable.

Coefficients a(z), b(z), the initial datum k(z) and the boundary data
h1(v), h2(v) are supplied as text. Grammar (informal EBNF):

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := primary ("^" unary)?          # right-associative
    primary := NUMBER | VARIABLE | "pi" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := sin | cos | exp | log | sqrt | abs

Unary minus binds below "^", so "-z^2" is -(z^2) and "2^-1" is 0.5.

Usage:
    tree = parse("(z+1)^2")
    evaluate(tree, 0.25)  # 1.5625
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from src.compact.errors import ExpressionDomainError, ExpressionSyntaxError

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}

NAMED_CONSTANTS = {"pi": math.pi}

BINARY_OPS = ("+", "-", "*", "/", "^")


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Unary:
    """Negation (op "neg") or one of the FUNCTIONS."""

    op: str
    operand: ExpressionTree


@dataclass(frozen=True)
class Binary:
    op: str
    left: ExpressionTree
    right: ExpressionTree


ExpressionTree = Union[Constant, Variable, Unary, Binary]


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", text, _byte_offset(text, pos))
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), _byte_offset(text, pos)))
        pos = match.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    """Recursive-descent parser over a token list. One instance per parse call."""

    def __init__(self, text: str, variable: str):
        self.text = text
        self.variable = variable
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _error(self, message: str, token: _Token) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(message, self.text, token.offset)

    def _expect(self, text: str) -> None:
        if self.current.text != text or self.current.kind != "op":
            raise self._error(f"expected {text!r}", self.current)
        self._advance()

    def parse(self) -> ExpressionTree:
        tree = self._expr()
        if self.current.kind != "end":
            raise self._error(f"unexpected {self.current.text!r}", self.current)
        return tree

    def _expr(self) -> ExpressionTree:
        left = self._term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            left = Binary(op, left, self._term())
        return left

    def _term(self) -> ExpressionTree:
        left = self._unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self._advance().text
            left = Binary(op, left, self._unary())
        return left

    def _unary(self) -> ExpressionTree:
        if self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            operand = self._unary()
            return Unary("neg", operand) if op == "-" else operand
        return self._power()

    def _power(self) -> ExpressionTree:
        base = self._primary()
        if self.current.kind == "op" and self.current.text == "^":
            self._advance()
            return Binary("^", base, self._unary())
        return base

    def _primary(self) -> ExpressionTree:
        token = self.current
        if token.kind == "number":
            value = float(token.text)
            if not math.isfinite(value):
                raise self._error(f"literal {token.text!r} overflows to {value}", token)
            self._advance()
            return Constant(value)
        if token.kind == "ident":
            self._advance()
            if token.text in FUNCTIONS:
                self._expect("(")
                argument = self._expr()
                self._expect(")")
                return Unary(token.text, argument)
            if token.text == self.variable:
                return Variable(token.text)
            if token.text in NAMED_CONSTANTS:
                return Constant(NAMED_CONSTANTS[token.text])
            raise self._error(f"unknown identifier {token.text!r}", token)
        if token.kind == "op" and token.text == "(":
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner
        if token.kind == "end":
            raise self._error("expected operand", token)
        raise self._error(f"unexpected {token.text!r}", token)


def parse(text: str, variable: str = "z") -> ExpressionTree:
    """Parse ``text`` into an expression tree in the free variable ``variable``.

    Raises:
        ExpressionSyntaxError: with the byte offset of the offending token.
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", text, 0)
    return _Parser(text, variable).parse()


def to_text(tree: ExpressionTree) -> str:
    """Fully parenthesized text that parses back to an equivalent tree."""
    if isinstance(tree, Constant):
        literal = repr(float(tree.value))
        return f"({literal})" if tree.value < 0 else literal
    if isinstance(tree, Variable):
        return tree.name
    if isinstance(tree, Unary):
        if tree.op == "neg":
            return f"(-{to_text(tree.operand)})"
        return f"{tree.op}({to_text(tree.operand)})"
    return f"({to_text(tree.left)}{tree.op}{to_text(tree.right)})"


def _fail(tree: ExpressionTree, x: float, reason: str) -> ExpressionDomainError:
    return ExpressionDomainError(to_text(tree), x, reason)


def _power(tree: Binary, base: float, exponent: float, x: float) -> float:
    if base == 0.0 and exponent < 0:
        raise _fail(tree, x, "zero raised to a negative power")
    if base < 0 and not float(exponent).is_integer():
        raise _fail(tree, x, "negative base with non-integer exponent")
    try:
        return math.pow(base, exponent)
    except OverflowError:
        raise _fail(tree, x, "overflow") from None


def evaluate(tree: ExpressionTree, x: float) -> float:
    """Evaluate ``tree`` at ``x``.

    Raises:
        ExpressionDomainError: naming the node whose value is not a finite real.
    """
    if isinstance(tree, Constant):
        return tree.value
    if isinstance(tree, Variable):
        return float(x)
    if isinstance(tree, Unary):
        arg = evaluate(tree.operand, x)
        if tree.op == "neg":
            return -arg
        if tree.op == "log" and arg <= 0:
            raise _fail(tree, x, "log of non-positive value")
        if tree.op == "sqrt" and arg < 0:
            raise _fail(tree, x, "sqrt of negative value")
        try:
            value = FUNCTIONS[tree.op](arg)
        except OverflowError:
            raise _fail(tree, x, "overflow") from None
    else:
        left = evaluate(tree.left, x)
        right = evaluate(tree.right, x)
        if tree.op == "+":
            value = left + right
        elif tree.op == "-":
            value = left - right
        elif tree.op == "*":
            value = left * right
        elif tree.op == "/":
            if right == 0.0:
                raise _fail(tree, x, "division by zero")
            value = left / right
        else:
            value = _power(tree, left, right, x)
    if not math.isfinite(value):
        raise _fail(tree, x, "non-finite result")
    return value


def evaluate_many(tree: ExpressionTree, xs: Iterable[float]) -> np.ndarray:
    """Evaluate at every point of ``xs``; the first failing point raises."""
    return np.array([evaluate(tree, float(x)) for x in xs], dtype=float)
