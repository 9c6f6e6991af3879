"""Recursive-descent parser for tautological ring expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := 'x' INT | 'D(' INT ',' INT ')' | 'S(' INT ',' INT ')'
            | RATIONAL | '(' expr ')' | '-' factor

Whitespace is ignored.  Error positions are 1-based columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .tautring import TautClass, TautRing, scorza_class

__all__ = ["Atom", "BinOp", "Neg", "Num", "RingExprError", "eval_ring_expr", "parse_ring_expr"]


class RingExprError(ValueError):
    def __init__(self, message: str, column: int | None = None):
        self.column = column
        where = f" at column {column}" if column is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Atom:
    kind: str  # 'x', 'D' or 'S'
    indices: tuple


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        raise RingExprError(message, (self.pos if pos is None else pos) + 1)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def expect(self, ch):
        if self.peek() != ch:
            found = "end of input" if self.peek() is None else repr(self.peek())
            self.error(f"expected {ch!r}, found {found}")
        self.pos += 1

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            found = "end of input" if start >= len(self.text) else repr(self.text[start])
            self.error(f"expected integer, found {found}", start)
        return int(self.text[start:self.pos])

    def parse(self):
        node = self.expr()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() == "*":
            self.pos += 1
            node = BinOp("*", node, self.factor())
        return node

    def factor(self):
        ch = self.peek()
        if ch is None:
            self.error("unexpected end of input")
        if ch == "x":
            self.pos += 1
            return Atom("x", (self.integer(),))
        if ch in ("D", "S"):
            self.pos += 1
            self.expect("(")
            i = self.integer()
            self.expect(",")
            j = self.integer()
            self.expect(")")
            return Atom(ch, (i, j))
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch == "-":
            self.pos += 1
            return Neg(self.factor())
        if ch.isdigit():
            num = self.integer()
            den = 1
            if self.peek() == "/":
                self.pos += 1
                at = self.pos
                den = self.integer()
                if den == 0:
                    self.error("zero denominator", at)
            return Num(Fraction(num, den))
        self.error(f"unexpected {ch!r}")


def parse_ring_expr(text: str):
    return _Parser(text).parse()


def eval_ring_expr(expr, n: int, g: int) -> TautClass:
    """Expand a parsed expression into a reduced class on C^n."""
    if isinstance(expr, str):
        expr = parse_ring_expr(expr)
    ring = TautRing(n, g)

    def ev(node):
        if isinstance(node, Num):
            return ring.constant(node.value)
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, Atom):
            idx = node.indices
            bad = [i for i in idx if not 1 <= i <= n]
            if bad:
                raise RingExprError(f"index {bad[0]} outside 1..{n}")
            if node.kind == "x":
                return ring.x(idx[0])
            if idx[0] == idx[1]:
                raise RingExprError(f"{node.kind}({idx[0]},{idx[1]}) needs distinct indices")
            if node.kind == "D":
                return ring.diagonal(*idx)
            return scorza_class(min(idx), max(idx), n, g)
        left, right = ev(node.left), ev(node.right)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right

    return ev(expr)
