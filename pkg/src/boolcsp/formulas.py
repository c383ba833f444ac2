"""Propositional formulas: AST, parser, evaluation, and truth-table extraction.

Grammar (tightest first): ``!`` > ``&`` > ``+`` (xor) > ``|`` > ``->`` > ``=``.
Atoms are identifiers, the constants ``0`` and ``1``, and parenthesized
subformulas. Variables are ordered by first occurrence; at most 16.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ParseError, InputError
from .relations import BoolRelation

VARIABLE_CAP = 16


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of & | -> + =
    left: "Node"
    right: "Node"


Node = Union[Var, Const, Not, BinOp]


@dataclass(frozen=True)
class FormulaAst:
    """Root node plus the variable list in first-occurrence order."""

    root: Node
    variables: tuple[str, ...]

    def evaluate(self, env: dict[str, int]) -> int:
        return _eval(self.root, env)


def _eval(node: Node, env: dict[str, int]) -> int:
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Not):
        return 1 - _eval(node.child, env)
    a = _eval(node.left, env)
    b = _eval(node.right, env)
    if node.op == "&":
        return a & b
    if node.op == "|":
        return a | b
    if node.op == "+":
        return a ^ b
    if node.op == "->":
        return (1 - a) | b
    if node.op == "=":
        return 1 - (a ^ b)
    raise InputError(f"unknown operator {node.op!r}")


class _Tokenizer:
    SYMBOLS = ("->", "!", "&", "|", "+", "=", "(", ")")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.index = 0

    def _scan(self) -> None:
        text, i = self.text, 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if text.startswith("->", i):
                self.tokens.append(("op", "->", i))
                i += 2
                continue
            if ch in "!&|+=()":
                self.tokens.append(("op", ch, i))
                i += 1
                continue
            if ch in "01":
                self.tokens.append(("const", ch, i))
                i += 1
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("ident", text[i:j], i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r} at offset {i}")
        self.tokens.append(("eof", "", len(text)))

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.index]
        self.index += 1
        return tok


class _Parser:
    def __init__(self, text: str):
        self.toks = _Tokenizer(text)
        self.variables: list[str] = []

    def parse(self) -> FormulaAst:
        node = self._eq()
        kind, value, off = self.toks.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {value!r} at offset {off}")
        return FormulaAst(node, tuple(self.variables))

    def _eq(self) -> Node:
        node = self._impl()
        while self.toks.peek()[:2] == ("op", "="):
            self.toks.next()
            node = BinOp("=", node, self._impl())
        return node

    def _impl(self) -> Node:
        node = self._or()
        if self.toks.peek()[:2] == ("op", "->"):
            self.toks.next()
            return BinOp("->", node, self._impl())
        return node

    def _or(self) -> Node:
        node = self._xor()
        while self.toks.peek()[:2] == ("op", "|"):
            self.toks.next()
            node = BinOp("|", node, self._xor())
        return node

    def _xor(self) -> Node:
        node = self._and()
        while self.toks.peek()[:2] == ("op", "+"):
            self.toks.next()
            node = BinOp("+", node, self._and())
        return node

    def _and(self) -> Node:
        node = self._unary()
        while self.toks.peek()[:2] == ("op", "&"):
            self.toks.next()
            node = BinOp("&", node, self._unary())
        return node

    def _unary(self) -> Node:
        kind, value, off = self.toks.peek()
        if (kind, value) == ("op", "!"):
            self.toks.next()
            return Not(self._unary())
        return self._atom()

    def _atom(self) -> Node:
        kind, value, off = self.toks.next()
        if (kind, value) == ("op", "("):
            node = self._eq()
            k2, v2, o2 = self.toks.next()
            if (k2, v2) != ("op", ")"):
                raise ParseError(f"expected ')' at offset {o2}")
            return node
        if kind == "const":
            return Const(int(value))
        if kind == "ident":
            if value not in self.variables:
                if len(self.variables) >= VARIABLE_CAP:
                    raise ParseError(f"more than {VARIABLE_CAP} variables", column=off)
                self.variables.append(value)
            return Var(value)
        raise ParseError(f"expected an atom at offset {off}")


def parse_formula(text: str) -> FormulaAst:
    """Parse under the package grammar; variables ordered by first occurrence."""
    return _Parser(text).parse()


def relation_of_formula(phi: FormulaAst, name: str | None = None) -> BoolRelation:
    """The relation of all assignments (in AST variable order) satisfying phi.

    A contradiction yields the empty relation, which BoolRelation carries
    as degenerate data; formulas without variables are rejected.
    """
    n = len(phi.variables)
    if n == 0:
        raise InputError("formula has no variables; no relation arity to assign")
    bits = 0
    for k in range(1 << n):
        env = {v: (k >> i) & 1 for i, v in enumerate(phi.variables)}
        if phi.evaluate(env):
            bits |= 1 << k
    return BoolRelation(n, bits, name)


def relation_of_text(text: str, name: str | None = None) -> BoolRelation:
    return relation_of_formula(parse_formula(text), name)
