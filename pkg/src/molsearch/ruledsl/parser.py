"""Rule-language front end: tokenizer, recursive-descent parser, type checker.

Grammar (see docs/rule_grammar.md for the reference document):

    expr       := or_expr
    or_expr    := and_expr ( "or" and_expr )*
    and_expr   := not_expr ( "and" not_expr )*
    not_expr   := "not" not_expr | comparison
    comparison := sum ( ("<" | "<=" | "=" | ">=" | ">") sum )?
    sum        := product ( ("+" | "-") product )*
    product    := unary ( ("*" | "/") unary )*
    unary      := "-" unary | atom
    atom       := NUMBER | "desc" "(" IDENT ")" | "count" "(" pattern ")"
                | "(" expr ")"
    pattern    := STRING | IDENT      # quoted source, or a registered name

Real expressions and boolean expressions are distinct types: comparisons
take reals and yield booleans, the connectives take booleans, arithmetic
takes reals.  The tree may be at most 32 levels deep.
"""
from __future__ import annotations

import re

from ..molgraph.pattern import PatternError, lookup_pattern, parse_pattern
from .nodes import (
    MAX_DEPTH,
    Arith,
    BoolOp,
    Compare,
    Count,
    Desc,
    Neg,
    Node,
    Not,
    Number,
    node_depth,
)

__all__ = [
    "RuleError",
    "RuleParseError",
    "RuleTypeError",
    "RuleEvalError",
    "parse_rule",
    "infer_type",
    "render_rule",
]

_KEYWORDS = ("and", "or", "not", "desc", "count")


class RuleError(ValueError):
    """Base for rule-language failures; carries phase and source position."""

    phase = "parse"

    def __init__(self, message: str, position: int | None = None):
        suffix = f" (position {position})" if position is not None else ""
        super().__init__(f"{message}{suffix}")
        self.message = message
        self.position = position


class RuleParseError(RuleError):
    phase = "parse"


class RuleTypeError(RuleError):
    phase = "typecheck"


class RuleEvalError(RuleError):
    phase = "eval"


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"]*")
  | (?P<op><=|>=|[-+*/()=<>])
    """,
    re.VERBOSE,
)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise RuleParseError(f"unexpected character {src[i]!r}", i)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), i))
        i = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> tuple[str, str, int]:
        k, v, pos = self.peek()
        if k != kind or (value is not None and v != value):
            want = value or kind
            got = v or "end of rule"
            raise RuleParseError(f"expected {want!r}, found {got!r}", pos)
        return self.advance()

    # -- grammar ---------------------------------------------------------

    def parse(self) -> Node:
        node = self.or_expr()
        k, v, pos = self.peek()
        if k != "end":
            raise RuleParseError(f"unexpected {v!r} after expression", pos)
        return node

    def or_expr(self) -> Node:
        node = self.and_expr()
        while self._at_keyword("or"):
            _, _, pos = self.advance()
            node = BoolOp("or", node, self.and_expr(), pos=pos)
        return node

    def and_expr(self) -> Node:
        node = self.not_expr()
        while self._at_keyword("and"):
            _, _, pos = self.advance()
            node = BoolOp("and", node, self.not_expr(), pos=pos)
        return node

    def not_expr(self) -> Node:
        if self._at_keyword("not"):
            _, _, pos = self.advance()
            return Not(self.not_expr(), pos=pos)
        return self.comparison()

    def comparison(self) -> Node:
        node = self.sum()
        k, v, pos = self.peek()
        if k == "op" and v in ("<", "<=", "=", ">=", ">"):
            self.advance()
            node = Compare(v, node, self.sum(), pos=pos)
        return node

    def sum(self) -> Node:
        node = self.product()
        while True:
            k, v, pos = self.peek()
            if k == "op" and v in ("+", "-"):
                self.advance()
                node = Arith(v, node, self.product(), pos=pos)
            else:
                return node

    def product(self) -> Node:
        node = self.unary()
        while True:
            k, v, pos = self.peek()
            if k == "op" and v in ("*", "/"):
                self.advance()
                node = Arith(v, node, self.unary(), pos=pos)
            else:
                return node

    def unary(self) -> Node:
        k, v, pos = self.peek()
        if k == "op" and v == "-":
            self.advance()
            return Neg(self.unary(), pos=pos)
        return self.atom()

    def atom(self) -> Node:
        k, v, pos = self.peek()
        if k == "number":
            self.advance()
            return Number(float(v), pos=pos)
        if k == "ident" and v == "desc":
            self.advance()
            self.expect("op", "(")
            _, name, name_pos = self.expect("ident")
            if name in _KEYWORDS:
                raise RuleParseError(f"{name!r} is a reserved word", name_pos)
            self.expect("op", ")")
            return Desc(name, pos=pos)
        if k == "ident" and v == "count":
            self.advance()
            self.expect("op", "(")
            pk, pv, ppos = self.peek()
            if pk == "string":
                self.advance()
                source = pv[1:-1]
                build = parse_pattern
            elif pk == "ident" and pv not in _KEYWORDS:
                self.advance()
                source = pv
                build = lookup_pattern
            else:
                raise RuleParseError(
                    "count() needs a quoted pattern or a pattern name", ppos
                )
            try:
                pattern = build(source)
            except PatternError as exc:
                raise RuleParseError(f"bad pattern {source!r}: {exc}", ppos) from exc
            self.expect("op", ")")
            return Count(source, pattern, build is lookup_pattern, pos=pos)
        if k == "op" and v == "(":
            self.advance()
            node = self.or_expr()
            self.expect("op", ")")
            return node
        if k == "ident":
            raise RuleParseError(
                f"bare name {v!r}; use desc({v}) or count({v})", pos
            )
        raise RuleParseError(f"expected a value, found {v or 'end of rule'!r}", pos)

    def _at_keyword(self, word: str) -> bool:
        k, v, _ = self.peek()
        return k == "ident" and v == word


def infer_type(node: Node) -> str:
    """'real' or 'bool'; raises RuleTypeError on a type clash."""
    if isinstance(node, (Number, Desc, Count)):
        return "real"
    if isinstance(node, Neg):
        if infer_type(node.operand) != "real":
            raise RuleTypeError("negation needs a real operand", node.pos)
        return "real"
    if isinstance(node, Arith):
        for side in (node.left, node.right):
            if infer_type(side) != "real":
                raise RuleTypeError(
                    f"arithmetic {node.op!r} needs real operands", node.pos
                )
        return "real"
    if isinstance(node, Compare):
        for side in (node.left, node.right):
            if infer_type(side) != "real":
                raise RuleTypeError(
                    f"comparison {node.op!r} needs real operands", node.pos
                )
        return "bool"
    if isinstance(node, Not):
        if infer_type(node.operand) != "bool":
            raise RuleTypeError("'not' needs a boolean operand", node.pos)
        return "bool"
    if isinstance(node, BoolOp):
        for side in (node.left, node.right):
            if infer_type(side) != "bool":
                raise RuleTypeError(
                    f"{node.op!r} needs boolean operands", node.pos
                )
        return "bool"
    raise TypeError(f"unknown node {type(node).__name__}")


def parse_rule(src: str) -> Node:
    """Parse and type-check one rule; raises RuleParseError / RuleTypeError."""
    if not src or not src.strip():
        raise RuleParseError("empty rule", 0)
    ast = _Parser(src).parse()
    if node_depth(ast) > MAX_DEPTH:
        raise RuleParseError(f"rule deeper than {MAX_DEPTH} levels", 0)
    infer_type(ast)  # raises on clash
    return ast


def render_rule(node: Node) -> str:
    """Render an AST back to parseable source, fully parenthesized.

    Round-trips: parse_rule(render_rule(ast)) equals ast (positions aside).
    """
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Desc):
        return f"desc({node.name})"
    if isinstance(node, Count):
        return f"count({node.source})" if node.named else f'count("{node.source}")'
    if isinstance(node, Neg):
        return f"-({render_rule(node.operand)})"
    if isinstance(node, Not):
        return f"(not {render_rule(node.operand)})"
    if isinstance(node, (Arith, Compare, BoolOp)):
        return f"({render_rule(node.left)} {node.op} {render_rule(node.right)})"
    raise TypeError(f"unknown node {type(node).__name__}")
