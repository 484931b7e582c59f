"""Expression tree for the rule language.

Nodes are frozen; `pos` records the source offset for error reporting and is
excluded from equality so structurally identical rules compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..molgraph.pattern import Pattern

__all__ = [
    "Node",
    "Number",
    "Desc",
    "Count",
    "Neg",
    "Arith",
    "Compare",
    "BoolOp",
    "Not",
    "node_depth",
    "MAX_DEPTH",
]

MAX_DEPTH = 32


@dataclass(frozen=True)
class Node:
    pos: int = field(default=0, compare=False, kw_only=True)


@dataclass(frozen=True)
class Number(Node):
    value: float


@dataclass(frozen=True)
class Desc(Node):
    name: str


@dataclass(frozen=True)
class Count(Node):
    """Substructure count; the pattern is compiled at parse time."""

    source: str
    pattern: Pattern = field(compare=False)
    named: bool = False  # count(name) vs count("pattern text")


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class Arith(Node):
    op: str  # + - * /
    left: Node
    right: Node


@dataclass(frozen=True)
class Compare(Node):
    op: str  # < <= = >= >
    left: Node
    right: Node


@dataclass(frozen=True)
class BoolOp(Node):
    op: str  # and | or
    left: Node
    right: Node


@dataclass(frozen=True)
class Not(Node):
    operand: Node


def node_depth(node: Node) -> int:
    """Height of the expression tree; a leaf counts as 1."""
    if isinstance(node, (Number, Desc, Count)):
        return 1
    if isinstance(node, (Neg, Not)):
        return 1 + node_depth(node.operand)
    if isinstance(node, (Arith, Compare, BoolOp)):
        return 1 + max(node_depth(node.left), node_depth(node.right))
    raise TypeError(f"unknown node {type(node).__name__}")
