"""Executable rule language: parse, type-check, evaluate, and ground
natural-language knowledge into checkable rules over molecules.

The grammar is documented in docs/rule_grammar.md.
"""
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
from .parser import (
    RuleError,
    RuleEvalError,
    RuleParseError,
    RuleTypeError,
    infer_type,
    parse_rule,
    render_rule,
)
from .rules import (
    PROBE_SMILES,
    RULESET_SCHEMA,
    ErrorTrace,
    GroundingProvider,
    Rule,
    RuleSet,
    alignment_score,
    eval_rule,
    ground_rules,
    load_ruleset,
    save_ruleset,
)

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
    "RuleError",
    "RuleParseError",
    "RuleTypeError",
    "RuleEvalError",
    "parse_rule",
    "infer_type",
    "render_rule",
    "ErrorTrace",
    "Rule",
    "RuleSet",
    "GroundingProvider",
    "eval_rule",
    "ground_rules",
    "alignment_score",
    "save_ruleset",
    "load_ruleset",
    "PROBE_SMILES",
    "RULESET_SCHEMA",
]
