"""Rule evaluation, grounding with self-correction, and rule sets."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from ..descriptors import default_registry
from ..molgraph import parse_smiles
from ..molgraph.match import count_matches
from ..molgraph.mol import Molecule
from .nodes import Arith, BoolOp, Compare, Count, Desc, Neg, Node, Not, Number
from .parser import RuleError, RuleEvalError, infer_type, parse_rule

__all__ = [
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

logger = logging.getLogger(__name__)

# Small, valid, exercises donors and acceptors during grounding validation.
PROBE_SMILES = "CCO"

RULESET_SCHEMA = "molsearch-ruleset/1"


@dataclass(frozen=True)
class ErrorTrace:
    """Where and why a rule failed: the feedback unit of the fix loop."""

    rule_id: str
    phase: str  # parse | typecheck | eval
    message: str
    position: int | None = None

    def __post_init__(self):
        if not self.message:
            raise ValueError("ErrorTrace message must be non-empty")
        if self.phase not in ("parse", "typecheck", "eval"):
            raise ValueError(f"unknown phase {self.phase!r}")

    @classmethod
    def from_error(cls, rule_id: str, exc: RuleError) -> "ErrorTrace":
        return cls(
            rule_id=rule_id,
            phase=exc.phase,
            message=exc.message,
            position=exc.position,
        )


@dataclass(frozen=True)
class Rule:
    """One grounded rule: the sentence it came from and its executable form."""

    id: str
    sentence: str
    source: str
    ast: Node
    kind: str  # feature (real-valued) | heuristic (boolean)
    weight: float = 1.0
    provider_id: str = ""
    retries: int = 0


@dataclass(frozen=True)
class RuleSet:
    """Ordered, immutable collection of grounded rules with unique ids."""

    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule ids must be unique")
        for r in self.rules:
            expected = "heuristic" if infer_type(r.ast) == "bool" else "feature"
            if r.kind != expected:
                raise ValueError(
                    f"rule {r.id}: kind {r.kind!r} does not match its "
                    f"{'boolean' if expected == 'heuristic' else 'real'} type"
                )

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def get(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(f"no rule {rule_id!r}")

    def heuristics(self) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind == "heuristic")

    def features(self) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind == "feature")


def eval_rule(ast: Node, mol: Molecule) -> float | bool:
    """Evaluate a type-checked expression on a molecule.  Pure and deterministic.

    Raises RuleEvalError for unknown descriptors and division by zero.
    """
    if isinstance(ast, Number):
        return ast.value
    if isinstance(ast, Desc):
        registry = default_registry()
        if ast.name not in registry:
            raise RuleEvalError(f"unknown descriptor {ast.name!r}", ast.pos)
        return registry.compute(mol, ast.name)
    if isinstance(ast, Count):
        return float(count_matches(mol, ast.pattern))
    if isinstance(ast, Neg):
        return -eval_rule(ast.operand, mol)
    if isinstance(ast, Arith):
        left = eval_rule(ast.left, mol)
        right = eval_rule(ast.right, mol)
        if ast.op == "+":
            return left + right
        if ast.op == "-":
            return left - right
        if ast.op == "*":
            return left * right
        if right == 0.0:
            raise RuleEvalError("division by zero", ast.pos)
        return left / right
    if isinstance(ast, Compare):
        left = eval_rule(ast.left, mol)
        right = eval_rule(ast.right, mol)
        return {
            "<": left < right,
            "<=": left <= right,
            "=": left == right,
            ">=": left >= right,
            ">": left > right,
        }[ast.op]
    if isinstance(ast, Not):
        return not eval_rule(ast.operand, mol)
    if isinstance(ast, BoolOp):
        left = eval_rule(ast.left, mol)
        if ast.op == "and":
            return bool(left) and bool(eval_rule(ast.right, mol))
        return bool(left) or bool(eval_rule(ast.right, mol))
    raise TypeError(f"unknown node {type(ast).__name__}")


class GroundingProvider(Protocol):
    """What grounding needs from a policy provider (structural protocol)."""

    provider_id: str

    def ground(self, sentence: str) -> str:
        """Initial rule source for a knowledge sentence."""

    def rectify(self, source: str, trace: ErrorTrace, sentence: str) -> str:
        """Revised source given the previous attempt and its error trace."""


def ground_rules(
    texts: list[str],
    provider: GroundingProvider,
    max_retries: int = 3,
) -> tuple[RuleSet, list[ErrorTrace]]:
    """Turn knowledge sentences into executable rules via the provider.

    Each sentence gets one initial attempt plus up to ``max_retries``
    rectification rounds; every failed attempt's trace is returned, so a
    sentence that never grounds contributes ``max_retries + 1`` traces and no
    rule.  Accepted rules are guaranteed to evaluate cleanly on the probe
    molecule.
    """
    probe = parse_smiles(PROBE_SMILES)
    accepted: list[Rule] = []
    traces: list[ErrorTrace] = []
    for index, sentence in enumerate(texts):
        rule_id = f"r{index + 1:02d}"
        source = provider.ground(sentence)
        for attempt in range(max_retries + 1):
            try:
                ast = parse_rule(source)
                eval_rule(ast, probe)
            except RuleError as exc:
                trace = ErrorTrace.from_error(rule_id, exc)
                traces.append(trace)
                if attempt == max_retries:
                    logger.warning(
                        "rule %s dropped after %d attempts: %s",
                        rule_id,
                        attempt + 1,
                        trace.message,
                    )
                    break
                source = provider.rectify(source, trace, sentence)
            else:
                kind = "heuristic" if infer_type(ast) == "bool" else "feature"
                accepted.append(
                    Rule(
                        id=rule_id,
                        sentence=sentence,
                        source=source,
                        ast=ast,
                        kind=kind,
                        provider_id=getattr(provider, "provider_id", ""),
                        retries=attempt,
                    )
                )
                break
    return RuleSet(tuple(accepted)), traces


def alignment_score(rules: RuleSet, mol: Molecule) -> float:
    """Weighted count of satisfied boolean rules (weights default to 1).

    Rules that fail to evaluate count as unsatisfied and are logged; feature
    (real-valued) rules do not participate.
    """
    total = 0.0
    for rule in rules.heuristics():
        try:
            if eval_rule(rule.ast, mol):
                total += rule.weight
        except RuleError as exc:
            logger.warning("rule %s errored during scoring: %s", rule.id, exc)
    return total


def save_ruleset(rules: RuleSet, path: str | Path) -> None:
    """Persist a rule set as a JSON document (schema RULESET_SCHEMA)."""
    doc = {
        "schema": RULESET_SCHEMA,
        "rules": [
            {
                "id": r.id,
                "kind": r.kind,
                "source": r.source,
                "sentence": r.sentence,
                "weight": r.weight,
                "provider_id": r.provider_id,
                "retries": r.retries,
            }
            for r in rules
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_ruleset(path: str | Path) -> RuleSet:
    """Load a persisted rule set, re-parsing every source."""
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != RULESET_SCHEMA:
        raise ValueError(
            f"unsupported rule-set schema {doc.get('schema')!r}; "
            f"expected {RULESET_SCHEMA!r}"
        )
    rules = []
    for rec in doc["rules"]:
        ast = parse_rule(rec["source"])
        rules.append(
            Rule(
                id=rec["id"],
                sentence=rec["sentence"],
                source=rec["source"],
                ast=ast,
                kind=rec["kind"],
                weight=rec.get("weight", 1.0),
                provider_id=rec.get("provider_id", ""),
                retries=rec.get("retries", 0),
            )
        )
    return RuleSet(tuple(rules))
