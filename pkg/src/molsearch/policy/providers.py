"""The three interchangeable proposal back ends.

Every provider answers a :class:`PolicyRequest` with free text whose
payload sits in a fenced block.  The scripted provider replays a recorded
conversation and is the reproducibility workhorse; the heuristic provider
computes answers offline from fixed tables; the remote provider calls a
chat-style HTTP endpoint.
"""
from __future__ import annotations

import json
import os
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from ..descriptors import descriptor_names
from ..molgraph import canonical_smiles, parse_smiles
from ..molgraph.match import match_pattern
from ..molgraph.transforms import TransformError, apply_transform, list_transforms
from ..ruledsl import ErrorTrace
from ..ruledsl.nodes import Arith, BoolOp, Compare, Count, Desc, Neg, Node, Not, Number
from ..ruledsl.parser import RuleError, parse_rule, render_rule
from .prompts import extract_fenced, load_template

__all__ = [
    "ProviderError",
    "PolicyRequest",
    "PolicyProvider",
    "ScriptedProvider",
    "HeuristicProvider",
    "RemoteConfig",
    "RemoteProvider",
    "SCRIPT_SCHEMA",
]

SCRIPT_SCHEMA = "policy-script/1"

REQUEST_KINDS = ("synthesize", "ground", "rectify", "propose")


class ProviderError(RuntimeError):
    """The provider could not produce a usable response."""


@dataclass(frozen=True)
class PolicyRequest:
    """One provider round trip: the rendered prompt plus the structured
    facts it was rendered from (offline providers answer from the latter)."""

    kind: str  # synthesize | ground | rectify | propose
    prompt: str
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in REQUEST_KINDS:
            raise ValueError(f"unknown request kind {self.kind!r}")


class PolicyProvider(ABC):
    """Interface shared by all back ends; also satisfies the grounding
    protocol the rule language expects (ground / rectify)."""

    provider_id: str = "provider"

    @abstractmethod
    def respond(self, request: PolicyRequest) -> str:
        """Raw response text for one request."""

    def ground(self, sentence: str) -> str:
        prompt = load_template("Pfix").render(
            sentence=sentence,
            previous="(first attempt - nothing tried yet)",
            error="(no error yet)",
        )
        raw = self.respond(
            PolicyRequest(kind="ground", prompt=prompt, context={"sentence": sentence})
        )
        return (extract_fenced(raw) or "").strip()

    def rectify(self, source: str, trace: ErrorTrace, sentence: str = "") -> str:
        from .ops import rectify as _rectify

        return _rectify(source, trace, self, sentence=sentence)


# ------------------------------------------------------------------ scripted


class ScriptedProvider(PolicyProvider):
    """Replays a recorded list of {kind, response} records strictly in
    order; any divergence between the script and the actual request
    sequence fails loudly rather than answering out of turn."""

    def __init__(self, records: list[dict], name: str = "inline"):
        self._records = []
        for i, rec in enumerate(records):
            kind = rec.get("kind")
            if kind not in REQUEST_KINDS:
                raise ValueError(f"script record {i}: unknown kind {kind!r}")
            if "response" not in rec:
                raise ValueError(f"script record {i}: missing response")
            self._records.append((kind, rec["response"]))
        self._index = 0
        self._lock = threading.Lock()
        self.provider_id = f"scripted:{name}"

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedProvider":
        path = Path(path)
        doc = json.loads(path.read_text())
        if doc.get("schema") != SCRIPT_SCHEMA:
            raise ValueError(
                f"unsupported script schema {doc.get('schema')!r}; "
                f"expected {SCRIPT_SCHEMA!r}"
            )
        return cls(doc["records"], name=path.name)

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._records) - self._index

    def respond(self, request: PolicyRequest) -> str:
        with self._lock:
            if self._index >= len(self._records):
                raise ProviderError(
                    f"script exhausted after {len(self._records)} records "
                    f"(next request kind: {request.kind})"
                )
            kind, response = self._records[self._index]
            if kind != request.kind:
                raise ProviderError(
                    f"script out of order at record {self._index}: "
                    f"script says {kind!r}, request is {request.kind!r}"
                )
            self._index += 1
            return response


# ----------------------------------------------------------------- heuristic

# Sentence fragments -> rule sources, checked in order, first hit wins.
# Keys are matched against the lowercased sentence.
_GROUNDING_TABLE: tuple[tuple[str, str], ...] = (
    ("molecular weight", "desc(molecular_weight)"),
    ("hydrogen bond donor", "desc(hbd_count)"),
    ("hydrogen bond acceptor", "desc(hba_count)"),
    (
        "polar functional group",
        "count(hydroxyl) + count(carboxylic_acid) + count(amide) + count(nitro)",
    ),
    ("ionic group", 'count("[O;-1]") + count("[N;+1]") >= 1'),
    ("branching", "desc(branching_degree)"),
    ("aromatic ring", "desc(aromatic_ring_count) >= 1"),
    ("overall charge", "desc(formal_charge_total)"),
    ("logp", "desc(logp)"),
    ("partition coefficient", "desc(logp)"),
    ("drug-likeness", "desc(qed)"),
    ("qed", "desc(qed)"),
    ("polar surface", "desc(tpsa)"),
    ("tpsa", "desc(tpsa)"),
    ("rotatable", "desc(rotatable_bonds)"),
    ("hydrophilic", "count(hydroxyl) + count(amine_h) >= 1"),
    ("hydrophobic", "desc(heavy_atom_count) - desc(hetero_atom_count)"),
    ("ionize", "count(carboxylic_acid) + count(amine_h) >= 1"),
    (
        "steric hindrance",
        'count("[C;D3]-[O]") + count("[C;D4]-[O]") '
        '+ count("[C;D3]-[N]") + count("[C;D4]-[N]")',
    ),
    ("carbon atom", 'count("[C]")'),
    ("cyclic", "desc(ring_count) >= 1"),
    ("fluorine", 'count("[F]") >= 1'),
    ("halogen", "desc(halogen_count)"),
    ("sulfur or phosphorus", 'count("[S]") + count("[P]") >= 1'),
    ("symmetry", "desc(symmetry_class_count)"),
    (
        "multiple functional group",
        "count(hydroxyl) + count(amide) + count(carboxylic_acid)"
        " + count(ether) + count(nitro) >= 2",
    ),
    # acid/base character is approximated by ionizable-group presence
    ("pka", "count(carboxylic_acid) >= 1 or count(amine_h) >= 1"),
    ("acidic", "count(carboxylic_acid) >= 1"),
    ("ring", "desc(ring_count)"),
)

_FALLBACK_SOURCE = "desc(heavy_atom_count)"

# Per-objective synthesis corpora (all sentences ground via the table).
_SENTENCES_COMMON = (
    "Calculate the molecular weight.",
    "Calculate the number of hydrogen bond donors in the structure.",
    "Calculate the number of hydrogen bond acceptors in the structure.",
    "Calculate the presence of aromatic rings.",
)
_SENTENCES_BY_OBJECTIVE = {
    "logp": _SENTENCES_COMMON
    + (
        "Calculate the logP value.",
        "Calculate the size of the hydrophobic regions.",
        "Calculate the presence of hydrophilic substituents.",
        "Calculate the degree of branching in aliphatic chains.",
    ),
    "qed": _SENTENCES_COMMON
    + (
        "Calculate the logP value.",
        "Calculate the polar surface area.",
        "Calculate the number of rotatable bonds.",
        "Calculate the overall charge of the molecule.",
    ),
}
_SENTENCES_PREDICTION = _SENTENCES_COMMON + (
    "Calculate the presence of cyclic structures.",
    "Calculate the degree of branching in aliphatic chains.",
    "Calculate the overall charge of the molecule.",
    "Calculate the number of carbon atoms.",
    "Calculate the molecular symmetry.",
    "Calculate the number of rotatable bonds.",
)


def _fence(body: str) -> str:
    return f"```\n{body}\n```"


def _guard_divisions(node: Node) -> Node:
    """Rebuild the tree with every denominator offset away from zero."""
    if isinstance(node, (Number, Desc, Count)):
        return node
    if isinstance(node, Neg):
        return Neg(_guard_divisions(node.operand))
    if isinstance(node, Not):
        return Not(_guard_divisions(node.operand))
    if isinstance(node, Arith):
        left = _guard_divisions(node.left)
        right = _guard_divisions(node.right)
        if node.op == "/":
            right = Arith("+", right, Number(0.001))
        return Arith(node.op, left, right)
    if isinstance(node, Compare):
        return Compare(node.op, _guard_divisions(node.left), _guard_divisions(node.right))
    if isinstance(node, BoolOp):
        return BoolOp(node.op, _guard_divisions(node.left), _guard_divisions(node.right))
    raise TypeError(f"unknown node {type(node).__name__}")


class HeuristicProvider(PolicyProvider):
    """Fully offline provider: answers from fixed tables and the transform
    registry instead of a language model.  Deterministic by construction."""

    provider_id = "heuristic"

    def respond(self, request: PolicyRequest) -> str:
        ctx = request.context
        if request.kind == "synthesize":
            return _fence("\n".join(self._sentences(ctx)))
        if request.kind == "ground":
            return _fence(self._ground_sentence(ctx.get("sentence", "")))
        if request.kind == "rectify":
            return _fence(self._rectify(ctx))
        if request.kind == "propose":
            return _fence("\n".join(self._propose(ctx)))
        raise ProviderError(f"unsupported request kind {request.kind!r}")

    def _sentences(self, ctx: dict) -> tuple[str, ...]:
        if ctx.get("kind") == "prediction":
            return _SENTENCES_PREDICTION
        objective = str(ctx.get("objective", "")).lower()
        return _SENTENCES_BY_OBJECTIVE.get(objective, _SENTENCES_COMMON)

    def _ground_sentence(self, sentence: str) -> str:
        lowered = sentence.lower()
        for needle, source in _GROUNDING_TABLE:
            if needle in lowered:
                return source
        return _FALLBACK_SOURCE

    def _rectify(self, ctx: dict) -> str:
        source = ctx.get("source", "")
        message = ctx.get("message", "")
        phase = ctx.get("phase", "")
        sentence = ctx.get("sentence", "")
        if phase == "eval" and "zero" in message:
            try:
                return render_rule(_guard_divisions(parse_rule(source)))
            except RuleError:
                pass
        if sentence:
            reground = self._ground_sentence(sentence)
            if reground != source:
                return reground
        return _FALLBACK_SOURCE

    def _propose(self, ctx: dict) -> list[str]:
        k = int(ctx.get("k", 5))
        if ctx.get("kind") == "prediction":
            existing = set(ctx.get("features", ()))
            fresh = [n for n in descriptor_names() if n not in existing]
            return [f"{name} | registry descriptor" for name in fresh[:k]]

        smiles = ctx.get("smiles", "")
        try:
            mol = parse_smiles(smiles)
        except ValueError:
            return []
        seen = {canonical_smiles(mol)}
        lines: list[str] = []
        for transform in list_transforms():
            sites = match_pattern(mol, transform.pattern, unique=True)
            for index in range(len(sites)):
                try:
                    product = apply_transform(mol, transform, match_index=index)
                except (TransformError, ValueError):
                    continue
                out = canonical_smiles(product)
                if out in seen:
                    continue
                seen.add(out)
                lines.append(
                    f"{out} | {transform.description or transform.name}"
                    f" | {transform.name}"
                )
                if len(lines) >= k:
                    return lines
        return lines


# -------------------------------------------------------------------- remote


@dataclass(frozen=True)
class RemoteConfig:
    """Connection settings for a chat-style completion endpoint."""

    endpoint: str
    model: str
    timeout: float = 30.0
    max_concurrent: int = 4
    auth_env: str = "MOLSEARCH_API_KEY"
    headers: tuple[tuple[str, str], ...] = ()
    sampling: tuple[tuple[str, object], ...] = ()  # e.g. (("temperature", 0.2),)


class RemoteProvider(PolicyProvider):
    """Generic chat-endpoint client.

    Request body is {model, messages:[{role, content}]}; the answer is
    read from choices[0].message.content.  The auth token comes from the
    environment variable named in the config, never from the config file.
    """

    def __init__(self, config: RemoteConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self.provider_id = f"remote:{config.model}"
        self._semaphore = threading.BoundedSemaphore(max(1, config.max_concurrent))
        headers = dict(config.headers)
        token = os.environ.get(config.auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(
            timeout=config.timeout, headers=headers, transport=transport
        )

    def close(self) -> None:
        self._client.close()

    def respond(self, request: PolicyRequest) -> str:
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": request.prompt}],
        }
        body.update(dict(self.config.sampling))
        try:
            with self._semaphore:
                response = self._client.post(self.config.endpoint, json=body)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise ProviderError(f"remote provider failed: {exc}") from exc
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(
                "remote response is not in chat-completion shape"
            ) from exc
