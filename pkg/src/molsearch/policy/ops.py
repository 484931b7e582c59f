"""Provider round trips: knowledge synthesis, action proposals, rectification.

These functions own prompt rendering and response parsing so every
provider, scripted or live, is spoken to through the same contract.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from ..descriptors import default_registry
from ..ruledsl import ErrorTrace
from .prompts import extract_fenced, load_template
from .providers import PolicyProvider, PolicyRequest, ProviderError

__all__ = [
    "ActionProposal",
    "synthesize_knowledge",
    "propose_actions",
    "rectify",
    "MAX_SENTENCES",
]

logger = logging.getLogger(__name__)

MAX_SENTENCES = 50

_NUMBERING_RE = re.compile(r"^(?:\d+[.)]\s*|[-*•]\s+)")


@dataclass(frozen=True)
class ActionProposal:
    """One proposed move: a candidate structure (optimization) or a
    descriptor name (prediction), with the rationale kept for the trace."""

    rationale: str
    smiles: str | None = None
    feature: str | None = None
    transform: str | None = None

    def __post_init__(self):
        if not self.rationale:
            raise ValueError("proposal rationale must be non-empty")
        if self.feature is None and self.smiles is None and self.transform is None:
            raise ValueError("proposal needs a candidate structure or a feature")
        if self.feature is not None and (
            self.smiles is not None or self.transform is not None
        ):
            raise ValueError("a feature proposal cannot also carry a structure")


def _task_kind(task) -> str:
    return getattr(task, "kind", "optimization")

def _task_objective(task) -> str:
    for attr in ("objective", "target_property", "metric"):
        value = getattr(task, attr, None)
        if value:
            return str(value)
    return ""


def _task_summary(task) -> str:
    describe = getattr(task, "describe", None)
    if callable(describe):
        return describe()
    kind = _task_kind(task)
    objective = _task_objective(task)
    return f"{kind} ({objective})" if objective else kind


def synthesize_knowledge(task, provider: PolicyProvider) -> list[str]:
    """Ask the provider for heuristic rule sentences for this task.

    Sentences must start with "Calculate" (others are dropped with a
    warning), are deduplicated case-insensitively, and are capped at
    MAX_SENTENCES.  An answer with no usable sentence is an error.
    """
    prompt = load_template("P0").render(task=_task_summary(task))
    raw = provider.respond(
        PolicyRequest(
            kind="synthesize",
            prompt=prompt,
            context={"kind": _task_kind(task), "objective": _task_objective(task)},
        )
    )
    block = extract_fenced(raw)
    if block is None:
        raise ProviderError("synthesis response contains no fenced block")
    sentences: list[str] = []
    seen: set[str] = set()
    for line in block.splitlines():
        line = _NUMBERING_RE.sub("", line.strip()).strip()
        if not line:
            continue
        if not line.startswith("Calculate"):
            logger.warning("dropping rule sentence not starting with Calculate: %r", line)
            continue
        key = line.lower()
        if key in seen:
            continue
        seen.add(key)
        sentences.append(line)
    if not sentences:
        raise ProviderError("synthesis response contains no usable rule sentence")
    if len(sentences) > MAX_SENTENCES:
        logger.warning(
            "truncating %d rule sentences to %d", len(sentences), MAX_SENTENCES
        )
        sentences = sentences[:MAX_SENTENCES]
    return sentences


def _state_fields(state) -> tuple[str, dict]:
    """(state summary text, structured context) for either task kind."""
    if hasattr(state, "features"):
        features = tuple(state.features)
        summary = (
            "feature set: " + (", ".join(features) if features else "(empty)")
        )
        return summary, {"kind": "prediction", "features": features}
    smiles = getattr(state, "smiles", str(state))
    return f"molecule: {smiles}", {"kind": "optimization", "smiles": smiles}


def propose_actions(
    state, knowledge: list[str], provider: PolicyProvider, k: int = 5
) -> list[ActionProposal]:
    """Ask the provider for up to k next states from this state.

    Unusable responses yield an empty list (the search treats the node as
    a dead end); prediction proposals never duplicate an existing feature
    or name an unregistered descriptor.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    summary, context = _state_fields(state)
    context["k"] = k
    task_text = (
        "extend a feature set for property prediction"
        if context["kind"] == "prediction"
        else "optimize a molecular structure"
    )
    prompt = load_template("Expand").render(
        task=task_text,
        state=summary,
        rules="\n".join(knowledge) if knowledge else "(none)",
        k=k,
    )
    raw = provider.respond(PolicyRequest(kind="propose", prompt=prompt, context=context))
    block = extract_fenced(raw)
    if block is None:
        logger.warning("proposal response contains no fenced block; dead end")
        return []

    proposals: list[ActionProposal] = []
    if context["kind"] == "prediction":
        existing = set(context["features"])
        registry = default_registry()
        for payload, rationale, _ in _candidate_lines(block):
            if payload in existing or any(p.feature == payload for p in proposals):
                logger.warning("dropping duplicate feature proposal %r", payload)
                continue
            if payload not in registry:
                logger.warning("dropping unknown descriptor proposal %r", payload)
                continue
            proposals.append(ActionProposal(rationale=rationale, feature=payload))
            if len(proposals) == k:
                break
        return proposals

    for payload, rationale, transform in _candidate_lines(block):
        if payload.startswith("apply:"):
            name = payload[len("apply:"):].strip()
            if not name:
                logger.warning("dropping empty transform proposal")
                continue
            proposals.append(ActionProposal(rationale=rationale, transform=name))
        else:
            proposals.append(
                ActionProposal(rationale=rationale, smiles=payload, transform=transform)
            )
        if len(proposals) == k:
            break
    return proposals


def _candidate_lines(block: str):
    """Parse 'payload | rationale | annotation' lines from a fenced block."""
    for line in block.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        payload = parts[0]
        if not payload:
            continue
        rationale = parts[1] if len(parts) > 1 and parts[1] else "(no rationale given)"
        annotation = parts[2] if len(parts) > 2 and parts[2] else None
        yield payload, rationale, annotation


def rectify(
    src: str, trace: ErrorTrace, provider: PolicyProvider, sentence: str = ""
) -> str:
    """One self-correction round: show the provider the failed source and
    its error (message and position verbatim) and return the revised
    source from the response's fenced block."""
    position = "?" if trace.position is None else str(trace.position)
    prompt = load_template("Pfix").render(
        sentence=sentence or "(sentence unavailable)",
        previous=src,
        error=f"{trace.phase} error at position {position}: {trace.message}",
    )
    raw = provider.respond(
        PolicyRequest(
            kind="rectify",
            prompt=prompt,
            context={
                "source": src,
                "phase": trace.phase,
                "message": trace.message,
                "position": trace.position,
                "sentence": sentence,
            },
        )
    )
    return (extract_fenced(raw) or "").strip()
