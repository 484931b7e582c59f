"""Pluggable proposal policies: knowledge synthesis, rule rectification,
and search-move generation, backed by a scripted replayer, an offline
heuristic engine, or a remote chat endpoint."""
from .ops import (
    MAX_SENTENCES,
    ActionProposal,
    propose_actions,
    rectify,
    synthesize_knowledge,
)
from .prompts import (
    TEMPLATE_IDS,
    PromptError,
    PromptTemplate,
    extract_fenced,
    load_template,
)
from .providers import (
    SCRIPT_SCHEMA,
    HeuristicProvider,
    PolicyProvider,
    PolicyRequest,
    ProviderError,
    RemoteConfig,
    RemoteProvider,
    ScriptedProvider,
)

__all__ = [
    "ActionProposal",
    "synthesize_knowledge",
    "propose_actions",
    "rectify",
    "MAX_SENTENCES",
    "PromptError",
    "PromptTemplate",
    "TEMPLATE_IDS",
    "load_template",
    "extract_fenced",
    "ProviderError",
    "PolicyRequest",
    "PolicyProvider",
    "ScriptedProvider",
    "HeuristicProvider",
    "RemoteConfig",
    "RemoteProvider",
    "SCRIPT_SCHEMA",
]
