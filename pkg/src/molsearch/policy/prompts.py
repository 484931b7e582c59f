"""Prompt templates and response extraction.

Templates are editable text files in this package's data directory with
``{name}`` placeholders.  Rendering is strict: every placeholder must be
supplied, and the rendered text must contain no brace at all, so an
unresolved or half-typed placeholder can never reach a provider.

Providers answer with their payload inside the first triple-backtick
fenced block; everything outside the block is ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

__all__ = [
    "PromptError",
    "PromptTemplate",
    "TEMPLATE_IDS",
    "load_template",
    "extract_fenced",
]

TEMPLATE_IDS = ("P0", "Pfix", "Expand")

_DATA_DIR = Path(__file__).parent / "data"
_FILES = {"P0": "p0.txt", "Pfix": "pfix.txt", "Expand": "expand.txt"}

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")
_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


class PromptError(ValueError):
    """Template loading or rendering failed."""


@dataclass(frozen=True)
class PromptTemplate:
    """A named prompt with ``{placeholder}`` slots."""

    template_id: str
    text: str

    def __post_init__(self):
        if self.template_id not in TEMPLATE_IDS:
            raise PromptError(
                f"unknown template id {self.template_id!r}; known: {TEMPLATE_IDS}"
            )

    def placeholders(self) -> frozenset[str]:
        return frozenset(_PLACEHOLDER_RE.findall(self.text))

    def render(self, **values: object) -> str:
        def substitute(match: re.Match) -> str:
            name = match.group(1)
            if name not in values:
                raise PromptError(
                    f"template {self.template_id}: placeholder {name!r} not supplied"
                )
            return str(values[name])

        rendered = _PLACEHOLDER_RE.sub(substitute, self.text)
        if "{" in rendered or "}" in rendered:
            raise PromptError(
                f"template {self.template_id}: rendered prompt still contains a brace"
            )
        return rendered


@lru_cache(maxsize=None)
def load_template(template_id: str) -> PromptTemplate:
    """Load a shipped template by id (P0, Pfix, or Expand)."""
    if template_id not in _FILES:
        raise PromptError(
            f"unknown template id {template_id!r}; known: {TEMPLATE_IDS}"
        )
    path = _DATA_DIR / _FILES[template_id]
    return PromptTemplate(template_id=template_id, text=path.read_text())


def extract_fenced(text: str) -> str | None:
    """Content of the first fenced block, or None when there is none."""
    match = _FENCE_RE.search(text)
    return match.group(1) if match else None
