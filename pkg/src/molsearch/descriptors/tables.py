"""Loader for the tab-separated parameter tables shipped with the package.

Every table carries provenance header comments (``# source:`` and
``# version:``); loading fails if they are missing so a stripped or
hand-edited table cannot silently feed the descriptors.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class ParameterTable:
    """Parsed table: ordered rows of (type_id, pattern, value) plus provenance."""

    name: str
    source: str
    version: str
    rows: tuple[tuple[str, str, float], ...]

    def value(self, type_id: str) -> float:
        for tid, _, v in self.rows:
            if tid == type_id:
                return v
        raise KeyError(f"{self.name}: no row {type_id!r}")

    def as_dict(self) -> dict[str, float]:
        return {tid: v for tid, _, v in self.rows}

    def patterns(self) -> tuple[tuple[str, str], ...]:
        return tuple((tid, pat) for tid, pat, _ in self.rows)


def load_table(filename: str) -> ParameterTable:
    """Read a data table from the package; raises on missing provenance."""
    text = (
        resources.files("molsearch.descriptors").joinpath("data", filename).read_text()
    )
    return parse_table_text(text, filename)


def parse_table_text(text: str, filename: str) -> ParameterTable:
    """Parse table text; raises on missing provenance or malformed rows."""
    source = version = None
    rows: list[tuple[str, str, float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.lower().startswith("source:"):
                source = body[len("source:") :].strip()
            elif body.lower().startswith("version:"):
                version = body[len("version:") :].strip()
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{filename}:{lineno}: expected 3 tab-separated columns")
        type_id, pattern, raw = parts
        try:
            value = float(raw)
        except ValueError as exc:
            raise ValueError(f"{filename}:{lineno}: bad value {raw!r}") from exc
        rows.append((type_id, pattern, value))
    if source is None or version is None:
        raise ValueError(f"{filename}: missing provenance header (source/version)")
    if not rows:
        raise ValueError(f"{filename}: table has no rows")
    return ParameterTable(name=filename, source=source, version=version, rows=tuple(rows))
