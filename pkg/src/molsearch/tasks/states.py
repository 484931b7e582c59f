"""Search-state handles: feature tuples and validated molecule snapshots."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..descriptors import compute, default_registry
from ..molgraph import canonical_smiles, fingerprint, parse_smiles, sanitize

__all__ = ["PredictionState", "OptimizationState"]


@dataclass(frozen=True)
class PredictionState:
    """An ordered tuple of registered descriptor names."""

    features: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        if len(set(self.features)) != len(self.features):
            raise ValueError(f"duplicate feature names in {self.features!r}")
        registry = default_registry()
        for name in self.features:
            if name not in registry:
                raise ValueError(f"unregistered descriptor {name!r}")

    def __len__(self) -> int:
        return len(self.features)

    def with_feature(self, name: str) -> "PredictionState":
        return PredictionState(self.features + (name,))


@dataclass(frozen=True, eq=False)
class OptimizationState:
    """A sanitized molecule pinned to its canonical string.

    Identity (equality, hashing) is the canonical SMILES; the parsed graph
    and a descriptor/fingerprint cache ride along for scoring.
    """

    smiles: str
    mol: object = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_smiles(cls, text: str) -> "OptimizationState":
        """Parse, sanitize, and canonicalize; rejects broken structures.

        The stored graph is re-parsed from the canonical string, so any two
        traversals of the same molecule yield bit-identical states — float
        descriptor sums see the atoms in the same order either way.
        """
        mol = parse_smiles(text)
        report = sanitize(mol)
        if not report.valid:
            issue = report.issues[0][1]
            raise ValueError(f"structure fails sanitization: {issue}")
        smiles = canonical_smiles(mol)
        return cls(smiles=smiles, mol=parse_smiles(smiles))

    def __eq__(self, other) -> bool:
        if not isinstance(other, OptimizationState):
            return NotImplemented
        return self.smiles == other.smiles

    def __hash__(self) -> int:
        return hash(self.smiles)

    def descriptor(self, name: str) -> float:
        """Registry descriptor value, computed once per state."""
        if name not in self._cache:
            self._cache[name] = compute(self.mol, name)
        return self._cache[name]

    def fp(self):
        """Path-based fingerprint, computed once per state."""
        if "__fp__" not in self._cache:
            self._cache["__fp__"] = fingerprint(self.mol)
        return self._cache["__fp__"]
