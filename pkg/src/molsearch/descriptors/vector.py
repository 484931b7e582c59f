"""Descriptor vectors: ordered numeric feature rows for learning tasks."""
from __future__ import annotations

import numpy as np

from ..molgraph.mol import Molecule
from .registry import DescriptorRegistry, default_registry

__all__ = ["descriptor_vector", "descriptor_matrix"]


def descriptor_vector(
    mol: Molecule,
    names: tuple[str, ...] | list[str],
    registry: DescriptorRegistry | None = None,
) -> np.ndarray:
    """Values of the named descriptors, in sorted name order.

    Names must be unique; unknown names raise KeyError before any work.
    """
    reg = registry or default_registry()
    ordered = sorted(names)
    if len(set(ordered)) != len(ordered):
        raise ValueError(f"duplicate descriptor names in {names!r}")
    for n in ordered:
        if n not in reg:
            raise KeyError(f"unknown descriptor {n!r}")
    return np.array([reg.compute(mol, n) for n in ordered], dtype=float)


def descriptor_matrix(
    mols: list[Molecule],
    names: tuple[str, ...] | list[str],
    registry: DescriptorRegistry | None = None,
) -> np.ndarray:
    """Stacked descriptor vectors, one row per molecule."""
    if not mols:
        return np.zeros((0, len(names)))
    return np.vstack([descriptor_vector(m, names, registry) for m in mols])
