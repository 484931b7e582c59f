"""Descriptor registry: the single lookup point for named molecular features.

Rule expressions, feature-selection states, and reports all refer to
descriptors by these names, so the registry is the contract for what a
feature name means.
"""
from __future__ import annotations

from typing import Callable

from ..molgraph.mol import Molecule
from . import basic
from .crippen import crippen_logp
from .qed import qed
from .tpsa import tpsa

__all__ = ["DescriptorRegistry", "default_registry", "compute", "descriptor_names"]

DescriptorFn = Callable[[Molecule], float]


class DescriptorRegistry:
    """Name -> function mapping with registration-order iteration."""

    def __init__(self) -> None:
        self._fns: dict[str, DescriptorFn] = {}

    def register(self, name: str, fn: DescriptorFn) -> None:
        if name in self._fns:
            raise ValueError(f"descriptor {name!r} already registered")
        self._fns[name] = fn

    def names(self) -> tuple[str, ...]:
        return tuple(self._fns)

    def __contains__(self, name: str) -> bool:
        return name in self._fns

    def compute(self, mol: Molecule, name: str) -> float:
        try:
            fn = self._fns[name]
        except KeyError:
            raise KeyError(
                f"unknown descriptor {name!r}; known: {', '.join(self._fns)}"
            ) from None
        return float(fn(mol))


def _build_default() -> DescriptorRegistry:
    reg = DescriptorRegistry()
    reg.register("molecular_weight", basic.molecular_weight)
    reg.register("heavy_atom_count", basic.heavy_atom_count)
    reg.register("hetero_atom_count", basic.hetero_atom_count)
    reg.register("formal_charge_total", basic.formal_charge_total)
    reg.register("hbd_count", basic.hbd_count)
    reg.register("hba_count", basic.hba_count)
    reg.register("halogen_count", basic.halogen_count)
    reg.register("ring_count", basic.ring_count)
    reg.register("aromatic_ring_count", basic.aromatic_ring_count)
    reg.register("rotatable_bonds", basic.rotatable_bonds)
    reg.register("branching_degree", basic.branching_degree)
    reg.register("symmetry_class_count", basic.symmetry_class_count)
    reg.register("tpsa", tpsa)
    reg.register("logp", crippen_logp)
    reg.register("qed", qed)
    return reg


_DEFAULT = _build_default()


def default_registry() -> DescriptorRegistry:
    return _DEFAULT


def compute(mol: Molecule, name: str) -> float:
    """Compute a named descriptor with the default registry."""
    return _DEFAULT.compute(mol, name)


def descriptor_names() -> tuple[str, ...]:
    return _DEFAULT.names()
