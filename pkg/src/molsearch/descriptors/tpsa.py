"""Topological polar surface area from nitrogen/oxygen center contributions.

Each N/O atom is encoded as a profile key (charge, bond-kind counts, hydrogen
count, three-ring membership) and looked up in the contribution table; atoms
with no table row contribute nothing, which keeps exotic centers neutral
rather than wrong.
"""
from __future__ import annotations

from functools import lru_cache

from ..molgraph.mol import Molecule
from .tables import load_table

__all__ = ["tpsa", "tpsa_profile_key"]


@lru_cache(maxsize=1)
def _contrib() -> dict[str, float]:
    return load_table("tpsa_contributions.tsv").as_dict()


def tpsa_profile_key(mol: Molecule, idx: int) -> str | None:
    """Profile key for an N/O atom, or None for other elements."""
    a = mol.atoms[idx]
    if a.element not in ("N", "O"):
        return None
    n_arom = n_single = n_double = n_triple = 0
    for _, bi in mol.neighbors(idx):
        b = mol.bonds[bi]
        if b.aromatic:
            n_arom += 1
        elif b.order == 1:
            n_single += 1
        elif b.order == 2:
            n_double += 1
        else:
            n_triple += 1
    symbol = a.element.lower() if a.aromatic else a.element
    if a.charge > 0:
        symbol += "+"
    elif a.charge < 0:
        symbol += "-"
    parts = []
    if a.aromatic:
        if n_arom:
            parts.append(f"{n_arom}a")
        if n_single:
            parts.append(f"{n_single}s")
        if n_double:
            parts.append(f"{n_double}d")
    else:
        if n_single:
            parts.append(f"{n_single}s")
        if n_double:
            parts.append(f"{n_double}d")
        if n_triple:
            parts.append(f"{n_triple}t")
    bond_part = "".join(parts) if parts else "0"
    key = f"{symbol}.{bond_part}.{a.h_count}H"
    if not a.aromatic and mol.atom_in_small_ring(idx, 3):
        with_ring = f"{key}.r3"
        if with_ring in _contrib():
            return with_ring
    return key


def tpsa(mol: Molecule) -> float:
    """Sum of polar-center contributions; 0.0 when no N/O present."""
    table = _contrib()
    total = 0.0
    for idx in range(len(mol.atoms)):
        key = tpsa_profile_key(mol, idx)
        if key is not None:
            total += table.get(key, 0.0)
    return total
