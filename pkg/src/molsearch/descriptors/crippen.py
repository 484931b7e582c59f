"""Atomic-contribution logP with a native atom typer.

Each heavy atom is assigned one class from the published contribution table
(first matching class in table order wins), attached hydrogens are classed
by their heavy atom's environment, and logP is the plain sum — additive over
disconnected components by construction.
"""
from __future__ import annotations

from functools import lru_cache

from ..molgraph.elements import HALOGENS
from ..molgraph.mol import Molecule
from .tables import load_table

__all__ = ["crippen_logp", "crippen_atom_types"]

_HET = ("N", "O", "P", "S", "F", "Cl", "Br", "I")


@lru_cache(maxsize=1)
def _contrib() -> dict[str, float]:
    return load_table("crippen_contributions.tsv").as_dict()


def _neighbor_profile(mol: Molecule, idx: int):
    """Split neighbors by bond kind: (aromatic, single, double, triple) lists
    of neighbor atom indices."""
    arom, single, double, triple = [], [], [], []
    for n, bi in mol.neighbors(idx):
        b = mol.bonds[bi]
        if b.aromatic:
            arom.append(n)
        elif b.order == 1:
            single.append(n)
        elif b.order == 2:
            double.append(n)
        else:
            triple.append(n)
    return arom, single, double, triple


def _carbon_type(mol: Molecule, idx: int) -> str:
    a = mol.atoms[idx]
    arom, single, double, triple = _neighbor_profile(mol, idx)
    atoms = mol.atoms
    if a.aromatic:
        subs = single + double  # exocyclic, non-aromatic-bond neighbors
        if any(atoms[n].element not in ("C",) + _HET for n in subs):
            return "C13"
        for n in single:
            if atoms[n].element == "F":
                return "C14"
            if atoms[n].element == "Cl":
                return "C15"
            if atoms[n].element == "Br":
                return "C16"
            if atoms[n].element == "I":
                return "C17"
        if a.h_count >= 1:
            return "C18"
        if len(arom) == 3:
            return "C19"
        if any(atoms[n].aromatic for n in single):
            return "C20"
        if any(atoms[n].element == "C" and not atoms[n].aromatic for n in single):
            return "C21"
        if any(atoms[n].element == "N" and not atoms[n].aromatic for n in single):
            return "C22"
        if any(atoms[n].element == "O" and not atoms[n].aromatic for n in single):
            return "C23"
        if any(atoms[n].element == "S" for n in single):
            return "C24"
        if any(atoms[n].element in ("C", "N", "O") for n in double):
            return "C25"
        return "CS"
    # aliphatic carbon
    if any(atoms[n].element != "C" for n in double):
        return "C5"
    if triple or len(double) >= 2:
        return "C7"
    if double:  # exactly one C=C partner
        if any(atoms[n].aromatic for n in double):
            return "C26"
        if any(atoms[n].aromatic for n in single + arom):
            return "C26"
        return "C6"
    # sp3: attachment to an aromatic system outranks heteroatom attachment
    aromatic_neighbors = [n for n in single if atoms[n].aromatic]
    if aromatic_neighbors:
        if a.h_count == 3:
            if all(atoms[n].element == "C" for n in aromatic_neighbors):
                return "C8"
            return "C9"
        if a.h_count == 2:
            return "C10"
        if a.h_count == 1:
            return "C11"
        return "C12"
    if any(atoms[n].element in _HET and not atoms[n].aromatic for n in single):
        return "C3" if a.h_count >= 2 else "C4"
    if all(atoms[n].element == "C" for n in single):
        return "C1" if a.h_count >= 2 else "C2"
    return "C27"


def _nitrogen_type(mol: Molecule, idx: int) -> str:
    a = mol.atoms[idx]
    arom, single, double, triple = _neighbor_profile(mol, idx)
    atoms = mol.atoms
    if a.aromatic:
        return "N12" if a.charge != 0 else "N11"
    if a.charge > 0:
        if a.h_count >= 1:
            return "N10"
        if triple or len(double) >= 2:
            return "N14"
        if double or len(single) == 4:
            return "N13"
        return "NS"
    if a.charge < 0:
        return "NS"
    if triple:
        return "N9"
    if double:
        return "N5" if a.h_count >= 1 else "N6"
    has_aromatic_neighbor = any(atoms[n].aromatic for n in single)
    if a.h_count == 2:
        return "N3" if has_aromatic_neighbor else "N1"
    if a.h_count == 1:
        return "N4" if has_aromatic_neighbor else "N2"
    return "N8" if has_aromatic_neighbor else "N7"


def _oxygen_type(mol: Molecule, idx: int) -> str:
    a = mol.atoms[idx]
    arom, single, double, triple = _neighbor_profile(mol, idx)
    atoms = mol.atoms
    if a.aromatic:
        return "O1"
    if a.charge < 0:
        nbrs = single + double
        if any(atoms[n].element == "N" for n in nbrs):
            return "O5"
        if any(atoms[n].element == "S" for n in nbrs):
            return "O6"
        for n in nbrs:
            if atoms[n].element == "C":
                _, _, c_double, _ = _neighbor_profile(mol, n)
                if any(atoms[m].element == "O" and m != idx for m in c_double):
                    return "O12"
        return "O7"
    if a.charge > 0:
        return "OS"
    if a.h_count >= 1:
        return "O2"
    if double:
        partner = double[0]
        p = atoms[partner]
        if p.element == "C" and p.aromatic:
            return "O8"
        if p.element in ("N", "O"):
            return "O5"
        if p.element == "S":
            return "O6"
        if p.element == "C":
            others = [
                n
                for n, _ in mol.neighbors(partner)
                if n != idx
            ]
            if len(others) == 2 and all(atoms[n].element not in ("C", "H") for n in others):
                return "O11"
            if any(atoms[n].aromatic for n in others):
                return "O10"
            return "O9"
        return "OS"
    if len(single) == 2:
        if any(atoms[n].aromatic for n in single):
            return "O4"
        return "O3"
    return "OS"


def _hydrogen_type(mol: Molecule, idx: int) -> str:
    """Class of the hydrogens attached to heavy atom idx."""
    a = mol.atoms[idx]
    atoms = mol.atoms
    if a.element == "C":
        return "H1"
    if a.element == "N":
        return "H3"
    if a.element == "S":
        return "H2"
    if a.element == "O":
        heavy = [n for n, _ in mol.neighbors(idx)]
        if not heavy:
            return "H2"  # bare water-like O
        x = atoms[heavy[0]]
        if x.element == "N":
            return "H3"
        if x.element in ("O", "S"):
            return "H4"
        if x.element == "C":
            if x.aromatic:
                return "H2"
            _, _, x_double, _ = _neighbor_profile(mol, heavy[0])
            if any(atoms[m].element in ("C", "N", "O", "S") for m in x_double):
                return "H4"
            return "H2"
        return "H2"
    return "H2"


def _atom_type(mol: Molecule, idx: int) -> str:
    el = mol.atoms[idx].element
    if el == "C":
        return _carbon_type(mol, idx)
    if el == "N":
        return _nitrogen_type(mol, idx)
    if el == "O":
        return _oxygen_type(mol, idx)
    if el == "S":
        a = mol.atoms[idx]
        if a.aromatic:
            return "S3"
        if a.charge != 0 or mol.bond_order_sum(idx) > 2:
            return "S2"
        return "S1"
    if el == "P":
        return "P"
    if el in HALOGENS:
        return el
    if el == "B":
        return "B"
    raise ValueError(f"no logP class for element {el!r}")


def crippen_atom_types(mol: Molecule) -> list[tuple[int, str, float, str | None, float]]:
    """Per-atom classification: (index, class, value, H class, total H value)."""
    table = _contrib()
    out = []
    for idx, a in enumerate(mol.atoms):
        t = _atom_type(mol, idx)
        if a.h_count > 0:
            ht = _hydrogen_type(mol, idx)
            hv = a.h_count * table[ht]
        else:
            ht, hv = None, 0.0
        out.append((idx, t, table[t], ht, hv))
    return out


def crippen_logp(mol: Molecule) -> float:
    """Sum of atomic contributions; additive over disconnected components."""
    return sum(v + hv for _, _, v, _, hv in crippen_atom_types(mol))
