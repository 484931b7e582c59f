"""Counting and topology descriptors that need no parameter fitting."""
from __future__ import annotations

from functools import lru_cache

from ..molgraph.canonical import _initial_ranks, _refine  # shared rank refinement
from ..molgraph.elements import HALOGENS
from ..molgraph.mol import Molecule
from .tables import load_table


@lru_cache(maxsize=1)
def _weights() -> dict[str, float]:
    return load_table("atomic_weights.tsv").as_dict()


def molecular_weight(mol: Molecule) -> float:
    """Average molecular weight including implicit hydrogens."""
    w = _weights()
    total = 0.0
    for a in mol.atoms:
        try:
            total += w[a.element]
        except KeyError:
            raise ValueError(f"no atomic weight for element {a.element!r}") from None
        total += a.h_count * w["H"]
    return total


def heavy_atom_count(mol: Molecule) -> float:
    return float(sum(1 for a in mol.atoms if a.element != "H"))


def hetero_atom_count(mol: Molecule) -> float:
    """Heavy atoms that are not carbon."""
    return float(sum(1 for a in mol.atoms if a.element not in ("C", "H")))


def formal_charge_total(mol: Molecule) -> float:
    return float(sum(a.charge for a in mol.atoms))


def hbd_count(mol: Molecule) -> float:
    """Hydrogen-bond donors: N or O atoms carrying at least one hydrogen."""
    return float(
        sum(1 for a in mol.atoms if a.element in ("N", "O") and a.h_count >= 1)
    )


def hba_count(mol: Molecule) -> float:
    """Hydrogen-bond acceptors: N or O atoms that are not positively charged."""
    return float(
        sum(1 for a in mol.atoms if a.element in ("N", "O") and a.charge <= 0)
    )


def halogen_count(mol: Molecule) -> float:
    return float(sum(1 for a in mol.atoms if a.element in HALOGENS))


def ring_count(mol: Molecule) -> float:
    """Number of independent rings (cycle rank of the graph)."""
    return float(mol.ring_count)


def aromatic_ring_count(mol: Molecule) -> float:
    """Small rings whose every bond carries the aromatic flag."""
    count = 0
    for ring in mol.rings:
        size = len(ring)
        ok = True
        for k in range(size):
            bi = mol.bond_index_between(ring[k], ring[(k + 1) % size])
            if bi is None or not mol.bonds[bi].aromatic:
                ok = False
                break
        if ok:
            count += 1
    return float(count)


def rotatable_bonds(mol: Molecule) -> float:
    """Single non-ring bonds between two non-terminal atoms whose rotation
    changes the shape: bonds next to a triple bond, amide/ester-like C(=X)-X
    bonds, and bonds into locally symmetric rotors (CF3/CCl3/CBr3, tert-butyl)
    are excluded."""
    atoms = mol.atoms

    def has_triple(idx: int) -> bool:
        return any(mol.bonds[bi].order == 3 for _, bi in mol.neighbors(idx))

    def symmetric_rotor(idx: int) -> bool:
        # carbon carrying three identical terminal substituents
        if atoms[idx].element != "C" or atoms[idx].aromatic:
            return False
        for hal in ("F", "Cl", "Br"):
            if sum(1 for n, _ in mol.neighbors(idx) if atoms[n].element == hal) >= 3:
                return True
        methyls = sum(
            1
            for n, _ in mol.neighbors(idx)
            if atoms[n].element == "C" and not atoms[n].aromatic and atoms[n].h_count == 3
        )
        return methyls >= 3

    def amide_like(c_idx: int, x_idx: int) -> bool:
        # C(=N/O/S) with heavy degree 3 single-bonded to a non-terminal N/O/S
        c = atoms[c_idx]
        if c.element != "C" or c.aromatic or mol.degree(c_idx) != 3:
            return False
        if atoms[x_idx].element not in ("N", "O", "S") or mol.degree(x_idx) < 2:
            return False
        return any(
            mol.bonds[bi].order == 2
            and not mol.bonds[bi].aromatic
            and atoms[n].element in ("N", "O", "S")
            for n, bi in mol.neighbors(c_idx)
            if n != x_idx
        )

    count = 0
    for bi, b in enumerate(mol.bonds):
        if b.order != 1 or b.aromatic or mol.bond_in_ring(bi):
            continue
        if mol.degree(b.a1) < 2 or mol.degree(b.a2) < 2:
            continue
        if has_triple(b.a1) or has_triple(b.a2):
            continue
        if symmetric_rotor(b.a1) or symmetric_rotor(b.a2):
            continue
        if amide_like(b.a1, b.a2) or amide_like(b.a2, b.a1):
            continue
        count += 1
    return float(count)


def branching_degree(mol: Molecule) -> float:
    """Heavy atoms bonded to three or more heavy neighbors."""
    return float(sum(1 for i in range(len(mol.atoms)) if mol.degree(i) >= 3))


def symmetry_class_count(mol: Molecule) -> float:
    """Number of topological equivalence classes of atoms.

    Classes come from the same neighborhood-refinement ranking that drives
    canonical emission; benzene has one class, toluene five.
    """
    comp = tuple(range(len(mol.atoms)))
    ranks = _refine(mol, comp, _initial_ranks(mol, comp))
    return float(len(set(ranks.values())))
