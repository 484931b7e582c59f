"""Aromatic system handling: kekulization and ring aromatization.

Aromatic bonds arrive from the parser with order 1 and ``aromatic=True``;
kekulization assigns concrete 1/2 orders by solving a perfect matching over
the atoms that need exactly one ring double bond.  The aromatic flags are
kept so emission and matching can still see the delocalized picture.
"""
from __future__ import annotations

from dataclasses import replace

from .elements import allowed_valences
from .mol import Bond, Molecule


class KekulizationError(ValueError):
    """No consistent single/double assignment exists for an aromatic system."""


def _ring_double_target(mol: Molecule, idx: int) -> int | None:
    """How many double bonds this aromatic atom needs among its aromatic bonds.

    Returns 0 or 1, or None when no allowed valence is reachable.
    """
    atom = mol.atoms[idx]
    arom_count = 0
    fixed = 0
    exo_double = False
    for _, bi in mol.neighbors(idx):
        b = mol.bonds[bi]
        if b.aromatic:
            arom_count += 1
        else:
            fixed += b.order
            if b.order == 2:
                exo_double = True
    if atom.explicit_h or atom.charge != 0:
        conn = arom_count + fixed + atom.h_count
        for v in allowed_valences(atom.element, atom.charge):
            need = v - conn
            if need in (0, 1):
                return need
        return None
    # Bare organic-subset atom: hydrogen count still unknown, use conventions.
    el = atom.element
    if el in ("O", "S", "B"):
        return 0
    if el in ("N", "P"):
        # Two connections -> pyridine-like (one double); three -> pyrrole-like.
        return 1 if (arom_count + fixed) == 2 else 0
    if el == "C":
        return 0 if exo_double else 1
    return None


def kekulize(mol: Molecule, positions: tuple[int, ...] | None = None) -> Molecule:
    """Assign 1/2 orders to aromatic bonds; raises KekulizationError on failure.

    ``positions`` optionally maps atom index -> source text offset for error
    messages.
    """
    aromatic_bonds = [bi for bi, b in enumerate(mol.bonds) if b.aromatic]
    if not aromatic_bonds:
        return mol

    def fail(idx: int, why: str) -> KekulizationError:
        where = f" (position {positions[idx]})" if positions else f" (atom {idx})"
        return KekulizationError(f"cannot kekulize aromatic system: {why}{where}")

    need: set[int] = set()
    for idx, atom in enumerate(mol.atoms):
        if not atom.aromatic:
            continue
        target = _ring_double_target(mol, idx)
        if target is None:
            raise fail(idx, f"no valence assignment for aromatic {atom.element}")
        if target == 1:
            need.add(idx)

    # Candidate double bonds: aromatic bonds joining two atoms that both need one.
    candidates: dict[int, list[int]] = {i: [] for i in need}
    for bi in aromatic_bonds:
        b = mol.bonds[bi]
        if b.a1 in need and b.a2 in need:
            candidates[b.a1].append(bi)
            candidates[b.a2].append(bi)

    chosen: set[int] = set()

    def solve(open_atoms: set[int]) -> bool:
        if not open_atoms:
            return True
        # Most-constrained atom first keeps the backtracking shallow.
        pivot = min(
            open_atoms,
            key=lambda i: (
                sum(
                    1
                    for bi in candidates[i]
                    if mol.bonds[bi].other(i) in open_atoms
                ),
                i,
            ),
        )
        options = [bi for bi in candidates[pivot] if mol.bonds[bi].other(pivot) in open_atoms]
        for bi in options:
            partner = mol.bonds[bi].other(pivot)
            chosen.add(bi)
            if solve(open_atoms - {pivot, partner}):
                return True
            chosen.discard(bi)
        return False

    if not solve(set(need)):
        unmatched = min(need)
        raise fail(unmatched, "no perfect double-bond assignment")

    bonds = list(mol.bonds)
    for bi in aromatic_bonds:
        bonds[bi] = replace(bonds[bi], order=2 if bi in chosen else 1)
    return Molecule(atoms=mol.atoms, bonds=tuple(bonds), source=mol.source)


def detect_aromatic_rings(mol: Molecule) -> Molecule:
    """Mark six-membered all-sp2 carbon/nitrogen rings in kekulized input aromatic.

    Each ring atom must carry exactly one double bond, and that double bond
    must itself lie on a ring.  This accepts both an isolated alternating ring
    and fused systems (naphthalene written kekule, where two atoms have their
    double bond in the neighbouring ring) while rejecting quinone-style rings
    whose doubles point at exocyclic oxygens.  Every candidate ring is judged
    against the input as written, so detection order cannot matter.
    """
    new_atoms: set[int] = set()
    new_bonds: set[int] = set()
    for ring in mol.rings:
        if len(ring) != 6:
            continue
        if not all(
            mol.atoms[i].element in ("C", "N") and mol.atoms[i].charge == 0
            for i in ring
        ):
            continue
        if any(mol.atoms[i].aromatic for i in ring):
            continue
        ring_bonds = []
        ok = True
        for k in range(6):
            bi = mol.bond_index_between(ring[k], ring[(k + 1) % 6])
            if bi is None or mol.bonds[bi].aromatic:
                ok = False
                break
            ring_bonds.append(bi)
        if ok:
            for i in ring:
                doubles = [
                    bi
                    for _, bi in mol.neighbors(i)
                    if mol.bonds[bi].order == 2 and not mol.bonds[bi].aromatic
                ]
                if len(doubles) != 1 or not mol.bond_in_ring(doubles[0]):
                    ok = False
                    break
        if not ok:
            continue
        new_atoms.update(ring)
        new_bonds.update(ring_bonds)
    if not new_atoms:
        return mol
    atom_flags = [a.aromatic or i in new_atoms for i, a in enumerate(mol.atoms)]
    bond_flags = [b.aromatic or i in new_bonds for i, b in enumerate(mol.bonds)]
    atoms = tuple(
        replace(a, aromatic=f) if f != a.aromatic else a
        for a, f in zip(mol.atoms, atom_flags)
    )
    bonds = tuple(
        replace(b, aromatic=f) if f != b.aromatic else b
        for b, f in zip(mol.bonds, bond_flags)
    )
    return Molecule(atoms=atoms, bonds=bonds, source=mol.source)


def demote_nonring_aromatic_bonds(mol: Molecule) -> Molecule:
    """Turn aromatic-flagged bonds that lie on no ring into plain single bonds.

    Covers the biaryl link written without an explicit single bond symbol.
    """
    demote = [
        bi
        for bi, b in enumerate(mol.bonds)
        if b.aromatic and not mol.bond_in_ring(bi)
    ]
    if not demote:
        return mol
    bonds = list(mol.bonds)
    for bi in demote:
        bonds[bi] = Bond(bonds[bi].a1, bonds[bi].a2, order=1, aromatic=False)
    return Molecule(atoms=mol.atoms, bonds=tuple(bonds), source=mol.source)


def aromatic_atoms_off_ring(mol: Molecule) -> list[int]:
    """Atom indices flagged aromatic that do not lie on any ring."""
    return [
        idx
        for idx, a in enumerate(mol.atoms)
        if a.aromatic and not mol.atom_in_ring(idx)
    ]
