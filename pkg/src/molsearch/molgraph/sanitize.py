"""Valence and aromaticity validation producing a structured report."""
from __future__ import annotations

from dataclasses import dataclass

from .aromaticity import aromatic_atoms_off_ring
from .elements import allowed_valences
from .mol import Molecule


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of sanitization: valid flag plus per-atom issues."""

    valid: bool
    issues: tuple[tuple[int, str], ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def sanitize(mol: Molecule) -> ValidityReport:
    """Check every atom against the valence table and aromatic atoms against rings.

    Total valence is the kekulized bond order sum plus the hydrogen count.
    The molecule is valid iff the issue list is empty.
    """
    issues: list[tuple[int, str]] = []
    for idx, atom in enumerate(mol.atoms):
        allowed = allowed_valences(atom.element, atom.charge)
        if not allowed:
            issues.append(
                (idx, f"no allowed valence for {atom.element} with charge {atom.charge:+d}")
            )
            continue
        total = mol.bond_order_sum(idx) + atom.h_count
        if total not in allowed:
            issues.append(
                (
                    idx,
                    f"valence {total} not in {allowed} for {atom.element}"
                    + (f"{atom.charge:+d}" if atom.charge else ""),
                )
            )
        if atom.h_count < 0:
            issues.append((idx, "negative hydrogen count"))
    for idx in aromatic_atoms_off_ring(mol):
        issues.append((idx, "aromatic atom lies on no ring"))
    return ValidityReport(valid=not issues, issues=tuple(issues))
