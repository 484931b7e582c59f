"""Substructure embedding search: backtracking over candidate atom mappings.

Matching is non-induced on the molecule side — every pattern bond must map
onto a molecule bond satisfying its constraint, but molecule bonds between
matched atoms with no pattern counterpart are fine.
"""
from __future__ import annotations

from .mol import Bond, Molecule
from .pattern import Pattern, PatternAtom

__all__ = ["match_pattern", "has_match", "count_matches"]


def _atom_ok(mol: Molecule, idx: int, p: PatternAtom) -> bool:
    a = mol.atoms[idx]
    if p.element is not None and a.element != p.element:
        return False
    if p.aromatic is not None and a.aromatic != p.aromatic:
        return False
    if p.charge is not None and a.charge != p.charge:
        return False
    if p.in_ring is not None and mol.atom_in_ring(idx) != p.in_ring:
        return False
    if p.degree is not None and mol.degree(idx) != p.degree:
        return False
    if p.h_count is not None and a.h_count != p.h_count:
        return False
    return True


def _bond_ok(bond: Bond, kind: str) -> bool:
    if kind == "any":
        return True
    if kind == "aromatic":
        return bond.aromatic
    if kind == "default":
        return bond.aromatic or bond.order == 1
    if bond.aromatic:
        return False
    if kind == "single":
        return bond.order == 1
    if kind == "double":
        return bond.order == 2
    return bond.order == 3  # triple


def _search_order(pattern: Pattern) -> list[tuple[int, list[tuple[int, str]]]]:
    """Pattern atom visit order (DFS from 0) with, per atom, the constraints
    to already-placed atoms as (earlier pattern atom, bond kind) pairs."""
    adj: dict[int, list[tuple[int, str]]] = {i: [] for i in range(len(pattern.atoms))}
    for b in pattern.bonds:
        adj[b.a1].append((b.a2, b.kind))
        adj[b.a2].append((b.a1, b.kind))
    order: list[int] = []
    placed: set[int] = set()
    stack = [0]
    while stack:
        a = stack.pop()
        if a in placed:
            continue
        placed.add(a)
        order.append(a)
        for n, _ in reversed(adj[a]):
            if n not in placed:
                stack.append(n)
    plan = []
    pos = {a: i for i, a in enumerate(order)}
    for a in order:
        back = [(n, kind) for n, kind in adj[a] if pos[n] < pos[a]]
        plan.append((a, back))
    return plan


def match_pattern(
    mol: Molecule, pattern: Pattern, unique: bool = True
) -> tuple[tuple[int, ...], ...]:
    """All embeddings of pattern into mol.

    Each embedding is a tuple of molecule atom indices aligned with pattern
    atom indices.  With ``unique=True`` (default) embeddings covering the
    same atom set are collapsed to the first found; order is deterministic
    (candidates explored by ascending atom index).
    """
    plan = _search_order(pattern)
    n = len(pattern.atoms)
    assignment: dict[int, int] = {}
    used: set[int] = set()
    results: list[tuple[int, ...]] = []
    seen_sets: set[frozenset[int]] = set()

    def extend(step: int) -> None:
        if step == n:
            embedding = tuple(assignment[p] for p in range(n))
            if unique:
                key = frozenset(embedding)
                if key in seen_sets:
                    return
                seen_sets.add(key)
            results.append(embedding)
            return
        p_atom, back = plan[step]
        constraint = pattern.atoms[p_atom]
        if back:
            anchor, _ = back[0]
            candidates = [m for m, _ in mol.neighbors(assignment[anchor])]
            candidates.sort()
        else:
            candidates = list(range(len(mol.atoms)))
        for m_atom in candidates:
            if m_atom in used or not _atom_ok(mol, m_atom, constraint):
                continue
            ok = True
            for p_nbr, kind in back:
                bond = mol.bond_between(m_atom, assignment[p_nbr])
                if bond is None or not _bond_ok(bond, kind):
                    ok = False
                    break
            if not ok:
                continue
            assignment[p_atom] = m_atom
            used.add(m_atom)
            extend(step + 1)
            used.discard(m_atom)
            del assignment[p_atom]

    extend(0)
    return tuple(results)


def has_match(mol: Molecule, pattern: Pattern) -> bool:
    """True when at least one embedding exists (stops at the first)."""
    plan = _search_order(pattern)
    n = len(pattern.atoms)
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def extend(step: int) -> bool:
        if step == n:
            return True
        p_atom, back = plan[step]
        constraint = pattern.atoms[p_atom]
        if back:
            anchor, _ = back[0]
            candidates = sorted(m for m, _ in mol.neighbors(assignment[anchor]))
        else:
            candidates = list(range(len(mol.atoms)))
        for m_atom in candidates:
            if m_atom in used or not _atom_ok(mol, m_atom, constraint):
                continue
            if any(
                (b := mol.bond_between(m_atom, assignment[p_nbr])) is None
                or not _bond_ok(b, kind)
                for p_nbr, kind in back
            ):
                continue
            assignment[p_atom] = m_atom
            used.add(m_atom)
            if extend(step + 1):
                return True
            used.discard(m_atom)
            del assignment[p_atom]
        return False

    return extend(0)


def count_matches(mol: Molecule, pattern: Pattern) -> int:
    """Number of unique embeddings (distinct matched atom sets)."""
    return len(match_pattern(mol, pattern, unique=True))
