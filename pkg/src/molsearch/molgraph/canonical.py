"""Canonical line-notation emission.

Atoms are ranked by iterative neighborhood refinement; remaining ties are
broken by promoting each tied atom in turn and keeping the lexicographically
smallest emitted string, so the output is invariant under input atom order
and under the particular kekulization the parser happened to choose
(aromatic bonds compare as "aromatic", never by their assigned order).

Every emitted component is reparsed and checked against the original graph;
atoms whose hydrogen count the grammar would mis-infer get explicit bracket
notation until the round trip is exact.
"""
from __future__ import annotations

import sys

from .aromaticity import KekulizationError, detect_aromatic_rings
from .elements import ORGANIC_SUBSET
from .mol import Bond, Molecule

__all__ = ["canonical_smiles", "CanonicalizationError"]


class CanonicalizationError(RuntimeError):
    """Internal emission invariant failed; indicates a bug, not bad input."""


def canonical_smiles(mol: Molecule) -> str:
    """Canonical text form of a molecule; components are sorted and dot-joined."""
    if not mol.atoms:
        raise ValueError("cannot canonicalize an empty molecule")
    mol = detect_aromatic_rings(mol)
    parts = [_canon_component(mol, comp) for comp in _components(mol)]
    return ".".join(sorted(parts))


# -- components ------------------------------------------------------------


def _components(mol: Molecule) -> list[tuple[int, ...]]:
    seen = [False] * len(mol.atoms)
    comps = []
    for start in range(len(mol.atoms)):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = [start]
        while queue:
            a = queue.pop()
            for n, _ in mol.neighbors(a):
                if not seen[n]:
                    seen[n] = True
                    comp.append(n)
                    queue.append(n)
        comps.append(tuple(sorted(comp)))
    return comps


# -- ranking ---------------------------------------------------------------


def _densify(keys: dict[int, object]) -> dict[int, int]:
    ordered = sorted(set(keys.values()))
    index = {k: i for i, k in enumerate(ordered)}
    return {atom: index[k] for atom, k in keys.items()}


def _bond_rank_key(bond: Bond) -> str:
    return "a" if bond.aromatic else str(bond.order)


def _initial_ranks(mol: Molecule, comp: tuple[int, ...]) -> dict[int, int]:
    keys: dict[int, object] = {}
    for i in comp:
        a = mol.atoms[i]
        keys[i] = (
            a.element,
            a.aromatic,
            mol.degree(i),
            a.charge,
            a.h_count,
            mol.atom_in_ring(i),
        )
    return _densify(keys)


def _refine(mol: Molecule, comp: tuple[int, ...], ranks: dict[int, int]) -> dict[int, int]:
    while True:
        keys: dict[int, object] = {}
        for i in comp:
            nbrs = sorted(
                (_bond_rank_key(mol.bonds[bi]), ranks[n]) for n, bi in mol.neighbors(i)
            )
            keys[i] = (ranks[i], tuple(nbrs))
        new = _densify(keys)
        if new == ranks:
            return ranks
        ranks = new


def _tied_classes(ranks: dict[int, int]) -> dict[int, list[int]]:
    by_rank: dict[int, list[int]] = {}
    for atom, r in ranks.items():
        by_rank.setdefault(r, []).append(atom)
    return {r: sorted(atoms) for r, atoms in by_rank.items() if len(atoms) > 1}


def _emit_min(
    mol: Molecule,
    comp: tuple[int, ...],
    ranks: dict[int, int],
    force_bracket: set[int],
) -> tuple[str, list[int]]:
    """Smallest emission over all tie-break promotions. Returns (text, atom order)."""
    tied = _tied_classes(ranks)
    if not tied:
        return _emit(mol, comp, ranks, force_bracket)
    target = min(tied)
    best: tuple[str, list[int]] | None = None
    for atom in tied[target]:
        promoted = {i: (r, 1 if i == atom else 2) for i, r in ranks.items()}
        refined = _refine(mol, comp, _densify(promoted))
        candidate = _emit_min(mol, comp, refined, force_bracket)
        if best is None or candidate[0] < best[0]:
            best = candidate
    assert best is not None
    return best


# -- emission --------------------------------------------------------------


def _atom_token(mol: Molecule, idx: int, force_bracket: set[int]) -> str:
    a = mol.atoms[idx]
    sym = a.element.lower() if a.aromatic else a.element
    needs = (
        idx in force_bracket
        or a.charge != 0
        or a.element not in ORGANIC_SUBSET
        or (a.aromatic and a.element != "C" and a.h_count > 0)
    )
    if not needs:
        return sym
    if a.h_count == 0:
        h = ""
    elif a.h_count == 1:
        h = "H"
    else:
        h = f"H{a.h_count}"
    if a.charge == 0:
        chg = ""
    else:
        sign = "+" if a.charge > 0 else "-"
        mag = abs(a.charge)
        chg = sign if mag == 1 else f"{sign}{mag}"
    return f"[{sym}{h}{chg}]"


def _bond_token(mol: Molecule, bond: Bond) -> str:
    if bond.aromatic:
        return ""
    if bond.order == 2:
        return "="
    if bond.order == 3:
        return "#"
    if mol.atoms[bond.a1].aromatic and mol.atoms[bond.a2].aromatic:
        return "-"  # single link between two aromatic systems must stay single
    return ""


def _emit(
    mol: Molecule,
    comp: tuple[int, ...],
    ranks: dict[int, int],
    force_bracket: set[int],
) -> tuple[str, list[int]]:
    start = min(comp, key=lambda i: ranks[i])
    visited: set[int] = set()
    children: dict[int, list[tuple[int, int]]] = {i: [] for i in comp}
    back_bonds: dict[int, list[int]] = {i: [] for i in comp}
    back_seen: set[int] = set()

    limit = len(comp) * 4 + 200
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)

    def discover(a: int, parent_bond: int | None) -> None:
        visited.add(a)
        for _, n, bi in sorted(
            (ranks[n], n, bi) for n, bi in mol.neighbors(a)
        ):
            if bi == parent_bond:
                continue
            if n in visited:
                if bi not in back_seen:
                    back_seen.add(bi)
                    back_bonds[a].append(bi)
                    back_bonds[n].append(bi)
                continue
            children[a].append((n, bi))
            discover(n, bi)

    discover(start, None)

    out: list[str] = []
    order: list[int] = []
    open_digits: dict[int, int] = {}
    used_digits: set[int] = set()

    def alloc_digit() -> int:
        d = 1
        while d in used_digits:
            d += 1
        if d > 99:
            raise CanonicalizationError("ring closure digits exhausted")
        used_digits.add(d)
        return d

    def digit_str(d: int) -> str:
        return str(d) if d < 10 else f"%{d:02d}"

    def emit_atom(a: int) -> None:
        order.append(a)
        out.append(_atom_token(mol, a, force_bracket))
        for bi in back_bonds[a]:
            if bi in open_digits:
                d = open_digits.pop(bi)
                used_digits.discard(d)
                out.append(digit_str(d))
            else:
                d = alloc_digit()
                open_digits[bi] = d
                out.append(_bond_token(mol, mol.bonds[bi]) + digit_str(d))
        kids = children[a]
        for pos, (n, bi) in enumerate(kids):
            sym = _bond_token(mol, mol.bonds[bi])
            if pos < len(kids) - 1:
                out.append("(" + sym)
                emit_atom(n)
                out.append(")")
            else:
                out.append(sym)
                emit_atom(n)

    emit_atom(start)
    if len(order) != len(comp):
        raise CanonicalizationError("emission did not cover the component")
    return "".join(out), order


# -- round-trip fix-up -----------------------------------------------------


def _canon_component(mol: Molecule, comp: tuple[int, ...]) -> str:
    from .smiles import parse_smiles  # local import to avoid a cycle

    base_ranks = _refine(mol, comp, _initial_ranks(mol, comp))
    force: set[int] = set()
    for _ in range(4):
        text, order = _emit_min(mol, comp, base_ranks, force)
        try:
            reparsed = parse_smiles(text)
        except KekulizationError:
            widened = force | {i for i in comp if mol.atoms[i].aromatic}
            if widened == force:
                raise
            force = widened
            continue
        mismatched = {
            order[k]
            for k in range(len(order))
            if reparsed.atoms[k].h_count != mol.atoms[order[k]].h_count
        }
        if not mismatched:
            _verify_roundtrip(mol, order, reparsed, text)
            return text
        force |= mismatched
    raise CanonicalizationError(f"hydrogen inference did not stabilize for {text!r}")


def _verify_roundtrip(
    mol: Molecule, order: list[int], reparsed: Molecule, text: str
) -> None:
    for k, idx in enumerate(order):
        a, b = mol.atoms[idx], reparsed.atoms[k]
        if (a.element, a.charge, a.aromatic, a.h_count) != (
            b.element,
            b.charge,
            b.aromatic,
            b.h_count,
        ):
            raise CanonicalizationError(
                f"atom {idx} changed identity in round trip of {text!r}"
            )
    pos = {idx: k for k, idx in enumerate(order)}

    def edge_set(m: Molecule, remap: dict[int, int] | None) -> set[tuple[int, int, bool, int]]:
        out = set()
        for b in m.bonds:
            a1, a2 = b.a1, b.a2
            if remap is not None:
                if a1 not in remap:  # bond outside this component
                    continue
                a1, a2 = remap[a1], remap[a2]
            lo, hi = min(a1, a2), max(a1, a2)
            out.add((lo, hi, b.aromatic, 0 if b.aromatic else b.order))
        return out

    if edge_set(mol, pos) != edge_set(reparsed, None):
        raise CanonicalizationError(f"bond structure changed in round trip of {text!r}")
