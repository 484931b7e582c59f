"""Linear-path fingerprints and similarity.

Every simple path of 1..7 bonds contributes one bit: the path's token string
(atom symbols with aromatic lowercase, bond characters between them) is
direction-canonicalized by taking the smaller of the two readings, hashed
with 64-bit FNV-1a, and folded into a fixed-width bit set.  A single atom
with no bonds therefore has an empty fingerprint.
"""
from __future__ import annotations

from dataclasses import dataclass

from .mol import Molecule

__all__ = ["Fingerprint", "fingerprint", "tanimoto", "FP_NBITS", "FP_HASH_SEED", "MAX_PATH_BONDS"]

FP_NBITS = 2048
MAX_PATH_BONDS = 7

# FNV-1a 64-bit offset basis; doubles as the recorded hash seed so traces can
# state exactly which hashing produced their fingerprints.
FP_HASH_SEED = 14695981039346656037
_FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1


def _fnv1a(data: bytes) -> int:
    h = FP_HASH_SEED
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-width bit set stored as an int."""

    bits: int
    nbits: int = FP_NBITS

    def popcount(self) -> int:
        return self.bits.bit_count()

    def get(self, i: int) -> bool:
        return bool((self.bits >> i) & 1)


def _atom_symbol(mol: Molecule, idx: int) -> str:
    a = mol.atoms[idx]
    return a.element.lower() if a.aromatic else a.element


def _bond_symbol(mol: Molecule, bond_index: int) -> str:
    b = mol.bonds[bond_index]
    if b.aromatic:
        return ":"
    return {1: "-", 2: "=", 3: "#"}[b.order]


def _path_strings(mol: Molecule) -> set[str]:
    out: set[str] = set()
    n = len(mol.atoms)
    for start in range(n):
        # DFS over simple paths rooted at start.
        stack: list[tuple[int, list[int], list[str]]] = [
            (start, [start], [_atom_symbol(mol, start)])
        ]
        while stack:
            atom, path, tokens = stack.pop()
            if len(path) > 1:
                forward = "".join(tokens)
                backward = "".join(reversed(tokens))
                out.add(min(forward, backward))
            if len(path) - 1 >= MAX_PATH_BONDS:
                continue
            for nbr, bi in mol.neighbors(atom):
                if nbr in path:
                    continue
                stack.append(
                    (
                        nbr,
                        path + [nbr],
                        tokens + [_bond_symbol(mol, bi), _atom_symbol(mol, nbr)],
                    )
                )
    return out


def fingerprint(mol: Molecule, nbits: int = FP_NBITS) -> Fingerprint:
    """Path fingerprint of a molecule."""
    bits = 0
    for s in _path_strings(mol):
        bits |= 1 << (_fnv1a(s.encode("utf-8")) % nbits)
    return Fingerprint(bits=bits, nbits=nbits)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Jaccard similarity of two fingerprints; 1.0 when both are empty."""
    if a.nbits != b.nbits:
        raise ValueError(f"fingerprint widths differ: {a.nbits} vs {b.nbits}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union
