"""Shared fixtures and helpers for the test suite."""
from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from molsearch.molgraph.mol import Atom, Bond, Molecule

DATA_DIR = Path(__file__).parent / "data"

ATOMIC_NUMBER = {
    "H": 1, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9, "P": 15, "S": 16,
    "Cl": 17, "Br": 35, "I": 53,
}


def load_jsonl(name: str) -> list[dict]:
    out = []
    for line in (DATA_DIR / name).read_text().splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


def fixture_smiles() -> list[str]:
    lines = (DATA_DIR / "fixture_molecules.txt").read_text().splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]


def permute_molecule(
    mol: Molecule, rng: random.Random | None = None, perm: list[int] | None = None
) -> Molecule:
    """Relabel atoms with a permutation (random, or caller-supplied perm[old] = new)."""
    n = len(mol.atoms)
    if perm is None:
        perm = list(range(n))
        rng.shuffle(perm)  # perm[old] = new
    atoms = [None] * n
    for old, new in enumerate(perm):
        atoms[new] = mol.atoms[old]
    bonds = [
        Bond(
            a1=min(perm[b.a1], perm[b.a2]),
            a2=max(perm[b.a1], perm[b.a2]),
            order=b.order,
            aromatic=b.aromatic,
        )
        for b in mol.bonds
    ]
    if rng is not None:
        rng.shuffle(bonds)
    return Molecule(atoms=tuple(atoms), bonds=tuple(bonds))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
