"""Regenerate the committed data fixtures.

Builds a 200-molecule solubility-style regression set (data/esol_subset.csv)
and a 20-molecule optimization start set (data/start_molecules.csv).  Labels
follow the classic linear solubility estimate — intercept 0.16, −0.63·LogP,
−0.0062·MW, +0.066·rotatable bonds, −0.74·aromatic proportion — plus seeded
Gaussian noise (σ = 0.3), so the signal is learnable from the package's own
descriptors while remaining honestly noisy.

Run from the repository root: python3 demos/make_fixtures.py
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from molsearch.descriptors import compute
from molsearch.molgraph import canonical_smiles, parse_smiles, sanitize

ROOT = Path(__file__).resolve().parent.parent
NOISE_SEED = 20260821
NOISE_SIGMA = 0.3

CHAINS = ["C", "CC", "CCC", "CCCC", "CCCCC", "CCCCCC", "CCCCCCC", "CCCCCCCC"]
CHAIN_CAPS = [
    ("{}O", "alcohol"),
    ("{}N", "amine"),
    ("{}Cl", "chloride"),
    ("{}Br", "bromide"),
    ("{}C(=O)O", "acid"),
    ("{}C(=O)N", "amide"),
    ("{}C(=O)C", "ketone"),
    ("{}C=O", "aldehyde"),
    ("{}C#N", "nitrile"),
    ("{}OC", "ether"),
    ("{}OC(C)=O", "acetate"),
]
BENZENE_SUBS = ["", "C", "CC", "O", "OC", "N", "Cl", "Br", "F", "C(=O)O",
                "C(=O)C", "C#N", "C=O", "CO", "CCl", "C(C)C", "OC(C)=O"]
DISUB = ["C", "O", "Cl", "OC", "N"]
RING_CORES = [
    "C1CCCCC1", "C1CCCC1", "C1CCOC1", "C1CCNC1", "C1CCOCC1", "C1CCNCC1",
    "c1ccncc1", "c1ccoc1", "c1ccsc1", "c1cc[nH]c1", "c1ccc2ccccc2c1",
    "c1ccc2[nH]ccc2c1", "C1CCC(=O)CC1", "C1CCC(O)CC1", "O=C1CCCCC1",
    "O=C1NCCC1", "O=C1NC(=O)CC1",
]
EXTRAS = [
    "O=C1NC(Cc2ccc(O)cc2)C(=O)NC1CO",
    "C=C1NC(CO)C(=O)NC1Cc1ccc(OC)cc1",
    "C=C1NC(C(C)C)C(=O)NC1Cc1ccc(OC)cc1",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "CC(=O)Oc1ccccc1C(=O)O",
    "CC(=O)Nc1ccc(O)cc1",
    "OCC(O)CO", "OCCO", "OCCOCCO", "C(C(CO)O)O",
    "CC(C)(C)O", "CC(C)(C)CO", "CC(O)C(C)O",
    "ClC(Cl)Cl", "ClCCl", "ClC(Cl)(Cl)Cl", "FC(F)(F)c1ccccc1",
    "CCOCC", "CCOC(C)=O", "CC(=O)CC(C)=O", "O=CCC=O",
    "NCCO", "NCCN", "NCCCN", "OC(=O)CCC(=O)O", "OC(=O)C=CC(=O)O",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "CCN(CC)CC", "CN(C)C=O", "CC#N", "CS(=O)C",
    "CCSCC", "CCS", "CSC", "C1CS1", "OCC#C", "C=CC=C", "CC=CC",
    "CC(C)=CC", "C1=CCCCC1", "C1=CCCC1", "OC1CCCC1",
]

START_SET = [
    "O=C1NC(Cc2ccc(O)cc2)C(=O)NC1CO",
    "CC(=O)Nc1ccc(O)cc1",
    "CC(=O)Oc1ccccc1C(=O)O",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "Oc1ccc(CC(N)C(=O)O)cc1",
    "Oc1ccccc1C(=O)O",
    "Oc1ccc(cc1)C(=O)N",
    "NC(=O)c1ccccc1O",
    "Oc1ccc(Cl)cc1",
    "Oc1ccc(cc1)C=O",
    "O=C(O)c1ccc(N)cc1",
    "O=C1NCCC1c1ccc(O)cc1",
    "OCC1OC(O)C(O)C(O)C1O",
    "Oc1ccc2ccccc2c1",
    "Oc1cccc(O)c1",
    "O=C(N)CCc1ccc(O)cc1",
    "OC(=O)C(N)Cc1c[nH]c2ccccc12",
    "Oc1ccc(CCN)cc1",
    "O=C1NC(=O)C(N1)Cc1ccc(O)cc1",
    "Oc1ccc(cc1)C(=O)OC",
]


def candidates():
    for chain in CHAINS:
        yield chain
        for cap, _ in CHAIN_CAPS:
            yield cap.format(chain)
    for sub in BENZENE_SUBS:
        yield f"c1ccccc1{sub}" if sub else "c1ccccc1"
    for a in DISUB:
        for b in DISUB:
            yield f"{a}c1ccc({b})cc1"
            yield f"{a}c1cccc({b})c1"
    yield from RING_CORES
    yield from EXTRAS


def aromatic_proportion(mol) -> float:
    flags = [atom.aromatic for atom in mol.atoms]
    return sum(flags) / len(flags) if flags else 0.0


def main() -> None:
    unique: dict[str, object] = {}
    for text in candidates():
        try:
            mol = parse_smiles(text)
            if not sanitize(mol).valid:
                continue
        except Exception:
            continue
        unique.setdefault(canonical_smiles(mol), mol)
    rows = list(unique.items())[:200]
    if len(rows) < 200:
        raise SystemExit(f"only {len(rows)} unique molecules; need 200")

    rng = np.random.default_rng(NOISE_SEED)
    data_dir = ROOT / "data"
    data_dir.mkdir(exist_ok=True)
    with (data_dir / "esol_subset.csv").open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["smiles", "label"])
        for smiles, mol in rows:
            label = (
                0.16
                - 0.63 * compute(mol, "logp")
                - 0.0062 * compute(mol, "molecular_weight")
                + 0.066 * compute(mol, "rotatable_bonds")
                - 0.74 * aromatic_proportion(mol)
                + rng.normal(0.0, NOISE_SIGMA)
            )
            writer.writerow([smiles, f"{label:.4f}"])

    with (data_dir / "start_molecules.csv").open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["smiles"])
        seen = set()
        for text in START_SET:
            smiles = canonical_smiles(parse_smiles(text))
            if smiles in seen:
                raise SystemExit(f"duplicate start molecule {text}")
            seen.add(smiles)
            writer.writerow([smiles])

    print(f"wrote {len(rows)} labeled rows and {len(START_SET)} start molecules")


if __name__ == "__main__":
    main()
