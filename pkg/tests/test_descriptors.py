"""Counting/topology descriptors, TPSA, the registry, and fixture parity.

Hand values below were computed on paper from the committed parameter tables
(atomic weights, polar-surface contributions); the fixture parity tests then
sweep all 50 committed molecules against the independent toolkit values and
against our own frozen output.
"""
import json

import numpy as np
import pytest

from molsearch.descriptors import (
    aromatic_ring_count,
    branching_degree,
    compute,
    default_registry,
    descriptor_matrix,
    descriptor_names,
    descriptor_vector,
    formal_charge_total,
    halogen_count,
    hba_count,
    hbd_count,
    heavy_atom_count,
    hetero_atom_count,
    molecular_weight,
    ring_count,
    rotatable_bonds,
    symmetry_class_count,
    tpsa,
)
from molsearch.descriptors.registry import DescriptorRegistry
from molsearch.molgraph import parse_smiles

from conftest import load_jsonl


def mol(s):
    return parse_smiles(s)


# --- molecular weight: sums over the 3-decimal weight table ---------------


@pytest.mark.parametrize(
    "smiles, expected",
    [
        ("C", 16.043),  # 12.011 + 4*1.008
        ("CCO", 46.069),  # 2*12.011 + 15.999 + 6*1.008
        ("c1ccccc1", 78.114),  # 6*(12.011 + 1.008)
        ("[NH3+]CC([O-])=O", 75.067),  # C2H5NO2, charges don't change mass here
    ],
)
def test_molecular_weight_hand_sums(smiles, expected):
    assert molecular_weight(mol(smiles)) == pytest.approx(expected, abs=1e-9)


def test_molecular_weight_counts_implicit_hydrogens():
    # Same heavy atoms, different H counts.
    assert molecular_weight(mol("C=C")) < molecular_weight(mol("CC"))
    assert molecular_weight(mol("CC")) - molecular_weight(mol("C=C")) == pytest.approx(
        2 * 1.008
    )


# --- counts ---------------------------------------------------------------


def test_atom_counts():
    m = mol("CC(=O)Nc1ccc(O)cc1")  # paracetamol
    assert heavy_atom_count(m) == 11
    assert hetero_atom_count(m) == 3
    assert halogen_count(m) == 0
    assert formal_charge_total(m) == 0
    assert halogen_count(mol("ClC(Cl)(Cl)Br")) == 4


def test_charge_totals():
    assert formal_charge_total(mol("[NH3+]CC([O-])=O")) == 0
    assert formal_charge_total(mol("CC([O-])=O")) == -1
    assert formal_charge_total(mol("C[N+](C)(C)C")) == 1


@pytest.mark.parametrize(
    "smiles, donors, acceptors",
    [
        ("CCO", 1, 1),
        ("CC(=O)O", 1, 2),
        ("CC(N)=O", 1, 2),
        ("c1ccncc1", 0, 1),
        ("[NH3+]CC([O-])=O", 1, 2),  # charged N donates but does not accept
        ("C[N+](C)(C)C", 0, 0),
        ("O=C1NC(Cc2ccc(O)cc2)C(=O)NC1CO", 4, 6),
    ],
)
def test_donor_acceptor_definitions(smiles, donors, acceptors):
    m = mol(smiles)
    assert hbd_count(m) == donors
    assert hba_count(m) == acceptors


# --- rings ----------------------------------------------------------------


def test_ring_count_is_cycle_rank():
    assert ring_count(mol("CCO")) == 0
    assert ring_count(mol("c1ccccc1")) == 1
    assert ring_count(mol("c1ccc2ccccc2c1")) == 2
    assert ring_count(mol("c1ccc(-c2ccccc2)cc1")) == 2
    assert ring_count(mol("C1CCC2(CC1)CCCC2")) == 2  # spiro


def test_ring_count_matches_euler_formula_on_fixtures(fixture_mols):
    for m in fixture_mols:
        seen, components = set(), 0
        for start in range(len(m.atoms)):
            if start in seen:
                continue
            components += 1
            queue = [start]
            while queue:
                a = queue.pop()
                if a in seen:
                    continue
                seen.add(a)
                queue.extend(n for n, _ in m.neighbors(a))
        assert ring_count(m) == len(m.bonds) - len(m.atoms) + components


def test_aromatic_ring_count():
    assert aromatic_ring_count(mol("C1CCCCC1")) == 0
    assert aromatic_ring_count(mol("c1ccccc1")) == 1
    assert aromatic_ring_count(mol("c1ccc2ccccc2c1")) == 2
    assert aromatic_ring_count(mol("C1=CC2=CC=CC=C2C=C1")) == 2  # kekulized input
    assert aromatic_ring_count(mol("c1ccoc1")) == 1
    assert aromatic_ring_count(mol("C1=CCC=C1")) == 0  # cyclopentadiene stays plain


# --- rotatable bonds ------------------------------------------------------


@pytest.mark.parametrize(
    "smiles, expected",
    [
        ("CCCC", 1),
        ("CCC", 0),  # both candidate ends must be internal
        ("CCc1ccccc1", 1),
        ("CC(C)(C)c1ccccc1", 0),  # tert-butyl rotor is symmetric
        ("FC(F)(F)c1ccccc1", 0),  # CF3 rotor is symmetric
        ("CNC(C)=O", 0),  # amide C-N does not count
        ("CCOC(C)=O", 1),  # ester: O-CH2 counts, O-C(=O) does not
        ("C#CCC", 0),  # next to a triple bond
        ("C1CCCCC1C1CCCCC1", 1),  # ring-ring link
        ("OCCO", 1),
    ],
)
def test_rotatable_bond_rules(smiles, expected):
    assert rotatable_bonds(mol(smiles)) == expected


# --- topology -------------------------------------------------------------


def test_branching_degree():
    assert branching_degree(mol("CCCC")) == 0
    assert branching_degree(mol("CC(C)C")) == 1
    assert branching_degree(mol("CC(C)(C)C")) == 1
    assert branching_degree(mol("Cc1ccccc1")) == 1  # the substituted ring atom


def test_symmetry_class_count():
    assert symmetry_class_count(mol("c1ccccc1")) == 1
    assert symmetry_class_count(mol("CCO")) == 3
    assert symmetry_class_count(mol("CC(C)(C)C")) == 2
    assert symmetry_class_count(mol("Cc1ccccc1")) == 5  # CH3, ipso, ortho, meta, para


# --- polar surface area ---------------------------------------------------


@pytest.mark.parametrize(
    "smiles, expected",
    [
        ("c1ccccc1", 0.0),
        ("CCO", 20.23),
        ("COC", 9.23),
        ("CC(=O)O", 37.30),  # 17.07 (=O) + 20.23 (OH)
        ("c1ccncc1", 12.89),
        ("Nc1ccccc1", 26.02),
        ("CC(N)=O", 43.09),  # 17.07 + 26.02
    ],
)
def test_tpsa_hand_sums(smiles, expected):
    assert tpsa(mol(smiles)) == pytest.approx(expected, abs=1e-9)


def test_tpsa_carbon_and_halogens_contribute_nothing():
    assert tpsa(mol("CCCCCC")) == 0.0
    assert tpsa(mol("ClC(Cl)(Cl)Cl")) == 0.0


# --- registry and vectors -------------------------------------------------


def test_default_registry_names():
    names = descriptor_names()
    assert len(names) == 15
    assert names[0] == "molecular_weight"
    assert {"logp", "tpsa", "qed"} <= set(names)


def test_registry_dispatch_and_errors():
    assert compute(mol("CCO"), "hbd_count") == 1.0
    with pytest.raises(KeyError, match="unknown descriptor"):
        compute(mol("CCO"), "boiling_point")
    reg = DescriptorRegistry()
    reg.register("constant", lambda m: 7)
    assert reg.compute(mol("C"), "constant") == 7.0
    with pytest.raises(ValueError, match="already registered"):
        reg.register("constant", lambda m: 8)


def test_descriptor_vector_sorts_names_and_validates():
    m = mol("CCO")
    v = descriptor_vector(m, ["tpsa", "hbd_count", "molecular_weight"])
    # sorted order: hbd_count, molecular_weight, tpsa
    assert v == pytest.approx([1.0, 46.069, 20.23])
    assert v.dtype == float
    with pytest.raises(KeyError):
        descriptor_vector(m, ["nope"])
    with pytest.raises(ValueError, match="duplicate"):
        descriptor_vector(m, ["tpsa", "tpsa"])


def test_descriptor_matrix_shape():
    mols = [mol("C"), mol("CCO"), mol("c1ccccc1")]
    X = descriptor_matrix(mols, ["molecular_weight", "ring_count"])
    assert X.shape == (3, 2)
    assert X[2, 1] == 1.0
    empty = descriptor_matrix([], ["molecular_weight", "ring_count"])
    assert empty.shape == (0, 2)
    assert isinstance(X, np.ndarray)


# --- parity with the committed fixtures -----------------------------------


@pytest.fixture(scope="module")
def fixture_mols():
    return [parse_smiles(r["smiles"]) for r in load_jsonl("self_fixtures.jsonl")]


def test_toolkit_fixture_parity():
    reg = default_registry()
    bands = {"molecular_weight": 2e-5, "logp": 1e-3, "tpsa": 1e-2, "qed": 1e-5}
    for rec in load_jsonl("toolkit_fixtures.jsonl"):
        m = parse_smiles(rec["smiles"])
        for name, want in rec["descriptors"].items():
            got = reg.compute(m, name)
            if name in bands:
                assert got == pytest.approx(want, abs=bands[name]), (
                    rec["smiles"],
                    name,
                )
            else:
                assert got == want, (rec["smiles"], name)


def test_self_fixture_parity():
    reg = default_registry()
    for rec in load_jsonl("self_fixtures.jsonl"):
        m = parse_smiles(rec["smiles"])
        for name, want in rec["descriptors"].items():
            got = reg.compute(m, name)
            if isinstance(want, float):
                assert got == pytest.approx(want, abs=1e-6), (rec["smiles"], name)
            else:
                assert got == want, (rec["smiles"], name)
