"""Pattern grammar and substructure matching.

The matcher is checked against a brute-force oracle that enumerates every
injective assignment of pattern atoms to molecule atoms and keeps the ones
where all constraints hold.  The oracle implements the documented grammar
semantics directly (field comparisons over the pattern IR) with no search
heuristics, so any agreement is evidence about the backtracking search, the
candidate ordering, and the uniqueness filtering.
"""
import itertools

import pytest

from molsearch.molgraph import parse_smiles
from molsearch.molgraph.match import count_matches, has_match, match_pattern
from molsearch.molgraph.pattern import (
    PatternError,
    lookup_pattern,
    named_patterns,
    parse_pattern,
    register_pattern,
)

from conftest import permute_molecule


# --- oracle ---------------------------------------------------------------


def _oracle_atom_ok(mol, idx, pa):
    a = mol.atoms[idx]
    if pa.element is not None and a.element != pa.element:
        return False
    if pa.aromatic is not None and a.aromatic != pa.aromatic:
        return False
    if pa.charge is not None and a.charge != pa.charge:
        return False
    if pa.in_ring is not None and mol.atom_in_ring(idx) != pa.in_ring:
        return False
    if pa.degree is not None and mol.degree(idx) != pa.degree:
        return False
    if pa.h_count is not None and a.h_count != pa.h_count:
        return False
    return True


def _oracle_bond_ok(mol, m1, m2, kind):
    bond = mol.bond_between(m1, m2)
    if bond is None:
        return False
    if kind == "any":
        return True
    if kind == "aromatic":
        return bond.aromatic
    if kind == "default":
        return bond.aromatic or bond.order == 1
    if bond.aromatic:
        return False
    return bond.order == {"single": 1, "double": 2, "triple": 3}[kind]


def brute_force_embeddings(mol, pattern):
    """Every injective pattern->molecule atom mapping satisfying all constraints."""
    k = len(pattern.atoms)
    found = []
    for mapping in itertools.permutations(range(len(mol.atoms)), k):
        if not all(_oracle_atom_ok(mol, mapping[i], pattern.atoms[i]) for i in range(k)):
            continue
        if all(_oracle_bond_ok(mol, mapping[b.a1], mapping[b.a2], b.kind) for b in pattern.bonds):
            found.append(mapping)
    return found


ORACLE_MOLECULES = [
    "C",
    "CCO",
    "CC(=O)O",
    "CC(C)O",
    "CC#N",
    "CCOC(C)=O",
    "C1CCOC1",
    "c1ccccc1",
    "c1ccncc1",
    "Cc1ccccc1O",
    "CS(C)(=O)=O",
    "[NH3+]CC([O-])=O",
    "C[N+](C)(C)C",
    "c1ccc2ccccc2c1",
    "C1=CC2=CC=CC=C2C=C1",
]

ORACLE_PATTERNS = [
    "C",
    "*",
    "[a]",
    "[A]",
    "CC",
    "C=O",
    "C~O",
    "c:c",
    "CCC",
    "C(=O)O",
    "[C;R]",
    "[C;!R]",
    "[O;H1]",
    "[C;H3;D1]",
    "[N;+1]",
    "[O;-1;D1]",
    "[C;D3](~[O])~[O]",
    "[c;D3]",
    "*~*~*",
    "C%10CC%10",
]


@pytest.mark.parametrize("smiles", ORACLE_MOLECULES)
def test_matcher_agrees_with_brute_force(smiles):
    mol = parse_smiles(smiles)
    for source in ORACLE_PATTERNS:
        pattern = parse_pattern(source)
        if len(pattern.atoms) > len(mol.atoms):
            continue
        expected = set(brute_force_embeddings(mol, pattern))
        got = set(match_pattern(mol, pattern, unique=False))
        assert got == expected, f"{source} on {smiles}"
        # Unique mode keeps exactly one embedding per matched atom set.
        unique = match_pattern(mol, pattern, unique=True)
        assert {frozenset(e) for e in unique} == {frozenset(e) for e in expected}
        assert len(unique) == len({frozenset(e) for e in expected})
        assert all(e in expected for e in unique)
        assert has_match(mol, pattern) == bool(expected)
        assert count_matches(mol, pattern) == len({frozenset(e) for e in expected})


@pytest.mark.parametrize("smiles", ["c1ccccc1", "CCOC(C)=O", "c1ccc2ccccc2c1"])
def test_match_sets_survive_atom_relabeling(smiles, rng):
    mol = parse_smiles(smiles)
    pattern = parse_pattern("*~*")
    base = {frozenset(e) for e in match_pattern(mol, pattern)}
    for _ in range(5):
        perm = list(range(len(mol.atoms)))
        rng.shuffle(perm)  # perm[old] = new
        shuffled = permute_molecule(mol, perm=perm)
        inverse = {new: old for old, new in enumerate(perm)}
        relabeled = {
            frozenset(inverse[i] for i in e) for e in match_pattern(shuffled, pattern)
        }
        # Mapping matched indices back through the permutation must reproduce
        # the original family of matched atom sets.
        assert relabeled == base


def test_match_results_are_deterministic():
    mol = parse_smiles("Cc1ccccc1O")
    pattern = parse_pattern("c:c")
    assert match_pattern(mol, pattern) == match_pattern(mol, pattern)
    assert match_pattern(mol, pattern, unique=False) == match_pattern(
        mol, pattern, unique=False
    )


# --- grammar semantics on specific groups ---------------------------------


def test_nitro_pattern_finds_both_oxygens_once():
    mol = parse_smiles("Cc1ccc(cc1)[N+](=O)[O-]")
    matches = match_pattern(mol, lookup_pattern("nitro"))
    assert len(matches) == 1
    n_idx, o_double, o_minus = matches[0]
    assert mol.atoms[n_idx].element == "N" and mol.atoms[n_idx].charge == 1
    assert mol.atoms[o_minus].charge == -1


def test_carboxylic_acid_distinguishes_ester():
    acid = parse_smiles("CC(=O)O")
    ester = parse_smiles("CC(=O)OC")
    pattern = lookup_pattern("carboxylic_acid")
    assert has_match(acid, pattern)
    assert not has_match(ester, pattern)


def test_default_bond_matches_single_or_aromatic_only():
    # The unwritten bond in "CO" must not match the C=O of a ketone.
    pattern = parse_pattern("CO")
    assert has_match(parse_smiles("CCO"), pattern)
    assert not has_match(parse_smiles("C=O"), pattern)
    # ...but it does match aromatic c-o as written without a bond symbol.
    assert has_match(parse_smiles("c1ccoc1"), parse_pattern("[c][o]"))


def test_explicit_single_rejects_aromatic_bond():
    benzene = parse_smiles("c1ccccc1")
    assert not has_match(benzene, parse_pattern("C-C"))
    assert has_match(benzene, parse_pattern("C:C"))
    assert has_match(benzene, parse_pattern("C~C"))


def test_ring_flag_separates_ring_and_chain_atoms():
    mol = parse_smiles("CC1CCC1")
    assert count_matches(mol, parse_pattern("[C;R]")) == 4
    assert count_matches(mol, parse_pattern("[C;!R]")) == 1


def test_h_and_degree_counts():
    mol = parse_smiles("CC(C)O")  # isopropanol
    assert count_matches(mol, parse_pattern("[C;H3]")) == 2
    assert count_matches(mol, parse_pattern("[C;H1;D3]")) == 1
    assert count_matches(mol, parse_pattern("[O;H1;D1]")) == 1
    assert count_matches(mol, parse_pattern("[H]".replace("H", "C;H0"))) == 0


def test_kekulized_fused_ring_input_is_aromatic_for_matching():
    # Fused system written with explicit single/double bonds must behave like
    # the lowercase form once ring perception has run.
    kekule = parse_smiles("C1=CC2=CC=CC=C2C=C1")
    lower = parse_smiles("c1ccc2ccccc2c1")
    ring = parse_pattern("c1ccccc1")
    assert count_matches(kekule, parse_pattern("[a;R]")) == 10
    assert count_matches(kekule, ring) == 2
    assert count_matches(lower, ring) == 2


def test_charged_atom_requires_exact_charge():
    glycine_zwitterion = parse_smiles("[NH3+]CC([O-])=O")
    assert has_match(glycine_zwitterion, parse_pattern("[N;+1]"))
    assert not has_match(glycine_zwitterion, parse_pattern("[N;-1]"))
    assert count_matches(glycine_zwitterion, parse_pattern("[O;-1]")) == 1


def test_wildcard_atom_counts_every_atom():
    mol = parse_smiles("CC(=O)O")
    assert count_matches(mol, parse_pattern("*")) == len(mol.atoms)


# --- parse errors ---------------------------------------------------------


@pytest.mark.parametrize(
    "source, position",
    [
        ("", 0),
        ("[C", 0),
        ("C1CC", 1),
        ("C=", 2),
        ("C.C", 1),
        ("[C;Q]", 3),
        ("[N;+x]", 4),
        ("C%1C", 1),
    ],
)
def test_malformed_patterns_report_position(source, position):
    with pytest.raises(PatternError) as exc:
        parse_pattern(source)
    assert exc.value.position == position


def test_lone_closure_digit_is_rejected():
    with pytest.raises(PatternError):
        parse_pattern("1CC")


# --- named registry -------------------------------------------------------


def test_builtin_names_resolve_case_insensitively():
    assert lookup_pattern("NITRO") is lookup_pattern("nitro")
    assert "carboxylic_acid" in named_patterns()


def test_lookup_falls_back_to_parsing_source():
    pattern = lookup_pattern("[S;H1]")
    assert pattern.source == "[S;H1]"


def test_register_returns_parsed_pattern_and_snapshot_is_a_copy():
    before = named_patterns()
    p = register_pattern("test_thiol_xyz", "[S;H1]")
    try:
        assert lookup_pattern("test_thiol_xyz") is p
        snapshot = named_patterns()
        del snapshot["test_thiol_xyz"]
        assert lookup_pattern("test_thiol_xyz") is p
        assert "test_thiol_xyz" not in before
    finally:
        named_patterns()  # registry itself is module state; clean up directly
        from molsearch.molgraph import pattern as pattern_module

        pattern_module._REGISTRY.pop("test_thiol_xyz", None)
