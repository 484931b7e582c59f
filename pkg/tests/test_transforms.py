"""Structure-edit transforms: products, selection, and failure modes.

Expected products are spelled as ordinary input SMILES and both sides are
canonicalized, so each assertion says "applying edit E to substrate S gives
the same molecule as P written by hand" without depending on emission order.
"""
import pytest

from molsearch.molgraph import canonical_smiles, parse_smiles
from molsearch.molgraph.transforms import (
    Transform,
    TransformError,
    apply_transform,
    get_transform,
    list_transforms,
)


def same_molecule(product, expected_smiles):
    return canonical_smiles(product) == canonical_smiles(parse_smiles(expected_smiles))


# --- the eight registered edits on textbook substrates --------------------

EDIT_CASES = [
    ("o_methylation", "Oc1ccccc1", "COc1ccccc1"),  # phenol -> anisole
    ("n_methylation", "CNC(C)=O", "CN(C)C(C)=O"),  # N-methyl -> N,N-dimethyl amide
    ("aromatic_methylation", "c1ccccc1", "Cc1ccccc1"),  # benzene -> toluene
    ("add_isopropyl", "OCc1ccccc1", "CC(C)c1ccccc1"),  # benzyl alcohol -> cumene
    ("nitro_to_isopropyl", "[O-][N+](=O)c1ccccc1", "CC(C)c1ccccc1"),
    ("nitro_to_carboxyl", "[O-][N+](=O)c1ccccc1", "OC(=O)c1ccccc1"),
    ("side_chain_truncation", "OCCc1ccccc1", "Cc1ccccc1"),  # phenethyl alcohol -> toluene
    ("halogenation", "c1ccccc1", "Clc1ccccc1"),  # benzene -> chlorobenzene
]


@pytest.mark.parametrize("name, substrate, expected", EDIT_CASES)
def test_registered_edit_products(name, substrate, expected):
    product = apply_transform(parse_smiles(substrate), get_transform(name))
    assert same_molecule(product, expected)


@pytest.mark.parametrize("name, substrate, expected", EDIT_CASES)
def test_substrate_is_not_mutated(name, substrate, expected):
    mol = parse_smiles(substrate)
    before = canonical_smiles(mol)
    apply_transform(mol, get_transform(name))
    assert canonical_smiles(mol) == before


def test_match_index_walks_distinct_sites():
    # Toluene has five open aromatic positions: two ortho, two meta, one para.
    toluene = parse_smiles("Cc1ccccc1")
    methylate = get_transform("aromatic_methylation")
    products = [
        canonical_smiles(apply_transform(toluene, methylate, match_index=i))
        for i in range(5)
    ]
    expected = {
        canonical_smiles(parse_smiles(s)): n
        for s, n in [("Cc1ccccc1C", 2), ("Cc1cccc(C)c1", 2), ("Cc1ccc(C)cc1", 1)]
    }
    assert {p: products.count(p) for p in set(products)} == expected


def test_kekulized_substrate_behaves_like_lowercase():
    kekule = apply_transform(parse_smiles("C1=CC=CC=C1"), get_transform("halogenation"))
    lower = apply_transform(parse_smiles("c1ccccc1"), get_transform("halogenation"))
    assert canonical_smiles(kekule) == canonical_smiles(lower)


def test_grafted_atoms_get_hydrogens_from_valence():
    product = apply_transform(parse_smiles("Oc1ccccc1"), get_transform("o_methylation"))
    by_element = {}
    for atom in product.atoms:
        by_element.setdefault(atom.element, []).append(atom.h_count)
    assert sorted(by_element["O"]) == [0]  # the grafted ether oxygen
    assert 3 in by_element["C"]  # the grafted methyl


# --- failure modes --------------------------------------------------------


def test_no_match_is_an_error():
    with pytest.raises(TransformError, match="match 0 of 0"):
        apply_transform(parse_smiles("CCO"), get_transform("o_methylation"))


def test_match_index_out_of_range():
    with pytest.raises(TransformError, match="does not exist"):
        apply_transform(
            parse_smiles("c1ccccc1"), get_transform("aromatic_methylation"), match_index=6
        )


def test_boundary_bond_to_unmapped_pattern_atom():
    # The ether oxygen is matched but unmapped, and its second bond crosses
    # the match boundary.
    t = Transform(
        name="bad_boundary",
        pattern_source="[C;A]-[O;D2]",
        replacement_source="C",
        attach=((0, 0),),
    )
    with pytest.raises(TransformError, match="unmapped pattern atom"):
        apply_transform(parse_smiles("CCOCC"), t)


def test_duplicate_graft_bond_rejected():
    # Both matched cyclopropane carbons attach to the one fragment atom, and
    # the third ring carbon bonds to both of them.
    t = Transform(
        name="bad_graft",
        pattern_source="CC",
        replacement_source="C",
        attach=((0, 0), (1, 0)),
    )
    with pytest.raises(TransformError, match="duplicate bond"):
        apply_transform(parse_smiles("C1CC1"), t)


def test_invalid_product_rejected():
    # Grafting a quaternary fragment through its already-saturated carbon
    # would put five bonds on it.
    t = Transform(
        name="bad_valence",
        pattern_source="[C;H3;D1]",
        replacement_source="C(C)(C)(C)C",
        attach=((0, 0),),
    )
    with pytest.raises(TransformError, match="failed validation"):
        apply_transform(parse_smiles("CC"), t)


# --- registry -------------------------------------------------------------


def test_all_eight_edits_are_registered():
    names = {t.name for t in list_transforms()}
    assert names == {
        "o_methylation",
        "n_methylation",
        "aromatic_methylation",
        "add_isopropyl",
        "nitro_to_isopropyl",
        "nitro_to_carboxyl",
        "side_chain_truncation",
        "halogenation",
    }


def test_unknown_transform_name():
    with pytest.raises(TransformError, match="unknown transform"):
        get_transform("ring_inversion")


def test_register_rejects_bad_attachment_maps():
    from molsearch.molgraph.transforms import register_transform

    with pytest.raises(ValueError, match="injective"):
        register_transform(
            Transform(
                name="dup_target",
                pattern_source="CC",
                replacement_source="C",
                attach=((0, 0), (1, 0)),
            )
        )
    with pytest.raises(ValueError, match="out of range"):
        register_transform(
            Transform(
                name="bad_index",
                pattern_source="C",
                replacement_source="C",
                attach=((3, 0),),
            )
        )
