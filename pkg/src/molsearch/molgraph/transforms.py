"""Structure edits: pattern-guided excise-and-graft rewrites.

A transform is a pattern, a replacement fragment, and an attachment map from
pattern atom indices to fragment atom indices.  Applying it excises the
matched atoms, grafts the fragment, and redirects every bond that crossed
the match boundary through the attachment map.  Hydrogen counts of grafted
atoms are recomputed from the valence table, the result is re-checked, and
a failed check rejects the edit — molecules are never mutated in place.

Replacement fragments should write explicit bond orders between any two
aromatic fragment atoms; unwritten orders inside a grafted aromatic system
are not re-derived.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .aromaticity import detect_aromatic_rings
from .elements import allowed_valences
from .match import match_pattern
from .mol import Bond, Molecule
from .pattern import Pattern, parse_pattern
from .sanitize import sanitize
from .smiles import parse_fragment

__all__ = [
    "Transform",
    "TransformError",
    "apply_transform",
    "get_transform",
    "list_transforms",
    "register_transform",
]


class TransformError(ValueError):
    """The edit cannot be applied (no match, unmapped boundary, bad product)."""


@dataclass(frozen=True)
class Transform:
    """A named rewrite rule."""

    name: str
    pattern_source: str
    replacement_source: str
    attach: tuple[tuple[int, int], ...]  # (pattern atom, fragment atom) pairs
    description: str = ""

    @property
    def pattern(self) -> Pattern:
        return parse_pattern(self.pattern_source)

    @property
    def fragment(self) -> Molecule:
        return parse_fragment(self.replacement_source)

    def attach_map(self) -> dict[int, int]:
        return dict(self.attach)


def _validate(t: Transform) -> None:
    pattern = t.pattern
    fragment = t.fragment
    mapping = t.attach_map()
    if len(mapping) != len(t.attach):
        raise ValueError(f"transform {t.name}: duplicate pattern atoms in map")
    if len(set(mapping.values())) != len(mapping):
        raise ValueError(f"transform {t.name}: attachment map must be injective")
    for p, f in mapping.items():
        if not 0 <= p < len(pattern.atoms):
            raise ValueError(f"transform {t.name}: pattern atom {p} out of range")
        if not 0 <= f < len(fragment.atoms):
            raise ValueError(f"transform {t.name}: fragment atom {f} out of range")


def apply_transform(mol: Molecule, transform: Transform, match_index: int = 0) -> Molecule:
    """Apply a transform at the match_index-th unique match; returns a new molecule.

    Raises TransformError when the match does not exist, a boundary bond hits
    an unmapped pattern atom, the graft would duplicate a bond, or the
    product fails validation.
    """
    pattern = transform.pattern
    fragment = transform.fragment
    attach = transform.attach_map()

    matches = match_pattern(mol, pattern, unique=True)
    if not 0 <= match_index < len(matches):
        raise TransformError(
            f"{transform.name}: match {match_index} of {len(matches)} does not exist"
        )
    embedding = matches[match_index]
    matched = set(embedding)

    # New indexing: survivors keep relative order, fragment atoms appended.
    survivor_index: dict[int, int] = {}
    new_atoms = []
    for idx, atom in enumerate(mol.atoms):
        if idx in matched:
            continue
        survivor_index[idx] = len(new_atoms)
        new_atoms.append(atom)
    fragment_index = {}
    for f_idx, atom in enumerate(fragment.atoms):
        fragment_index[f_idx] = len(new_atoms)
        new_atoms.append(atom)

    pattern_pos = {m: p for p, m in enumerate(embedding)}
    new_bonds: list[Bond] = []
    seen_pairs: set[tuple[int, int]] = set()

    def add_bond(a1: int, a2: int, order: int, aromatic: bool) -> None:
        key = (min(a1, a2), max(a1, a2))
        if key in seen_pairs:
            raise TransformError(f"{transform.name}: graft would duplicate bond {key}")
        seen_pairs.add(key)
        new_bonds.append(Bond(key[0], key[1], order=order, aromatic=aromatic))

    for bond in mol.bonds:
        in1, in2 = bond.a1 in matched, bond.a2 in matched
        if in1 and in2:
            continue  # internal to the excised region
        if not in1 and not in2:
            add_bond(
                survivor_index[bond.a1], survivor_index[bond.a2], bond.order, bond.aromatic
            )
            continue
        matched_end = bond.a1 if in1 else bond.a2
        outside_end = bond.a2 if in1 else bond.a1
        p_atom = pattern_pos[matched_end]
        if p_atom not in attach:
            raise TransformError(
                f"{transform.name}: bond from outside reaches unmapped pattern atom {p_atom}"
            )
        add_bond(
            survivor_index[outside_end],
            fragment_index[attach[p_atom]],
            bond.order,
            bond.aromatic,
        )

    for bond in fragment.bonds:
        add_bond(fragment_index[bond.a1], fragment_index[bond.a2], bond.order, bond.aromatic)

    product = Molecule(atoms=tuple(new_atoms), bonds=tuple(new_bonds))

    # Grafted atoms without written hydrogen counts get them from the valence table.
    filled = list(product.atoms)
    for f_idx, new_idx in fragment_index.items():
        atom = filled[new_idx]
        if atom.explicit_h:
            continue
        order_sum = product.bond_order_sum(new_idx)
        h = 0
        for v in allowed_valences(atom.element, atom.charge):
            if v >= order_sum:
                h = v - order_sum
                break
        filled[new_idx] = replace(atom, h_count=h)
    product = Molecule(atoms=tuple(filled), bonds=product.bonds)
    product = detect_aromatic_rings(product)

    report = sanitize(product)
    if not report.valid:
        raise TransformError(
            f"{transform.name}: product failed validation: {report.issues}"
        )
    return product


# -- registry --------------------------------------------------------------

_TRANSFORMS: dict[str, Transform] = {}


def register_transform(t: Transform) -> Transform:
    _validate(t)
    _TRANSFORMS[t.name] = t
    return t


def get_transform(name: str) -> Transform:
    try:
        return _TRANSFORMS[name]
    except KeyError:
        raise TransformError(f"unknown transform {name!r}") from None


def list_transforms() -> tuple[Transform, ...]:
    return tuple(_TRANSFORMS.values())


register_transform(
    Transform(
        name="o_methylation",
        pattern_source="[c]-[O;H1]",
        replacement_source="cOC",
        attach=((0, 0), (1, 1)),
        description="Methylate an aromatic hydroxyl: c-OH becomes c-O-CH3.",
    )
)
register_transform(
    Transform(
        name="n_methylation",
        pattern_source="[N;A;H1]",
        replacement_source="NC",
        attach=((0, 0),),
        description="Methylate an N-H nitrogen: N-H becomes N-CH3.",
    )
)
register_transform(
    Transform(
        name="aromatic_methylation",
        pattern_source="[c;H1]",
        replacement_source="cC",
        attach=((0, 0),),
        description="Put a methyl on an unsubstituted aromatic carbon.",
    )
)
register_transform(
    Transform(
        name="add_isopropyl",
        pattern_source="[C;A;H2]-[O;H1;D1]",
        replacement_source="C(C)C",
        attach=((0, 0),),
        description="Swap a hydroxymethyl side chain for an isopropyl group.",
    )
)
register_transform(
    Transform(
        name="nitro_to_isopropyl",
        pattern_source="[N;+1](=[O])[O;-1]",
        replacement_source="C(C)C",
        attach=((0, 0),),
        description="Replace a nitro group with isopropyl.",
    )
)
register_transform(
    Transform(
        name="nitro_to_carboxyl",
        pattern_source="[N;+1](=[O])[O;-1]",
        replacement_source="C(=O)O",
        attach=((0, 0),),
        description="Replace a nitro group with a carboxylic acid.",
    )
)
register_transform(
    Transform(
        name="side_chain_truncation",
        pattern_source="[C;A;H2;D2]-[C;A;H2;D2]-[O;H1;D1]",
        replacement_source="C",
        attach=((0, 0),),
        description="Cut a hydroxyethyl tail down to a methyl.",
    )
)
register_transform(
    Transform(
        name="halogenation",
        pattern_source="[c;H1]",
        replacement_source="cCl",
        attach=((0, 0),),
        description="Put a chlorine on an unsubstituted aromatic carbon.",
    )
)
