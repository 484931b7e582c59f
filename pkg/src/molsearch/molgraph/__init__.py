"""Native molecular graph layer: parsing, validation, canonical text form,
substructure matching, structure edits, and path fingerprints."""
from .canonical import CanonicalizationError, canonical_smiles
from .fingerprint import (
    FP_HASH_SEED,
    FP_NBITS,
    MAX_PATH_BONDS,
    Fingerprint,
    fingerprint,
    tanimoto,
)
from .match import count_matches, has_match, match_pattern
from .mol import Atom, Bond, Molecule
from .pattern import (
    Pattern,
    PatternAtom,
    PatternBond,
    PatternError,
    lookup_pattern,
    named_patterns,
    parse_pattern,
    register_pattern,
)
from .sanitize import ValidityReport, sanitize
from .smiles import KekulizationError, SmilesError, parse_fragment, parse_smiles
from .transforms import (
    Transform,
    TransformError,
    apply_transform,
    get_transform,
    list_transforms,
    register_transform,
)

__all__ = [
    "Atom",
    "Bond",
    "Molecule",
    "SmilesError",
    "KekulizationError",
    "parse_smiles",
    "parse_fragment",
    "sanitize",
    "ValidityReport",
    "canonical_smiles",
    "CanonicalizationError",
    "Pattern",
    "PatternAtom",
    "PatternBond",
    "PatternError",
    "parse_pattern",
    "register_pattern",
    "lookup_pattern",
    "named_patterns",
    "match_pattern",
    "has_match",
    "count_matches",
    "Transform",
    "TransformError",
    "apply_transform",
    "get_transform",
    "list_transforms",
    "register_transform",
    "Fingerprint",
    "fingerprint",
    "tanimoto",
    "FP_NBITS",
    "FP_HASH_SEED",
    "MAX_PATH_BONDS",
]
