"""Element data: symbols, organic subset, and the valence table used by sanitize."""
from __future__ import annotations

# Elements the graph layer knows about.  Atomic weights live with the
# descriptor data tables; this module only cares about bonding rules.
ELEMENTS = ("B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "H")

# Subset of elements that may be written bare (no brackets) in line notation.
ORGANIC_SUBSET = ("B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I")

# Elements that may carry the aromatic (lowercase) flag.
AROMATIC_OK = ("b", "c", "n", "o", "p", "s")

HALOGENS = ("F", "Cl", "Br", "I")

# (element, charge) -> tuple of allowed total valences (bond order sum + H count).
# Multi-valent entries are tried smallest-first when filling implicit hydrogens.
VALENCES: dict[tuple[str, int], tuple[int, ...]] = {
    ("B", 0): (3,),
    ("B", -1): (4,),
    ("C", 0): (4,),
    ("C", 1): (3,),
    ("C", -1): (3,),
    ("N", 0): (3,),
    ("N", 1): (4,),
    ("N", -1): (2,),
    ("O", 0): (2,),
    ("O", 1): (3,),
    ("O", -1): (1,),
    ("P", 0): (3, 5),
    ("P", 1): (4,),
    ("S", 0): (2, 4, 6),
    ("S", 1): (3,),
    ("S", -1): (1,),
    ("F", 0): (1,),
    ("Cl", 0): (1,),
    ("Br", 0): (1,),
    ("I", 0): (1,),
    ("H", 0): (1,),
}


def allowed_valences(element: str, charge: int) -> tuple[int, ...]:
    """Allowed total valences for an element/charge pair; empty tuple if none known."""
    return VALENCES.get((element, charge), ())


def default_valence(element: str) -> int | None:
    """Lowest allowed valence of the neutral element, or None if unknown."""
    vals = VALENCES.get((element, 0))
    return vals[0] if vals else None
