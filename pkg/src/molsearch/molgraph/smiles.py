"""Line-notation parser for molecular graphs.

Supported dialect: organic-subset atoms (B C N O P S F Cl Br I, aromatic
b c n o p s), bracket atoms with charge and explicit hydrogen counts,
branches, ring closures (including %nn), bond symbols ``- = # :`` and the
component separator ``.``.  Isotopes, stereo markers (``/ \\ @``), wildcard
atoms and atom maps are rejected with position-annotated errors.

Parsing pipeline: build the raw graph, demote off-ring aromatic bonds,
kekulize, aromatize alternating six-rings, then fill implicit hydrogens.
"""
from __future__ import annotations

from dataclasses import replace

from .aromaticity import (
    KekulizationError,
    aromatic_atoms_off_ring,
    demote_nonring_aromatic_bonds,
    detect_aromatic_rings,
    kekulize,
)
from .elements import AROMATIC_OK, ORGANIC_SUBSET, allowed_valences
from .mol import Atom, Bond, Molecule

__all__ = ["SmilesError", "KekulizationError", "parse_smiles", "parse_fragment"]

_TWO_LETTER = ("Cl", "Br")
_SINGLE_LETTER = ("B", "C", "N", "O", "P", "S", "F", "I")
_BRACKET_ELEMENTS = ORGANIC_SUBSET + ("H",)


class SmilesError(ValueError):
    """Malformed line notation; position is a 0-based offset into the text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.atoms: list[Atom] = []
        self.atom_pos: list[int] = []
        self.bonds: list[tuple[int, int, str | None, int]] = []  # a1, a2, symbol, pos
        self.prev: int | None = None
        self.stack: list[int | None] = []
        self.pending_bond: str | None = None
        self.pending_bond_pos = 0
        # ring number -> (atom index, bond symbol or None, source position)
        self.open_rings: dict[int, tuple[int, str | None, int]] = {}

    def error(self, message: str, position: int | None = None) -> SmilesError:
        return SmilesError(message, self.pos if position is None else position)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    # -- main loop ---------------------------------------------------------

    def run(self) -> None:
        if not self.text:
            raise self.error("empty input")
        while self.pos < len(self.text):
            ch = self.peek()
            if ch in "-=#:":
                if self.pending_bond is not None:
                    raise self.error("two bond symbols in a row")
                self.pending_bond = ch
                self.pending_bond_pos = self.pos
                self.take()
            elif ch in "/\\":
                raise self.error("stereo bond markers are unsupported")
            elif ch == "(":
                if self.prev is None:
                    raise self.error("branch start before any atom")
                if self.pending_bond is not None:
                    raise self.error("bond symbol before branch start")
                self.stack.append(self.prev)
                self.take()
            elif ch == ")":
                if not self.stack:
                    raise self.error("unmatched branch close")
                if self.pending_bond is not None:
                    raise self.error("dangling bond before branch close")
                self.prev = self.stack.pop()
                self.take()
            elif ch == ".":
                if self.pending_bond is not None:
                    raise self.error("bond symbol before component separator")
                if self.prev is None:
                    raise self.error("component separator before any atom")
                self.prev = None
                self.take()
            elif ch.isdigit() or ch == "%":
                self.ring_closure()
            elif ch == "[":
                self.bracket_atom()
            elif ch == "@":
                raise self.error("stereo markers are unsupported")
            elif ch == "*":
                raise self.error("wildcard atoms are unsupported")
            elif ch.isspace():
                raise self.error("whitespace inside notation")
            else:
                self.bare_atom()
        if self.pending_bond is not None:
            raise self.error("dangling bond at end of input", self.pending_bond_pos)
        if self.stack:
            raise self.error("unclosed branch at end of input")
        if self.open_rings:
            num, (_, _, where) = min(self.open_rings.items(), key=lambda kv: kv[1][2])
            raise self.error(f"unclosed ring closure {num}", where)

    # -- atoms -------------------------------------------------------------

    def add_atom(self, atom: Atom, position: int) -> None:
        idx = len(self.atoms)
        self.atoms.append(atom)
        self.atom_pos.append(position)
        if self.prev is not None:
            self.bonds.append((self.prev, idx, self.pending_bond, self.pending_bond_pos))
        self.pending_bond = None
        self.prev = idx

    def bare_atom(self) -> None:
        start = self.pos
        two = self.text[self.pos : self.pos + 2]
        if two in _TWO_LETTER:
            self.pos += 2
            self.add_atom(Atom(element=two), start)
            return
        ch = self.peek()
        if ch in _SINGLE_LETTER:
            self.take()
            self.add_atom(Atom(element=ch), start)
            return
        if ch.islower() and ch.upper() in _SINGLE_LETTER:
            if ch not in AROMATIC_OK:
                raise self.error(f"element {ch.upper()!r} cannot be aromatic")
            self.take()
            self.add_atom(Atom(element=ch.upper(), aromatic=True), start)
            return
        raise self.error(f"unexpected character {ch!r}")

    def bracket_atom(self) -> None:
        start = self.pos
        self.take()  # '['
        if self.peek().isdigit():
            raise self.error("isotope specifications are unsupported")
        element, aromatic = self.bracket_element()
        h_count = 0
        charge = 0
        seen_h = False
        seen_charge = False
        while True:
            ch = self.peek()
            if ch == "H" and not seen_h:
                seen_h = True
                self.take()
                h_count = 1
                if self.peek().isdigit():
                    h_count = int(self.take())
            elif ch in "+-" and not seen_charge:
                seen_charge = True
                sign = 1 if ch == "+" else -1
                self.take()
                if self.peek().isdigit():
                    charge = sign * int(self.take())
                else:
                    charge = sign
                    while self.peek() == ch:
                        self.take()
                        charge += sign
            elif ch == "@":
                raise self.error("stereo markers are unsupported")
            elif ch == ":":
                raise self.error("atom maps are unsupported")
            elif ch == "]":
                self.take()
                break
            elif ch == "":
                raise self.error("unterminated bracket atom", start)
            else:
                raise self.error(f"unexpected {ch!r} in bracket atom")
        if element == "H":
            raise self.error(
                "standalone hydrogen atoms are unsupported; use H counts", start
            )
        self.add_atom(
            Atom(
                element=element,
                charge=charge,
                aromatic=aromatic,
                h_count=h_count,
                explicit_h=True,
            ),
            start,
        )

    def bracket_element(self) -> tuple[str, bool]:
        ch = self.peek()
        if ch.isupper():
            two = self.text[self.pos : self.pos + 2]
            if two in _TWO_LETTER:
                self.pos += 2
                return two, False
            if ch in _SINGLE_LETTER or ch == "H":
                self.take()
                return ch, False
            raise self.error(f"unknown element {ch!r}")
        if ch.islower():
            if ch in AROMATIC_OK:
                self.take()
                return ch.upper(), True
            raise self.error(f"unknown aromatic element {ch!r}")
        raise self.error("missing element in bracket atom")

    # -- ring closures -----------------------------------------------------

    def ring_closure(self) -> None:
        where = self.pos
        if self.peek() == "%":
            self.take()
            digits = ""
            while self.peek().isdigit() and len(digits) < 2:
                digits += self.take()
            if len(digits) != 2:
                raise self.error("%nn ring closure needs two digits", where)
            num = int(digits)
        else:
            num = int(self.take())
        if self.prev is None:
            raise self.error("ring closure before any atom", where)
        symbol = self.pending_bond
        self.pending_bond = None
        if num in self.open_rings:
            partner, partner_sym, partner_pos = self.open_rings.pop(num)
            if partner == self.prev:
                raise self.error(f"ring closure {num} to the same atom", where)
            if symbol and partner_sym and symbol != partner_sym:
                raise self.error(
                    f"conflicting bond symbols on ring closure {num}", where
                )
            if any(
                (a == partner and b == self.prev) or (a == self.prev and b == partner)
                for a, b, _, _ in self.bonds
            ):
                raise self.error(f"duplicate bond via ring closure {num}", where)
            self.bonds.append((partner, self.prev, symbol or partner_sym, where))
        else:
            self.open_rings[num] = (self.prev, symbol, where)


def _resolve_bonds(
    atoms: list[Atom], drafts: list[tuple[int, int, str | None, int]]
) -> list[Bond]:
    bonds = []
    for a1, a2, symbol, pos in drafts:
        if symbol is None:
            aromatic = atoms[a1].aromatic and atoms[a2].aromatic
            bonds.append(Bond(a1, a2, order=1, aromatic=aromatic))
        elif symbol == "-":
            bonds.append(Bond(a1, a2, order=1))
        elif symbol == "=":
            bonds.append(Bond(a1, a2, order=2))
        elif symbol == "#":
            bonds.append(Bond(a1, a2, order=3))
        else:  # ':'
            if not (atoms[a1].aromatic and atoms[a2].aromatic):
                raise SmilesError(
                    "aromatic bond symbol between non-aromatic atoms", pos
                )
            bonds.append(Bond(a1, a2, order=1, aromatic=True))
    return bonds


def _assign_implicit_h(mol: Molecule) -> Molecule:
    new_atoms = []
    for idx, atom in enumerate(mol.atoms):
        if atom.explicit_h:
            new_atoms.append(atom)
            continue
        order_sum = mol.bond_order_sum(idx)
        h = 0
        for v in allowed_valences(atom.element, atom.charge):
            if v >= order_sum:
                h = v - order_sum
                break
        new_atoms.append(replace(atom, h_count=h))
    return mol.with_atoms(tuple(new_atoms))


def parse_smiles(text: str) -> Molecule:
    """Parse line notation into a sanitizable molecule.

    Raises SmilesError (or its KekulizationError relative wrapped with
    position info) on malformed input.  The result has kekulized bond
    orders, aromatic flags, and implicit hydrogen counts filled in.
    """
    parser = _Parser(text)
    parser.run()
    mol = Molecule(
        atoms=tuple(parser.atoms),
        bonds=tuple(_resolve_bonds(parser.atoms, parser.bonds)),
        source=text,
    )
    mol = demote_nonring_aromatic_bonds(mol)
    off_ring = aromatic_atoms_off_ring(mol)
    if off_ring:
        raise SmilesError(
            "aromatic atom outside any ring", parser.atom_pos[off_ring[0]]
        )
    mol = kekulize(mol, positions=tuple(parser.atom_pos))
    mol = detect_aromatic_rings(mol)
    return _assign_implicit_h(mol)


def parse_fragment(text: str) -> Molecule:
    """Parse a replacement fragment: raw graph only.

    No kekulization, ring aromatization, or hydrogen filling — fragments get
    their hydrogens recomputed after grafting into a host molecule.
    """
    parser = _Parser(text)
    parser.run()
    return Molecule(
        atoms=tuple(parser.atoms),
        bonds=tuple(_resolve_bonds(parser.atoms, parser.bonds)),
        source=text,
    )
