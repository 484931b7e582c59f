"""Substructure pattern mini-language.

This is a deliberately small, self-describing query grammar — close to
familiar substructure notation but NOT identical, so the rules are spelled
out here:

* Bare uppercase element symbols (``C``, ``Cl``…) constrain the element only
  and match both aromatic and aliphatic atoms.  Bare lowercase symbols
  (``c``, ``n``…) additionally require aromaticity.
* ``*`` matches any element.
* Bracket atoms hold semicolon-separated constraints, all of which must hold:
  an element symbol or ``*``, ``a`` (aromatic) / ``A`` (aliphatic),
  ``+n``/``-n`` formal charge, ``R`` / ``!R`` ring membership, ``Dn`` heavy
  degree, ``Hn`` hydrogen count (``H`` alone means exactly one).
  Example: ``[N;+1](=[O])[O;-1]`` — a nitro group.
* Bonds: ``-`` single, ``=`` double, ``#`` triple, ``:`` aromatic, ``~`` any.
  An unwritten bond matches single-or-aromatic.
* Branches and ring closures (digits, ``%nn``) work as in molecule notation.

Patterns must be connected graphs.
"""
from __future__ import annotations

from dataclasses import dataclass

from .elements import AROMATIC_OK, ORGANIC_SUBSET

__all__ = [
    "PatternError",
    "PatternAtom",
    "PatternBond",
    "Pattern",
    "parse_pattern",
    "register_pattern",
    "lookup_pattern",
    "named_patterns",
]

_TWO_LETTER = ("Cl", "Br")
_SINGLE_LETTER = ("B", "C", "N", "O", "P", "S", "F", "I")


class PatternError(ValueError):
    """Malformed pattern text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


@dataclass(frozen=True)
class PatternAtom:
    """Conjunction of atom constraints; None means unconstrained."""

    element: str | None = None
    aromatic: bool | None = None
    charge: int | None = None
    in_ring: bool | None = None
    degree: int | None = None
    h_count: int | None = None


@dataclass(frozen=True)
class PatternBond:
    """Bond constraint between pattern atom indices a1 and a2."""

    a1: int
    a2: int
    kind: str  # single | double | triple | aromatic | any | default


@dataclass(frozen=True)
class Pattern:
    """Connected query graph with its source text."""

    atoms: tuple[PatternAtom, ...]
    bonds: tuple[PatternBond, ...]
    source: str


class _PatternParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.atoms: list[PatternAtom] = []
        self.bonds: list[PatternBond] = []
        self.prev: int | None = None
        self.stack: list[int | None] = []
        self.pending: str | None = None
        self.open_rings: dict[int, tuple[int, str | None, int]] = {}

    def error(self, message: str, position: int | None = None) -> PatternError:
        return PatternError(message, self.pos if position is None else position)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def run(self) -> Pattern:
        if not self.text:
            raise self.error("empty pattern")
        kinds = {"-": "single", "=": "double", "#": "triple", ":": "aromatic", "~": "any"}
        while self.pos < len(self.text):
            ch = self.peek()
            if ch in kinds:
                if self.pending is not None:
                    raise self.error("two bond symbols in a row")
                self.pending = kinds[ch]
                self.take()
            elif ch == "(":
                if self.prev is None:
                    raise self.error("branch start before any atom")
                self.stack.append(self.prev)
                self.take()
            elif ch == ")":
                if not self.stack:
                    raise self.error("unmatched branch close")
                if self.pending is not None:
                    raise self.error("dangling bond before branch close")
                self.prev = self.stack.pop()
                self.take()
            elif ch.isdigit() or ch == "%":
                self.ring_closure()
            elif ch == "[":
                self.bracket_atom()
            else:
                self.bare_atom()
        if self.pending is not None:
            raise self.error("dangling bond at end of pattern")
        if self.stack:
            raise self.error("unclosed branch at end of pattern")
        if self.open_rings:
            num, (_, _, where) = min(self.open_rings.items(), key=lambda kv: kv[1][2])
            raise self.error(f"unclosed ring closure {num}", where)
        self.check_connected()
        return Pattern(tuple(self.atoms), tuple(self.bonds), self.text)

    def add_atom(self, atom: PatternAtom) -> None:
        idx = len(self.atoms)
        self.atoms.append(atom)
        if self.prev is not None:
            kind = self.pending if self.pending is not None else "default"
            self.bonds.append(PatternBond(self.prev, idx, kind))
        self.pending = None
        self.prev = idx

    def bare_atom(self) -> None:
        two = self.text[self.pos : self.pos + 2]
        if two in _TWO_LETTER:
            self.pos += 2
            self.add_atom(PatternAtom(element=two))
            return
        ch = self.peek()
        if ch == "*":
            self.take()
            self.add_atom(PatternAtom())
            return
        if ch in _SINGLE_LETTER:
            self.take()
            self.add_atom(PatternAtom(element=ch))
            return
        if ch in AROMATIC_OK:
            self.take()
            self.add_atom(PatternAtom(element=ch.upper(), aromatic=True))
            return
        raise self.error(f"unexpected character {ch!r}")

    def bracket_atom(self) -> None:
        start = self.pos
        self.take()  # '['
        fields: dict[str, object] = {}

        def set_field(name: str, value: object) -> None:
            if name in fields:
                raise self.error(f"duplicate {name} constraint", start)
            fields[name] = value

        while True:
            ch = self.peek()
            if ch == "":
                raise self.error("unterminated bracket atom", start)
            if ch == "]":
                self.take()
                break
            if ch == ";":
                self.take()
                continue
            if ch == "*":
                self.take()
                set_field("any_element", True)
            elif ch == "!":
                self.take()
                if self.peek() != "R":
                    raise self.error("expected R after !")
                self.take()
                set_field("in_ring", False)
            elif ch == "R":
                self.take()
                set_field("in_ring", True)
            elif ch == "a":
                self.take()
                set_field("aromatic", True)
            elif ch == "A":
                self.take()
                set_field("aromatic", False)
            elif ch == "D":
                self.take()
                if not self.peek().isdigit():
                    raise self.error("D needs a digit")
                set_field("degree", int(self.take()))
            elif ch == "H":
                self.take()
                set_field("h_count", int(self.take()) if self.peek().isdigit() else 1)
            elif ch in "+-":
                sign = 1 if ch == "+" else -1
                self.take()
                if self.peek().isdigit():
                    set_field("charge", sign * int(self.take()))
                else:
                    set_field("charge", sign)
            else:
                element, aromatic = self.bracket_element()
                set_field("element", element)
                if aromatic:
                    set_field("aromatic", True)
        if "any_element" in fields and "element" in fields:
            raise self.error("pattern atom cannot be both * and an element", start)
        self.add_atom(
            PatternAtom(
                element=fields.get("element"),  # type: ignore[arg-type]
                aromatic=fields.get("aromatic"),  # type: ignore[arg-type]
                charge=fields.get("charge"),  # type: ignore[arg-type]
                in_ring=fields.get("in_ring"),  # type: ignore[arg-type]
                degree=fields.get("degree"),  # type: ignore[arg-type]
                h_count=fields.get("h_count"),  # type: ignore[arg-type]
            )
        )

    def bracket_element(self) -> tuple[str, bool]:
        two = self.text[self.pos : self.pos + 2]
        if two in _TWO_LETTER:
            self.pos += 2
            return two, False
        ch = self.peek()
        if ch in _SINGLE_LETTER:
            self.take()
            return ch, False
        if ch in AROMATIC_OK:
            self.take()
            return ch.upper(), True
        raise self.error(f"unknown constraint {ch!r}")

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
        kind = self.pending
        self.pending = None
        if num in self.open_rings:
            partner, partner_kind, _ = self.open_rings.pop(num)
            if partner == self.prev:
                raise self.error(f"ring closure {num} to the same atom", where)
            if kind and partner_kind and kind != partner_kind:
                raise self.error(f"conflicting bonds on ring closure {num}", where)
            self.bonds.append(
                PatternBond(partner, self.prev, kind or partner_kind or "default")
            )
        else:
            self.open_rings[num] = (self.prev, kind, where)

    def check_connected(self) -> None:
        if not self.atoms:
            raise self.error("empty pattern", 0)
        adj: dict[int, list[int]] = {i: [] for i in range(len(self.atoms))}
        for b in self.bonds:
            adj[b.a1].append(b.a2)
            adj[b.a2].append(b.a1)
        seen = {0}
        queue = [0]
        while queue:
            a = queue.pop()
            for n in adj[a]:
                if n not in seen:
                    seen.add(n)
                    queue.append(n)
        if len(seen) != len(self.atoms):
            raise self.error("pattern must be a connected graph", 0)


def parse_pattern(text: str) -> Pattern:
    """Parse pattern text; raises PatternError on malformed input."""
    return _PatternParser(text).run()


# -- named pattern registry ------------------------------------------------

_REGISTRY: dict[str, Pattern] = {}


def register_pattern(name: str, source: str) -> Pattern:
    """Register a reusable named pattern; returns the parsed pattern."""
    pattern = parse_pattern(source)
    _REGISTRY[name.lower()] = pattern
    return pattern


def lookup_pattern(name_or_source: str) -> Pattern:
    """Resolve a name (case-insensitive) from the registry, else parse as source."""
    found = _REGISTRY.get(name_or_source.lower())
    if found is not None:
        return found
    return parse_pattern(name_or_source)


def named_patterns() -> dict[str, Pattern]:
    """Snapshot of the registry."""
    return dict(_REGISTRY)


# Everyday query fragments, usable by name in rule expressions.
register_pattern("phenol", "[c]-[O;H1]")
register_pattern("carboxylic_acid", "[C;A](=[O])-[O;H1]")
register_pattern("nitro", "[N;+1](=[O])[O;-1]")
register_pattern("primary_alcohol", "[C;A;H2]-[O;H1;D1]")
register_pattern("hydroxyl", "[O;H1;D1]")
register_pattern("amide", "[C;A](=[O])-[N]")
register_pattern("ether", "[O;A;H0;D2]")
register_pattern("aromatic_ring_atom", "[a;R]")
register_pattern("methyl", "[C;A;H3;D1]")
register_pattern("amine_h", "[N;A;H1]")
