"""Molecular graph model: atoms, bonds, rings.

Molecules are immutable after construction; every edit produces a new object.
Bond orders are stored kekulized (1/2/3) with a separate aromatic flag on both
atoms and bonds, so descriptor code can ask either question.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property


@dataclass(frozen=True)
class Atom:
    """One heavy atom. h_count is the total attached hydrogen count."""

    element: str
    charge: int = 0
    aromatic: bool = False
    h_count: int = 0
    # True when the hydrogen count was written explicitly (bracket atom) and
    # must survive edits untouched.
    explicit_h: bool = False


@dataclass(frozen=True)
class Bond:
    """Undirected bond between atom indices a1 < a2 with kekulized order."""

    a1: int
    a2: int
    order: int = 1
    aromatic: bool = False

    def other(self, idx: int) -> int:
        if idx == self.a1:
            return self.a2
        if idx == self.a2:
            return self.a1
        raise ValueError(f"atom {idx} not on bond {self.a1}-{self.a2}")


@dataclass(frozen=True)
class Molecule:
    """Immutable molecular graph plus the text it was parsed from (if any)."""

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    source: str = ""

    def __post_init__(self) -> None:
        n = len(self.atoms)
        for b in self.bonds:
            if not (0 <= b.a1 < n and 0 <= b.a2 < n) or b.a1 == b.a2:
                raise ValueError(f"bond {b.a1}-{b.a2} references invalid atoms")

    # -- adjacency ---------------------------------------------------------

    @cached_property
    def _adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """For each atom, tuple of (neighbor index, bond index) in bond order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for bi, b in enumerate(self.bonds):
            adj[b.a1].append((b.a2, bi))
            adj[b.a2].append((b.a1, bi))
        return tuple(tuple(a) for a in adj)

    def neighbors(self, idx: int) -> tuple[tuple[int, int], ...]:
        """(neighbor atom index, bond index) pairs for atom idx."""
        return self._adjacency[idx]

    def degree(self, idx: int) -> int:
        return len(self._adjacency[idx])

    @cached_property
    def _bond_lookup(self) -> dict[tuple[int, int], int]:
        table: dict[tuple[int, int], int] = {}
        for bi, b in enumerate(self.bonds):
            table[(b.a1, b.a2)] = bi
            table[(b.a2, b.a1)] = bi
        return table

    def bond_between(self, i: int, j: int) -> Bond | None:
        bi = self._bond_lookup.get((i, j))
        return self.bonds[bi] if bi is not None else None

    def bond_index_between(self, i: int, j: int) -> int | None:
        return self._bond_lookup.get((i, j))

    def bond_order_sum(self, idx: int) -> int:
        """Sum of kekulized bond orders at an atom (hydrogens not included)."""
        return sum(self.bonds[bi].order for _, bi in self._adjacency[idx])

    # -- ring perception ---------------------------------------------------

    @cached_property
    def _ring_bond_flags(self) -> tuple[bool, ...]:
        """bond index -> lies on a cycle. Computed by bridge finding."""
        n = len(self.atoms)
        visited = [False] * n
        disc = [0] * n
        low = [0] * n
        is_bridge = [False] * len(self.bonds)
        counter = [0]

        # Iterative DFS to avoid recursion limits on long chains.
        for start in range(n):
            if visited[start]:
                continue
            stack: list[tuple[int, int, int]] = [(start, -1, 0)]
            while stack:
                node, parent_bond, child_pos = stack.pop()
                if child_pos == 0:
                    visited[node] = True
                    counter[0] += 1
                    disc[node] = low[node] = counter[0]
                adj = self._adjacency[node]
                advanced = False
                for pos in range(child_pos, len(adj)):
                    nbr, bi = adj[pos]
                    if bi == parent_bond:
                        continue
                    if visited[nbr]:
                        low[node] = min(low[node], disc[nbr])
                        continue
                    stack.append((node, parent_bond, pos + 1))
                    stack.append((nbr, bi, 0))
                    advanced = True
                    break
                if not advanced and parent_bond >= 0:
                    b = self.bonds[parent_bond]
                    parent = b.other(node)
                    low[parent] = min(low[parent], low[node])
                    if low[node] > disc[parent]:
                        is_bridge[parent_bond] = True
        return tuple(not is_bridge[bi] for bi in range(len(self.bonds)))

    def bond_in_ring(self, bond_index: int) -> bool:
        return self._ring_bond_flags[bond_index]

    def atom_in_ring(self, idx: int) -> bool:
        return any(self._ring_bond_flags[bi] for _, bi in self._adjacency[idx])

    @cached_property
    def rings(self) -> tuple[tuple[int, ...], ...]:
        """Unique smallest rings: for every ring bond, a shortest cycle through it.

        Each ring is a tuple of atom indices in cyclic order.  Fused systems
        yield their constituent small rings (the perimeter is never shortest).
        """
        seen: set[frozenset[int]] = set()
        out: list[tuple[int, ...]] = []
        for bi, in_ring in enumerate(self._ring_bond_flags):
            if not in_ring:
                continue
            cycle = self._shortest_cycle_through(bi)
            if cycle is None:
                continue
            key = frozenset(cycle)
            if key not in seen:
                seen.add(key)
                out.append(cycle)
        return tuple(out)

    def _shortest_cycle_through(self, bond_index: int) -> tuple[int, ...] | None:
        """BFS from one bond endpoint to the other, excluding the bond itself."""
        b = self.bonds[bond_index]
        start, goal = b.a1, b.a2
        prev: dict[int, int] = {start: -1}
        frontier = [start]
        while frontier and goal not in prev:
            nxt: list[int] = []
            for node in frontier:
                for nbr, bi in self._adjacency[node]:
                    if bi == bond_index or nbr in prev:
                        continue
                    prev[nbr] = node
                    nxt.append(nbr)
            frontier = nxt
        if goal not in prev:
            return None
        path = [goal]
        while path[-1] != start:
            path.append(prev[path[-1]])
        return tuple(path)

    @cached_property
    def ring_count(self) -> int:
        """Number of independent cycles (bonds - atoms + components)."""
        n = len(self.atoms)
        seen = [False] * n
        components = 0
        for start in range(n):
            if seen[start]:
                continue
            components += 1
            stack = [start]
            seen[start] = True
            while stack:
                node = stack.pop()
                for nbr, _ in self._adjacency[node]:
                    if not seen[nbr]:
                        seen[nbr] = True
                        stack.append(nbr)
        return len(self.bonds) - n + components

    def atom_in_small_ring(self, idx: int, size: int) -> bool:
        return any(len(r) == size and idx in r for r in self.rings)

    # -- convenience -------------------------------------------------------

    def with_atoms(self, atoms: tuple[Atom, ...]) -> "Molecule":
        return Molecule(atoms=atoms, bonds=self.bonds, source=self.source)

    def replace_atom(self, idx: int, **changes) -> "Molecule":
        atoms = list(self.atoms)
        atoms[idx] = replace(atoms[idx], **changes)
        return self.with_atoms(tuple(atoms))

    def heavy_atom_count(self) -> int:
        return sum(1 for a in self.atoms if a.element != "H")

    def total_h_count(self) -> int:
        return sum(a.h_count for a in self.atoms)

    def __repr__(self) -> str:  # keep debugger output short
        return f"Molecule({len(self.atoms)} atoms, {len(self.bonds)} bonds, {self.source!r})"
