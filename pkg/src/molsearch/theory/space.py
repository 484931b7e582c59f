"""Explicit finite point spaces with declared one-edit neighborhoods.

A :class:`CliffSpace` is the worst-case analysis counterpart of the live
search domains: every point is enumerated, every distance-1 neighbor is
declared up front, and the ground-truth scoring function is a total table.
That makes sharpness questions (how fast can the truth move across one
edit?) answerable by exhaustive scan instead of sampling.

Spaces are immutable once built and safe to share across threads.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from math import isfinite
from pathlib import Path
from typing import Callable, Iterable, Mapping

__all__ = [
    "SPACE_SCHEMA",
    "CliffSpace",
    "load_space",
    "save_space",
    "string_space",
    "step_space",
    "random_cliff_space",
]

SPACE_SCHEMA = "molsearch-cliffspace/1"


@dataclass(frozen=True)
class CliffSpace:
    """Finite labeled point set + symmetric neighbor table + true values.

    Invariants enforced at construction: labels are unique strings, the
    neighbor relation is irreflexive and symmetric, every neighbor is a
    member, and the value table is total and finite.
    """

    points: tuple
    neighbors: Mapping[str, tuple]
    values: Mapping[str, float]

    def __post_init__(self):
        points = tuple(self.points)
        if not points:
            raise ValueError("a space needs at least one point")
        for label in points:
            if not isinstance(label, str):
                raise ValueError(f"point labels must be strings, got {label!r}")
        if len(set(points)) != len(points):
            raise ValueError("duplicate point labels")
        member = set(points)

        table: dict[str, tuple] = {}
        for label, targets in dict(self.neighbors).items():
            if label not in member:
                raise ValueError(f"neighbor table names unknown point {label!r}")
            cleaned = []
            for target in targets:
                if target not in member:
                    raise ValueError(
                        f"{label!r} lists unknown neighbor {target!r}"
                    )
                if target == label:
                    raise ValueError(f"{label!r} neighbors itself")
                if target not in cleaned:
                    cleaned.append(target)
            table[label] = tuple(cleaned)
        for label in points:
            table.setdefault(label, ())
        for label, targets in table.items():
            for target in targets:
                if label not in table[target]:
                    raise ValueError(
                        f"asymmetric neighborhood: {target!r} misses {label!r}"
                    )

        value_table = {}
        for label, value in dict(self.values).items():
            if label not in member:
                raise ValueError(f"value table names unknown point {label!r}")
            value = float(value)
            if not isfinite(value):
                raise ValueError(f"non-finite value at {label!r}")
            value_table[label] = value
        missing = member - set(value_table)
        if missing:
            raise ValueError(
                f"value table is not total: missing {sorted(missing)[:3]}"
            )

        object.__setattr__(self, "points", points)
        object.__setattr__(self, "neighbors", table)
        object.__setattr__(self, "values", value_table)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, label) -> bool:
        return label in self.values

    def _require(self, label: str) -> None:
        if label not in self.values:
            raise ValueError(f"{label!r} is not a point of this space")

    def neighbors_of(self, label: str) -> tuple:
        self._require(label)
        return self.neighbors[label]

    def f_star(self, label: str) -> float:
        self._require(label)
        return self.values[label]

    @property
    def max_degree(self) -> int:
        return max(len(t) for t in self.neighbors.values())

    def brute_max(self) -> float:
        """True maximum over the whole space, by enumeration."""
        return max(self.values.values())


def save_space(space: CliffSpace, path) -> None:
    payload = {
        "schema": SPACE_SCHEMA,
        "points": list(space.points),
        "neighbors": {p: list(space.neighbors[p]) for p in space.points},
        "values": {p: space.values[p] for p in space.points},
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_space(path) -> CliffSpace:
    """Read a space document back; construction re-checks all invariants."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    schema = payload.get("schema")
    if schema != SPACE_SCHEMA:
        raise ValueError(f"unsupported space schema {schema!r}")
    return CliffSpace(
        points=tuple(payload["points"]),
        neighbors=payload["neighbors"],
        values=payload["values"],
    )


def _substitution_adjacent(a: str, b: str) -> bool:
    if len(a) != len(b):
        return False
    return sum(x != y for x, y in zip(a, b)) == 1


def _edit_adjacent(a: str, b: str) -> bool:
    """True when the strings differ by one substitution, insertion, or
    deletion (single-edit adjacency)."""
    if a == b:
        return False
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la == lb:
        return _substitution_adjacent(a, b)
    if la > lb:
        a, b = b, a  # a is now the shorter string
    i = 0
    while i < len(a) and a[i] == b[i]:
        i += 1
    return a[i:] == b[i + 1:]


def string_space(
    strings: Iterable[str],
    f: Callable[[str], float],
    edits: str = "substitution",
) -> CliffSpace:
    """Space over explicit strings; neighbors are pairs one edit apart.

    `edits` picks the edit set: "substitution" (same length, one changed
    character) or "levenshtein" (substitution, insertion, or deletion).
    """
    if edits == "substitution":
        adjacent = _substitution_adjacent
    elif edits == "levenshtein":
        adjacent = _edit_adjacent
    else:
        raise ValueError(f"unknown edit set {edits!r}")
    points = list(dict.fromkeys(strings))
    neighbors = {
        p: tuple(q for q in points if q != p and adjacent(p, q)) for p in points
    }
    return CliffSpace(
        points=tuple(points),
        neighbors=neighbors,
        values={p: float(f(p)) for p in points},
    )


def step_space(n: int = 8, height: float = 2.0) -> CliffSpace:
    """Path of `n` points whose value jumps by `height` across one middle
    edge; the two points flanking the jump are the sharp ones."""
    if n < 2:
        raise ValueError("a step needs at least two points")
    labels = [f"s{i}" for i in range(n)]
    neighbors = {}
    for i, label in enumerate(labels):
        links = []
        if i > 0:
            links.append(labels[i - 1])
        if i < n - 1:
            links.append(labels[i + 1])
        neighbors[label] = tuple(links)
    mid = n // 2
    values = {label: (height if i >= mid else 0.0) for i, label in enumerate(labels)}
    return CliffSpace(points=tuple(labels), neighbors=neighbors, values=values)


def random_cliff_space(
    seed: int,
    n_points: int = 60,
    extra_edges: int = 25,
    cliff_count: int = 2,
    cliff_height: float = 4.0,
) -> CliffSpace:
    """Connected random landscape with a few injected sharp jumps.

    A random spanning tree guarantees connectivity, extra edges add cycles,
    base values are uniform noise in [0, 1), and `cliff_count` randomly
    chosen points get bumped by `cliff_height` so their incident edges
    carry jumps far above the noise floor.
    """
    if n_points < 2:
        raise ValueError("need at least two points")
    rng = random.Random(seed)
    labels = [f"p{i:03d}" for i in range(n_points)]
    edges = set()
    for i in range(1, n_points):
        edges.add((labels[rng.randrange(i)], labels[i]))
    for _ in range(extra_edges):
        i, j = rng.sample(range(n_points), 2)
        edge = (labels[min(i, j)], labels[max(i, j)])
        edges.add(edge)

    neighbors = {label: [] for label in labels}
    for a, b in sorted(edges):
        neighbors[a].append(b)
        neighbors[b].append(a)

    values = {label: rng.random() for label in labels}
    for label in rng.sample(labels, cliff_count):
        values[label] += cliff_height
    return CliffSpace(
        points=tuple(labels),
        neighbors={k: tuple(v) for k, v in neighbors.items()},
        values=values,
    )
