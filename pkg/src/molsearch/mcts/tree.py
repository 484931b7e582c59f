"""Search tree bookkeeping: nodes, visit statistics, selection, backpropagation.

Exactly one worker may mutate a tree (insertion, visit updates, flag changes);
reward evaluation of fresh siblings is pure and may run concurrently, with
results applied in proposal order by that single worker.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .rewards import R_MIN, RewardBreakdown

__all__ = [
    "DEFAULT_ITERATIONS",
    "SearchConfig",
    "SearchNode",
    "SearchTree",
    "backpropagate",
    "uct_select",
    "uct_value",
]

#: Iteration budgets by task kind: structural editing converges early, while
#: feature-set search needs a longer exploration phase.
DEFAULT_ITERATIONS = {"optimization": 30, "prediction": 100}


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for one search run.

    ``n_iter`` may be zero (the run then returns the initial state untouched).
    ``r_min`` is the flat total assigned to invalid states; such states are
    kept in the tree for the record but never selected and never
    backpropagated, so the penalty cannot leak into ancestor statistics.
    """

    n_iter: int
    c: float = math.sqrt(2.0)
    k: int = 5
    lam: float = 0.5
    gamma: float = 1.0
    seed: int = 0
    dedup: bool = True
    r_min: float = R_MIN

    def __post_init__(self) -> None:
        if self.n_iter < 0:
            raise ValueError("n_iter must be non-negative")
        if self.c < 0:
            raise ValueError("exploration constant c must be non-negative")
        if self.k < 1:
            raise ValueError("expansion width k must be at least 1")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("reward weights must be non-negative")

    @classmethod
    def for_kind(cls, kind: str, **overrides) -> "SearchConfig":
        """Config with the iteration budget conventional for a task kind."""
        if kind not in DEFAULT_ITERATIONS:
            raise ValueError(
                f"unknown task kind {kind!r}; expected one of "
                f"{sorted(DEFAULT_ITERATIONS)}"
            )
        overrides.setdefault("n_iter", DEFAULT_ITERATIONS[kind])
        return cls(**overrides)

    def as_dict(self) -> dict:
        return {
            "n_iter": self.n_iter,
            "c": self.c,
            "k": self.k,
            "lam": self.lam,
            "gamma": self.gamma,
            "seed": self.seed,
            "dedup": self.dedup,
            "r_min": self.r_min,
        }


@dataclass
class SearchNode:
    """One visited-or-proposed state in the tree.

    ``Q`` accumulates backpropagated totals; the selection rule reads the mean
    ``Q/N``.  ``reward`` is None until the node is simulated.  ``expanded``
    records that the node has already spent its one proposal round;
    ``dead`` marks an expanded node with no selectable descendants left.
    """

    node_id: int
    state: Any
    state_text: str
    action: Optional[str]
    rationale: str
    parent: Optional[int]
    children: list[int] = field(default_factory=list)
    Q: float = 0.0
    N: int = 0
    reward: Optional[RewardBreakdown] = None
    expanded: bool = False
    dead: bool = False
    iteration: int = 0

    @property
    def is_root(self) -> bool:
        return self.parent is None

    @property
    def valid(self) -> bool:
        return self.reward is not None and self.reward.valid


class SearchTree:
    """Append-only node store with canonical-state memory for dedup."""

    def __init__(self) -> None:
        self.nodes: list[SearchNode] = []
        self.seen_keys: set[str] = set()

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> SearchNode:
        if not self.nodes:
            raise ValueError("tree has no root yet")
        return self.nodes[0]

    def node(self, node_id: int) -> SearchNode:
        return self.nodes[node_id]

    def add_root(self, state: Any, state_text: str, key: Optional[str] = None) -> SearchNode:
        if self.nodes:
            raise ValueError("tree already has a root")
        node = SearchNode(
            node_id=0, state=state, state_text=state_text,
            action=None, rationale="", parent=None,
        )
        self.nodes.append(node)
        if key is not None:
            self.seen_keys.add(key)
        return node

    def add_child(
        self,
        parent_id: int,
        state: Any,
        state_text: str,
        action: str,
        rationale: str,
        key: Optional[str] = None,
    ) -> SearchNode:
        parent = self.nodes[parent_id]
        node = SearchNode(
            node_id=len(self.nodes), state=state, state_text=state_text,
            action=action, rationale=rationale, parent=parent_id,
        )
        self.nodes.append(node)
        parent.children.append(node.node_id)
        if key is not None:
            self.seen_keys.add(key)
        return node

    def is_selectable(self, node_id: int) -> bool:
        """Eligible as a selection step: simulated valid, not a dead end."""
        node = self.nodes[node_id]
        return node.valid and not node.dead

    def ancestry(self, node_id: int) -> list[int]:
        """Node ids from this node up to and including the root."""
        chain = [node_id]
        parent = self.nodes[node_id].parent
        while parent is not None:
            chain.append(parent)
            parent = self.nodes[parent].parent
        return chain

    def best_node(self) -> Optional[SearchNode]:
        """Valid node with the highest simulated total; earliest wins ties."""
        best: Optional[SearchNode] = None
        for node in self.nodes:
            if not node.valid:
                continue
            if best is None or node.reward.total > best.reward.total:
                best = node
        return best


def uct_value(q: float, n: int, parent_n: int, c: float) -> float:
    """Selection score: mean value plus the exploration bonus c·√(ln N / N_a).

    An unvisited arm scores +inf so it outranks every visited sibling; among
    several unvisited arms the caller's first-wins max keeps insertion order.
    """
    if n == 0:
        return math.inf
    return q / n + c * math.sqrt(math.log(parent_n) / n)


def uct_select(tree: SearchTree, c: float) -> list[int]:
    """Walk from the root to a frontier node, greedy in `uct_value` per step.

    Descends only through expanded nodes and only into selectable children;
    stops at the first node that still has its proposal round to spend (or,
    if every path is exhausted, at the last node reached).  Returns node ids
    from the root to the stop node inclusive.
    """
    node = tree.root
    path = [node.node_id]
    while node.expanded:
        candidates = [
            tree.node(cid) for cid in node.children if tree.is_selectable(cid)
        ]
        if not candidates:
            break
        parent_n = node.N
        node = max(
            candidates, key=lambda ch: uct_value(ch.Q, ch.N, parent_n, c)
        )
        path.append(node.node_id)
    return path


def backpropagate(tree: SearchTree, node, reward_total: float) -> None:
    """Add one visit and the given total to the node and every ancestor."""
    if isinstance(node, int):
        node = tree.node(node)
    while True:
        node.N += 1
        node.Q += reward_total
        if node.parent is None:
            return
        node = tree.node(node.parent)
