"""Budget-driven convergence of the tree search on enumerable spaces.

With a proposal policy that simply offers a point's declared neighbors in
random order and the true value as the only reward signal, the search
engine exploring an enumerable space must eventually hold the true
maximum - once the budget covers the space, every reachable point has been
inserted and scored.  `exhaustive_convergence_check` runs exactly that
experiment and compares the best value found against brute force.
"""
from __future__ import annotations

import random
from typing import Optional

from ..mcts import SearchConfig, search
from ..policy import ActionProposal, PolicyProvider, PolicyRequest, ProviderError
from .space import CliffSpace

__all__ = ["exhaustive_convergence_check"]

ENUMERATION_CAP = 10_000


class _UniformNeighborProvider(PolicyProvider):
    """Offers every declared neighbor of the current point, shuffled."""

    def __init__(self, space: CliffSpace, seed: int):
        self._space = space
        self._rng = random.Random(seed)
        self.provider_id = f"uniform-neighbors:{seed}"

    def respond(self, request: PolicyRequest) -> str:
        if request.kind != "propose":
            raise ProviderError(
                "the uniform neighbor policy only answers proposal requests"
            )
        here = request.context["smiles"]  # point label; see _PointTask
        options = list(self._space.neighbors_of(here))
        self._rng.shuffle(options)
        lines = "\n".join(f"{label} | uniform neighbor draw" for label in options)
        return f"```\n{lines}\n```"


class _PointTask:
    """Search-task adapter: states are point labels, reward is the truth."""

    kind = "cliff-search"

    def __init__(self, space: CliffSpace, start: str):
        space._require(start)
        self._space = space
        self._start = start

    def initial_state(self) -> str:
        return self._start

    def state_text(self, state: str) -> str:
        return state

    def canonical_key(self, state: str) -> str:
        return state

    def apply_action(self, state: str, proposal: ActionProposal) -> str:
        target = proposal.smiles
        if target is None:
            raise ValueError("expected a point label proposal")
        if target not in self._space.neighbors_of(state):
            raise ValueError(f"{target!r} is not one edit from {state!r}")
        return target

    def task_term(self, state: str) -> float:
        return self._space.f_star(state)

    def heuristic_term(self, state: str, rules) -> float:
        return 0.0

    def penalty_term(self, state: str) -> float:
        return 0.0


def exhaustive_convergence_check(
    space: CliffSpace,
    search_budget: int,
    *,
    start: Optional[str] = None,
    seed: int = 0,
) -> bool:
    """True when a budgeted search run finds the space's true maximum.

    The guarantee is asymptotic: with a budget of at least |space|
    iterations on a connected space the answer is always True, while a
    starved budget may legitimately return False.  Disconnected spaces
    compare against the global maximum, so a component holding it that the
    start cannot reach also yields False.
    """
    if search_budget < 1:
        raise ValueError("search budget must be at least 1")
    if len(space) > ENUMERATION_CAP:
        raise ValueError(
            f"space has {len(space)} points; refusing to enumerate past "
            f"{ENUMERATION_CAP}"
        )
    origin = space.points[0] if start is None else start
    task = _PointTask(space, origin)
    provider = _UniformNeighborProvider(space, seed)
    config = SearchConfig(
        n_iter=search_budget,
        k=max(1, space.max_degree),
        lam=0.0,
        gamma=0.0,
        seed=seed,
    )
    best_state, _ = search(task, provider, [], config)
    return space.f_star(str(best_state)) == space.brute_max()
