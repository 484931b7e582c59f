"""The search loop: select, propose, expand, score, backpropagate.

States are task-specific handles; the engine never inspects them beyond the
narrow `SearchTask` surface, so structure editing and feature-set search run
on the same machinery.  Candidate proposals come from a policy provider;
every materialized state is scored immediately (no rollout) and the result
flows back up the visited path.  Unparsable or unevaluable candidates stay
in the tree as heavily penalized dead entries that selection never touches.
"""
from __future__ import annotations

import logging
from typing import Optional, Protocol, runtime_checkable

from ..policy import ActionProposal, PolicyProvider, ProviderError, propose_actions
from .rewards import RewardBreakdown, simulate_reward
from .tree import SearchConfig, SearchNode, SearchTree, backpropagate, uct_select
from .trace import SearchTrace

logger = logging.getLogger(__name__)

__all__ = ["SearchTask", "expand", "search"]


@runtime_checkable
class SearchTask(Protocol):
    """What the engine needs from a task definition."""

    kind: str

    def initial_state(self): ...

    def state_text(self, state) -> str: ...

    def canonical_key(self, state) -> str: ...

    def apply_action(self, state, proposal: ActionProposal): ...

    def task_term(self, state) -> float: ...

    def heuristic_term(self, state, rules) -> float: ...

    def penalty_term(self, state) -> float: ...


def _action_text(proposal: ActionProposal) -> str:
    if proposal.smiles is not None:
        return proposal.smiles
    if proposal.feature is not None:
        return proposal.feature
    return f"apply:{proposal.transform}"


def expand(
    tree: SearchTree,
    leaf,
    proposals: list,
    task: SearchTask,
    config: Optional[SearchConfig] = None,
) -> list[int]:
    """Materialize proposals as children of `leaf`; returns new node ids.

    The leaf's one proposal round is consumed even when nothing usable comes
    back.  A proposal that fails to materialize is still inserted, carrying
    the flat penalty and marked invalid so selection skips it forever.
    Canonical duplicates of states already in the tree are skipped when
    dedup is on.
    """
    if isinstance(leaf, int):
        leaf = tree.node(leaf)
    dedup = config.dedup if config is not None else True
    r_min = config.r_min if config is not None else RewardBreakdown.invalid().total
    leaf.expanded = True
    new_ids: list[int] = []
    for proposal in proposals:
        text = _action_text(proposal)
        try:
            state = task.apply_action(leaf.state, proposal)
        except Exception as exc:  # noqa: BLE001 - bad candidates are data here
            logger.warning("candidate %r rejected: %s", text, exc)
            node = tree.add_child(
                leaf.node_id, state=None, state_text=text,
                action=text, rationale=proposal.rationale,
            )
            node.reward = RewardBreakdown.invalid(r_min)
            new_ids.append(node.node_id)
            continue
        key = task.canonical_key(state)
        if dedup and key in tree.seen_keys:
            logger.debug("skipping duplicate candidate %r", text)
            continue
        node = tree.add_child(
            leaf.node_id, state=state, state_text=task.state_text(state),
            action=text, rationale=proposal.rationale, key=key,
        )
        new_ids.append(node.node_id)
    return new_ids


def _refresh_dead(tree: SearchTree, node: SearchNode) -> None:
    """Mark `node` and ancestors dead while they have no selectable child."""
    current: Optional[SearchNode] = node
    while current is not None:
        if not current.expanded:
            return
        if any(tree.is_selectable(cid) for cid in current.children):
            return
        current.dead = True
        current = tree.node(current.parent) if current.parent is not None else None


def _task_info(task: SearchTask) -> dict:
    info = {"kind": getattr(task, "kind", "unknown")}
    for attr in ("objective", "target_property", "metric"):
        value = getattr(task, attr, None)
        if value is not None:
            info["objective"] = str(value)
            break
    return info


def search(
    task: SearchTask,
    provider: PolicyProvider,
    rules,
    config: SearchConfig,
) -> tuple[object, SearchTrace]:
    """Run the full budgeted loop; returns (best valid state, trace).

    Every iteration selects a frontier node, asks the provider for up to
    `config.k` candidate actions, materializes and scores them, and pushes
    each valid score back up the path.  The best-so-far answer can only
    improve.  A provider failure stops the run early: the best state found
    so far is returned and the trace is flagged truncated.
    """
    knowledge = [getattr(rule, "sentence", str(rule)) for rule in rules]

    s0 = task.initial_state()
    tree = SearchTree()
    root = tree.add_root(
        s0, state_text=task.state_text(s0), key=task.canonical_key(s0)
    )
    root.reward = simulate_reward(s0, task, rules, config)
    if root.reward.valid:
        backpropagate(tree, root, root.reward.total)
    else:
        logger.warning("initial state failed evaluation; search cannot improve it")

    truncated = False
    iterations_run = 0
    for iteration in range(1, config.n_iter + 1):
        path = uct_select(tree, config.c)
        leaf = tree.node(path[-1])
        if leaf.expanded or not leaf.valid:
            logger.info("search space exhausted after %d iterations", iterations_run)
            break
        try:
            proposals = propose_actions(leaf.state, knowledge, provider, k=config.k)
        except ProviderError as exc:
            logger.warning("provider failed at iteration %d: %s", iteration, exc)
            truncated = True
            break
        new_ids = expand(tree, leaf, proposals, task, config)
        for node_id in new_ids:
            node = tree.node(node_id)
            node.iteration = iteration
            if node.reward is not None:
                continue  # already penalized at materialization
            node.reward = simulate_reward(node.state, task, rules, config)
            if node.reward.valid:
                backpropagate(tree, node, node.reward.total)
        _refresh_dead(tree, leaf)
        iterations_run = iteration

    best = tree.best_node()
    best_state = best.state if best is not None else s0
    trace = SearchTrace.from_tree(
        tree,
        config=config,
        provider_id=getattr(provider, "provider_id", "unknown"),
        task_info=_task_info(task),
        truncated=truncated,
        iterations_run=iterations_run,
        best_node=best.node_id if best is not None else None,
    )
    return best_state, trace
