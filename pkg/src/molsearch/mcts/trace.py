"""Byte-stable run records: every node, edge, reward and rationale of a search."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..molgraph import FP_HASH_SEED
from .rewards import RewardBreakdown
from .tree import SearchConfig, SearchTree

__all__ = ["TRACE_SCHEMA", "SearchTrace", "load_trace"]

TRACE_SCHEMA = "molsearch-trace/1"


@dataclass(frozen=True)
class SearchTrace:
    """Complete, replayable record of one search run.

    The header pins everything needed to reproduce or audit the run: the
    config (including seed), the provider identity, and the fingerprint hash
    seed the similarity penalty depends on.  Node records carry final visit
    statistics and the full reward breakdown, plus the rationale text that
    proposed each action.  Serialization is canonical (sorted keys, fixed
    indent, trailing newline) so identical runs produce identical bytes.
    """

    header: dict
    nodes: tuple

    @classmethod
    def from_tree(
        cls,
        tree: SearchTree,
        config: SearchConfig,
        provider_id: str,
        task_info: dict,
        truncated: bool,
        iterations_run: int,
        best_node: Optional[int],
    ) -> "SearchTrace":
        header = {
            "config": config.as_dict(),
            "seed": config.seed,
            "provider_id": provider_id,
            "fp_hash_seed": FP_HASH_SEED,
            "task": dict(task_info),
            "truncated": truncated,
            "iterations_run": iterations_run,
            "best_node": best_node,
            "node_count": len(tree),
        }
        records = tuple(
            {
                "id": node.node_id,
                "parent": node.parent,
                "action": node.action,
                "state": node.state_text,
                "Q": node.Q,
                "N": node.N,
                "reward": node.reward.as_dict() if node.reward else None,
                "valid": node.valid,
                "rationale": node.rationale,
                "iteration": node.iteration,
            }
            for node in tree.nodes
        )
        return cls(header=header, nodes=records)

    def to_json(self) -> str:
        payload = {
            "schema": TRACE_SCHEMA,
            "header": self.header,
            "nodes": list(self.nodes),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @property
    def best_record(self) -> Optional[dict]:
        best_id = self.header.get("best_node")
        if best_id is None:
            return None
        return self.nodes[best_id]

    def ancestry(self, node_id: int) -> list[int]:
        """Node ids from `node_id` up to and including the root."""
        chain = [node_id]
        parent = self.nodes[node_id]["parent"]
        while parent is not None:
            chain.append(parent)
            parent = self.nodes[parent]["parent"]
        return chain

    def reward_of(self, node_id: int) -> Optional[RewardBreakdown]:
        data = self.nodes[node_id]["reward"]
        return RewardBreakdown.from_dict(data) if data else None


def load_trace(path) -> SearchTrace:
    """Read a saved trace back; rejects documents with a foreign schema tag."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    schema = payload.get("schema")
    if schema != TRACE_SCHEMA:
        raise ValueError(f"unsupported trace schema {schema!r}")
    return SearchTrace(header=payload["header"], nodes=tuple(payload["nodes"]))
