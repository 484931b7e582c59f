"""Guided tree search over task states with immediate composite rewards."""
from .engine import SearchTask, expand, search
from .rewards import R_MIN, RewardBreakdown, simulate_reward
from .trace import TRACE_SCHEMA, SearchTrace, load_trace
from .tree import (
    DEFAULT_ITERATIONS,
    SearchConfig,
    SearchNode,
    SearchTree,
    backpropagate,
    uct_select,
    uct_value,
)

__all__ = [
    "DEFAULT_ITERATIONS",
    "R_MIN",
    "RewardBreakdown",
    "SearchConfig",
    "SearchNode",
    "SearchTask",
    "SearchTrace",
    "SearchTree",
    "TRACE_SCHEMA",
    "backpropagate",
    "expand",
    "load_trace",
    "search",
    "simulate_reward",
    "uct_select",
    "uct_value",
]
