"""Composite state rewards: task score, rule-alignment bonus, penalty term."""
from __future__ import annotations

import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)

__all__ = ["R_MIN", "RewardBreakdown", "simulate_reward"]

#: Flat total assigned to invalid states (unparsable or unevaluable); large
#: enough that such a state can never look attractive.
R_MIN = -100.0


def _compose(task_term: float, heuristic_term: float, penalty_term: float,
             lam: float, gamma: float) -> float:
    return task_term + lam * heuristic_term + gamma * penalty_term


@dataclass(frozen=True)
class RewardBreakdown:
    """Itemized reward for one simulated state.

    For valid states ``total`` is exactly ``task_term + lam * heuristic_term
    + gamma * penalty_term``; invalid states carry a flat total and zeroed
    terms.  The heuristic term is the (possibly averaged) count of satisfied
    rules, so it is never negative; the penalty term never rewards.
    """

    task_term: float
    heuristic_term: float
    penalty_term: float
    lam: float
    gamma: float
    total: float
    valid: bool

    def __post_init__(self) -> None:
        if not self.valid:
            return
        if self.heuristic_term < 0:
            raise ValueError("heuristic term must be non-negative")
        if self.penalty_term > 0:
            raise ValueError("penalty term must not be positive")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("reward weights must be non-negative")
        expected = _compose(self.task_term, self.heuristic_term,
                            self.penalty_term, self.lam, self.gamma)
        if self.total != expected:
            raise ValueError(
                f"total {self.total!r} does not equal the weighted sum "
                f"{expected!r}"
            )

    @classmethod
    def combine(cls, task_term: float, heuristic_term: float,
                penalty_term: float, lam: float, gamma: float) -> "RewardBreakdown":
        """Itemized reward for a valid state under the given weights."""
        return cls(
            task_term=float(task_term),
            heuristic_term=float(heuristic_term),
            penalty_term=float(penalty_term),
            lam=float(lam),
            gamma=float(gamma),
            total=_compose(float(task_term), float(heuristic_term),
                           float(penalty_term), float(lam), float(gamma)),
            valid=True,
        )

    @classmethod
    def invalid(cls, r_min: float = R_MIN) -> "RewardBreakdown":
        """Flat heavy penalty for a state that failed validation."""
        return cls(task_term=0.0, heuristic_term=0.0, penalty_term=0.0,
                   lam=0.0, gamma=0.0, total=float(r_min), valid=False)

    def as_dict(self) -> dict:
        return {
            "task_term": self.task_term,
            "heuristic_term": self.heuristic_term,
            "penalty_term": self.penalty_term,
            "lam": self.lam,
            "gamma": self.gamma,
            "total": self.total,
            "valid": self.valid,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RewardBreakdown":
        return cls(
            task_term=data["task_term"], heuristic_term=data["heuristic_term"],
            penalty_term=data["penalty_term"], lam=data["lam"],
            gamma=data["gamma"], total=data["total"], valid=data["valid"],
        )


def simulate_reward(state, task, rules, config) -> RewardBreakdown:
    """Score a materialized state immediately — no rollout.

    The task supplies its objective term and its penalty term; the rule set
    supplies the heuristic alignment term; the config weights combine them.
    Any task-evaluation failure demotes the state to invalid (flat
    ``config.r_min``) and is logged rather than raised.
    """
    try:
        task_term = float(task.task_term(state))
        heuristic_term = float(task.heuristic_term(state, rules))
        penalty_term = float(task.penalty_term(state))
    except Exception as exc:  # noqa: BLE001 - any scoring failure invalidates
        logger.warning("state evaluation failed, treating as invalid: %s", exc)
        return RewardBreakdown.invalid(config.r_min)
    return RewardBreakdown.combine(
        task_term, heuristic_term, penalty_term, config.lam, config.gamma
    )
