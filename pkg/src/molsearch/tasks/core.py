"""Task definitions driving the search engine: feature evolution for property
prediction and structural evolution for molecular optimization."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..descriptors import compute as compute_descriptor
from ..descriptors import descriptor_matrix
from ..mcts.rewards import RewardBreakdown
from ..molgraph import canonical_smiles, parse_smiles, tanimoto
from ..molgraph.smiles import SmilesError
from ..molgraph.transforms import TransformError, get_transform, apply_transform
from ..molgraph.match import match_pattern
from ..ruledsl import alignment_score
from ..ruledsl.nodes import Desc
from .data import Dataset
from .models import evaluate_metric, train_evaluator
from .states import OptimizationState, PredictionState

logger = logging.getLogger(__name__)

__all__ = [
    "FEATURE_CAP",
    "PROBE_SAMPLE_SIZE",
    "TaskSpec",
    "PredictionTask",
    "OptimizationTask",
    "apply_action",
    "prediction_reward",
    "optimization_reward",
    "improvement_stats",
    "initial_features_from_rules",
]

#: Hard ceiling on prediction feature-set size.
FEATURE_CAP = 20
#: Train molecules sampled (evenly spaced, fixed per task) for the
#: rule-alignment term of prediction rewards.
PROBE_SAMPLE_SIZE = 16

TASK_KINDS = ("prediction", "optimization")
METRICS = ("rmse", "auc")
PROPERTIES = ("logp", "qed")


@dataclass(frozen=True)
class TaskSpec:
    """What to search for and how to score it.

    Prediction: a metric over a loaded dataset with a chosen evaluator.
    Optimization: a property objective starting from one molecule.
    ``test_bonus_weight`` mixes a normalized test-split signal into the
    prediction reward; it defaults to 0 and should stay there — a nonzero
    value reads held-out labels during search (the dataset guard insists
    the caller unlock the test split explicitly first).
    """

    kind: str
    metric: Optional[str] = None
    evaluator: str = "ridge"
    dataset: Optional[Dataset] = None
    objective: Optional[str] = None
    start_smiles: Optional[str] = None
    lam: float = 0.5
    gamma: float = 1.0
    feature_cap: int = FEATURE_CAP
    ridge_reg: float = 1e-3
    tree_depth: int = 4
    test_bonus_weight: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in TASK_KINDS:
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("reward weights must be non-negative")
        if self.kind == "prediction":
            if self.metric not in METRICS:
                raise ValueError(f"prediction needs a metric in {METRICS}")
            if self.dataset is None:
                raise ValueError("prediction needs a loaded dataset")
            if self.feature_cap < 1:
                raise ValueError("feature cap must be at least 1")
        else:
            if self.objective not in PROPERTIES:
                raise ValueError(f"optimization needs an objective in {PROPERTIES}")
            if not self.start_smiles:
                raise ValueError("optimization needs a start molecule")


def _collect_descriptor_names(node, out: list) -> None:
    if isinstance(node, Desc) and node.name not in out:
        out.append(node.name)
    for attr in ("operand", "left", "right"):
        child = getattr(node, attr, None)
        if child is not None:
            _collect_descriptor_names(child, out)


def initial_features_from_rules(rules, cap: int = FEATURE_CAP) -> tuple:
    """Descriptor names mentioned by feature-kind rules, in rule order.

    This is how a grounded rule set seeds the starting feature tuple of a
    prediction search.
    """
    names: list = []
    for rule in rules:
        if getattr(rule, "kind", None) != "feature":
            continue
        _collect_descriptor_names(rule.ast, names)
    return tuple(names[:cap])


class PredictionTask:
    """Search over descriptor tuples scored by a held-out-validation metric."""

    kind = "prediction"

    def __init__(self, spec: TaskSpec, initial_features):
        if spec.kind != "prediction":
            raise ValueError("spec is not a prediction spec")
        initial = PredictionState(tuple(initial_features))
        if len(initial) == 0:
            raise ValueError("initial feature tuple must not be empty")
        if len(initial) > spec.feature_cap:
            raise ValueError("initial feature tuple exceeds the cap")
        if not spec.dataset.is_split:
            raise ValueError("dataset must be split before building the task")
        self.spec = spec
        self.metric = spec.metric
        self.dataset = spec.dataset
        self._initial = initial
        self._rows = {}
        for split in ("train", "valid"):
            records = self.dataset.items(split)
            self._rows[split] = (
                [parse_smiles(record.smiles) for record in records],
                np.array([record.label for record in records], dtype=float),
            )
        train_mols = self._rows["train"][0]
        stride = max(1, len(train_mols) // PROBE_SAMPLE_SIZE)
        self._probe = train_mols[::stride][:PROBE_SAMPLE_SIZE]
        self._columns: dict = {}

    # -- engine surface -----------------------------------------------------

    def initial_state(self) -> PredictionState:
        return self._initial

    def state_text(self, state: PredictionState) -> str:
        return ", ".join(state.features)

    def canonical_key(self, state: PredictionState) -> str:
        return ",".join(sorted(state.features))

    def apply_action(self, state, proposal):
        return apply_action(state, proposal, self)

    def task_term(self, state: PredictionState) -> float:
        value = self._validation_term(state)
        if self.spec.test_bonus_weight != 0.0:
            value += self.spec.test_bonus_weight * self._normalized_test_signal(state)
        return value

    def heuristic_term(self, state, rules) -> float:
        if rules is None or len(rules) == 0 or not self._probe:
            return 0.0
        total = sum(alignment_score(rules, mol) for mol in self._probe)
        return total / len(self._probe)

    def penalty_term(self, state: PredictionState) -> float:
        return -0.01 * len(state.features)

    # -- scoring internals --------------------------------------------------

    def _column(self, split: str, name: str) -> np.ndarray:
        key = (split, name)
        if key not in self._columns:
            mols = self._rows[split][0]
            values = np.empty(len(mols))
            for i, mol in enumerate(mols):
                try:
                    values[i] = compute_descriptor(mol, name)
                except Exception as exc:  # noqa: BLE001 - exclusion contract
                    logger.warning(
                        "descriptor %s failed on %s row %d: %s", name, split, i, exc
                    )
                    values[i] = np.nan
            self._columns[key] = values
        return self._columns[key]

    def _matrix(self, split: str, features) -> tuple[np.ndarray, np.ndarray]:
        ordered = sorted(features)
        columns = [self._column(split, name) for name in ordered]
        X = np.column_stack(columns) if columns else np.zeros((0, 0))
        y = self._rows[split][1]
        keep = ~np.isnan(X).any(axis=1)
        return X[keep], y[keep]

    def _fit(self, state: PredictionState):
        X_train, y_train = self._matrix("train", state.features)
        model = train_evaluator(
            self.spec.evaluator, X_train, y_train,
            ridge_reg=self.spec.ridge_reg, tree_depth=self.spec.tree_depth,
        )
        return model

    def _validation_term(self, state: PredictionState) -> float:
        model = self._fit(state)
        X_valid, y_valid = self._matrix("valid", state.features)
        value = evaluate_metric(model, X_valid, y_valid, self.metric)
        return -value if self.metric == "rmse" else value

    def _normalized_test_signal(self, state: PredictionState) -> float:
        """Test-split signal in [0, 1]; requires an unlocked test split."""
        value = self.test_metric(state)
        if self.metric == "rmse":
            return 1.0 / (1.0 + value)
        return value

    def test_metric(self, state: PredictionState) -> float:
        """Raw metric on the test split (guarded until unlocked)."""
        records = self.dataset.items("test")
        mols = [parse_smiles(record.smiles) for record in records]
        y = np.array([record.label for record in records], dtype=float)
        X = descriptor_matrix(mols, sorted(state.features))
        model = self._fit(state)
        return evaluate_metric(model, X, y, self.metric)

    def finalize(self, state: PredictionState) -> dict:
        """Unlock the held-out split and score the final state on it once.

        The reported model is refit on train+valid: once the search is over
        the validation rows have served their selection purpose and belong
        in the final fit.
        """
        self.dataset.unlock_test()
        X_train, y_train = self._matrix("train", state.features)
        X_valid, y_valid = self._matrix("valid", state.features)
        model = train_evaluator(
            self.spec.evaluator,
            np.vstack([X_train, X_valid]),
            np.concatenate([y_train, y_valid]),
            ridge_reg=self.spec.ridge_reg, tree_depth=self.spec.tree_depth,
        )
        records = self.dataset.items("test")
        mols = [parse_smiles(record.smiles) for record in records]
        y = np.array([record.label for record in records], dtype=float)
        X = descriptor_matrix(mols, sorted(state.features))
        value = evaluate_metric(model, X, y, self.metric)
        return {
            "metric": self.metric,
            "test_value": value,
            "features": list(state.features),
        }


class OptimizationTask:
    """Search over molecules scored by a property, similarity-anchored."""

    kind = "optimization"

    def __init__(self, spec: TaskSpec):
        if spec.kind != "optimization":
            raise ValueError("spec is not an optimization spec")
        self.spec = spec
        self.objective = spec.objective
        self._start = OptimizationState.from_smiles(spec.start_smiles)
        self._fp0 = self._start.fp()

    def initial_state(self) -> OptimizationState:
        return self._start

    def state_text(self, state: OptimizationState) -> str:
        return state.smiles

    def canonical_key(self, state: OptimizationState) -> str:
        return state.smiles

    def apply_action(self, state, proposal):
        return apply_action(state, proposal, self)

    def task_term(self, state: OptimizationState) -> float:
        return state.descriptor(self.objective)

    def heuristic_term(self, state, rules) -> float:
        if rules is None or len(rules) == 0:
            return 0.0
        return alignment_score(rules, state.mol)

    def penalty_term(self, state: OptimizationState) -> float:
        return -(1.0 - tanimoto(state.fp(), self._fp0))


def apply_action(state, proposal, task):
    """Materialize one proposal into a new state for the given task.

    Prediction appends a registered descriptor name; optimization parses the
    proposed structure (or applies the named edit) and canonicalizes.  Any
    impossibility raises — the engine turns that into a heavily penalized
    dead node.
    """
    if task.kind == "prediction":
        if proposal.feature is None:
            raise ValueError("prediction task needs a feature proposal")
        if proposal.feature in state.features:
            raise ValueError(f"feature {proposal.feature!r} already present")
        spec = getattr(task, "spec", None)
        cap = spec.feature_cap if spec is not None else FEATURE_CAP
        if len(state.features) + 1 > cap:
            raise ValueError(f"feature tuple would exceed the cap of {cap}")
        return state.with_feature(proposal.feature)

    if proposal.feature is not None:
        raise ValueError("optimization task cannot use a feature proposal")
    if proposal.smiles is not None:
        try:
            return OptimizationState.from_smiles(proposal.smiles)
        except SmilesError as exc:
            raise ValueError(f"unparsable structure: {exc}") from exc
    try:
        transform = get_transform(proposal.transform)
    except KeyError as exc:
        raise ValueError(f"unknown edit {proposal.transform!r}") from exc
    if not match_pattern(state.mol, transform.pattern):
        raise ValueError(
            f"edit {proposal.transform!r} has no site on {state.smiles}"
        )
    try:
        product = apply_transform(state.mol, transform)
    except TransformError as exc:
        raise ValueError(f"edit failed: {exc}") from exc
    return OptimizationState.from_smiles(canonical_smiles(product))


def prediction_reward(state, task, rules=None) -> RewardBreakdown:
    """Full reward for a feature tuple under the task's weights."""
    if len(state.features) == 0:
        raise ValueError("feature tuple must not be empty")
    return RewardBreakdown.combine(
        task.task_term(state),
        task.heuristic_term(state, rules),
        task.penalty_term(state),
        task.spec.lam,
        task.spec.gamma,
    )


def optimization_reward(state, task, rules, lam: float, gamma: float) -> RewardBreakdown:
    """Full reward for a molecule: property, alignment, similarity anchor."""
    return RewardBreakdown.combine(
        task.task_term(state),
        task.heuristic_term(state, rules),
        task.penalty_term(state),
        lam,
        gamma,
    )


def improvement_stats(runs) -> tuple[float, float]:
    """(mean improvement, success-rate %) over (start, best, valid) rows.

    The mean improvement covers every run; a run succeeds only when its
    best state is valid and strictly better than its start.
    """
    runs = list(runs)
    if not runs:
        raise ValueError("need at least one run")
    deltas = [best - start for start, best, _ in runs]
    wins = sum(1 for start, best, valid in runs if valid and best > start)
    return float(np.mean(deltas)), 100.0 * wins / len(runs)
