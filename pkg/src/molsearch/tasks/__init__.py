"""Concrete search tasks: feature-set evolution and structure optimization."""
from .core import (
    FEATURE_CAP,
    PROBE_SAMPLE_SIZE,
    PROPERTIES,
    OptimizationTask,
    PredictionTask,
    TaskSpec,
    apply_action,
    improvement_stats,
    initial_features_from_rules,
    optimization_reward,
    prediction_reward,
)
from .data import (
    DataRecord,
    Dataset,
    TestSplitLockedError,
    load_dataset,
    split_dataset,
)
from .models import (
    LogisticModel,
    RidgeModel,
    TreeModel,
    evaluate_metric,
    fit_logistic,
    fit_ridge,
    fit_tree,
    rank_auc,
    rmse,
    train_evaluator,
)
from .states import OptimizationState, PredictionState

__all__ = [
    "FEATURE_CAP",
    "PROBE_SAMPLE_SIZE",
    "PROPERTIES",
    "DataRecord",
    "Dataset",
    "LogisticModel",
    "OptimizationState",
    "OptimizationTask",
    "PredictionState",
    "PredictionTask",
    "RidgeModel",
    "TaskSpec",
    "TestSplitLockedError",
    "TreeModel",
    "apply_action",
    "evaluate_metric",
    "fit_logistic",
    "fit_ridge",
    "fit_tree",
    "improvement_stats",
    "initial_features_from_rules",
    "load_dataset",
    "optimization_reward",
    "prediction_reward",
    "rank_auc",
    "rmse",
    "split_dataset",
    "train_evaluator",
]
