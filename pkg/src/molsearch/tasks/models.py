"""Small in-engine learners and metrics for scoring feature sets.

Three evaluators over numeric feature matrices: closed-form ridge
regression, Newton-iterated logistic regression, and a depth-capped
variance-reduction decision tree.  All standardize columns internally so
descriptor scale differences (molecular weight vs. ring counts) don't skew
regularization or splits.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

logger = logging.getLogger(__name__)

__all__ = [
    "RidgeModel",
    "LogisticModel",
    "TreeModel",
    "train_evaluator",
    "evaluate_metric",
    "fit_ridge",
    "fit_logistic",
    "fit_tree",
    "rmse",
    "rank_auc",
]

EVALUATOR_KINDS = ("ridge", "logistic", "tree")


def _standardize_fit(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return mean, std


@dataclass(frozen=True)
class RidgeModel:
    weights: np.ndarray
    intercept: float
    mean: np.ndarray
    std: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        Xs = (np.asarray(X, dtype=float) - self.mean) / self.std
        return Xs @ self.weights + self.intercept


def fit_ridge(X, y, reg: float = 1e-3) -> RidgeModel:
    """Closed-form ridge on standardized columns; intercept unpenalized.

    A singular normal system (possible when reg is zero and columns are
    collinear) falls back to progressively larger regularization, logged.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("feature matrix and labels disagree on row count")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise ValueError("feature matrix and labels must be finite")
    mean, std = _standardize_fit(X)
    Xs = (X - mean) / std
    intercept = float(y.mean())
    centered = y - intercept
    n_features = X.shape[1]
    strength = reg
    for _ in range(6):
        system = Xs.T @ Xs + strength * np.eye(n_features)
        try:
            weights = np.linalg.solve(system, Xs.T @ centered)
            return RidgeModel(weights=weights, intercept=intercept, mean=mean, std=std)
        except np.linalg.LinAlgError:
            fallback = max(strength, 1e-8) * 1000.0
            logger.warning(
                "singular ridge system at strength %g; retrying with %g",
                strength, fallback,
            )
            strength = fallback
    weights, *_ = np.linalg.lstsq(Xs, centered, rcond=None)
    return RidgeModel(weights=weights, intercept=intercept, mean=mean, std=std)


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    intercept: float
    mean: np.ndarray
    std: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Class-1 probabilities."""
        Xs = (np.asarray(X, dtype=float) - self.mean) / self.std
        z = np.clip(Xs @ self.weights + self.intercept, -35.0, 35.0)
        return 1.0 / (1.0 + np.exp(-z))


def fit_logistic(X, y, max_iter: int = 100, tol: float = 1e-8) -> LogisticModel:
    """Newton-iterated maximum likelihood to a fixed step tolerance."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if set(np.unique(y)) - {0.0, 1.0}:
        raise ValueError("logistic labels must be 0/1")
    mean, std = _standardize_fit(X)
    Xs = np.hstack([(X - mean) / std, np.ones((X.shape[0], 1))])
    beta = np.zeros(Xs.shape[1])
    for _ in range(max_iter):
        z = np.clip(Xs @ beta, -35.0, 35.0)
        p = 1.0 / (1.0 + np.exp(-z))
        w = np.maximum(p * (1.0 - p), 1e-9)
        hessian = (Xs * w[:, None]).T @ Xs + 1e-8 * np.eye(Xs.shape[1])
        gradient = Xs.T @ (y - p)
        step = np.linalg.solve(hessian, gradient)
        beta += step
        if np.max(np.abs(step)) < tol:
            break
    return LogisticModel(
        weights=beta[:-1], intercept=float(beta[-1]), mean=mean, std=std
    )


@dataclass(frozen=True)
class TreeModel:
    root: dict

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            node = self.root
            while "value" not in node:
                branch = "left" if row[node["feature"]] <= node["threshold"] else "right"
                node = node[branch]
            out[i] = node["value"]
        return out


def _best_split(X: np.ndarray, y: np.ndarray):
    """(feature, threshold, sse) minimizing summed squared error, or None."""
    best = None
    total_sse = float(((y - y.mean()) ** 2).sum())
    for feature in range(X.shape[1]):
        order = np.argsort(X[:, feature], kind="stable")
        xs, ys = X[order, feature], y[order]
        cum = np.cumsum(ys)
        cum_sq = np.cumsum(ys**2)
        total, total_sq = cum[-1], cum_sq[-1]
        for i in range(len(ys) - 1):
            if xs[i] == xs[i + 1]:
                continue
            n_left = i + 1
            n_right = len(ys) - n_left
            sse_left = cum_sq[i] - cum[i] ** 2 / n_left
            sse_right = (total_sq - cum_sq[i]) - (total - cum[i]) ** 2 / n_right
            sse = float(sse_left + sse_right)
            if best is None or sse < best[2]:
                best = (feature, float((xs[i] + xs[i + 1]) / 2.0), sse)
    if best is not None and best[2] >= total_sse - 1e-12:
        return None  # no split reduces error
    return best


def _grow(X: np.ndarray, y: np.ndarray, depth: int, max_depth: int) -> dict:
    if depth >= max_depth or len(y) < 2 or np.ptp(y) == 0.0:
        return {"value": float(y.mean())}
    split = _best_split(X, y)
    if split is None:
        return {"value": float(y.mean())}
    feature, threshold, _ = split
    mask = X[:, feature] <= threshold
    return {
        "feature": feature,
        "threshold": threshold,
        "left": _grow(X[mask], y[mask], depth + 1, max_depth),
        "right": _grow(X[~mask], y[~mask], depth + 1, max_depth),
    }


def fit_tree(X, y, max_depth: int = 4) -> TreeModel:
    """Depth-capped regression tree; leaf values are label means, so on 0/1
    labels the output doubles as a class-1 score."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    return TreeModel(root=_grow(X, y, 0, max_depth))


def rmse(predictions, labels) -> float:
    predictions = np.asarray(predictions, dtype=float)
    labels = np.asarray(labels, dtype=float)
    return float(np.sqrt(np.mean((predictions - labels) ** 2)))


def rank_auc(scores, labels) -> float:
    """Probability a random positive outscores a random negative; tied
    scores share averaged ranks."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    positives = labels == 1.0
    n_pos = int(positives.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC is undefined when only one class is present")
    ranks = rankdata(scores, method="average")
    return float((ranks[positives].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def train_evaluator(kind: str, X, y, *, ridge_reg: float = 1e-3,
                    tree_depth: int = 4, logistic_iters: int = 100,
                    logistic_tol: float = 1e-8):
    """Fit one of the three evaluator kinds on a feature matrix."""
    if kind == "ridge":
        return fit_ridge(X, y, reg=ridge_reg)
    if kind == "logistic":
        return fit_logistic(X, y, max_iter=logistic_iters, tol=logistic_tol)
    if kind == "tree":
        return fit_tree(X, y, max_depth=tree_depth)
    raise ValueError(f"unknown evaluator kind {kind!r}; expected one of {EVALUATOR_KINDS}")


def evaluate_metric(model, X, y, metric: str) -> float:
    """Score a fitted model on held-out rows with the named metric."""
    scores = model.predict(X)
    if metric == "rmse":
        return rmse(scores, y)
    if metric == "auc":
        return rank_auc(scores, y)
    raise ValueError(f"unknown metric {metric!r}; expected 'rmse' or 'auc'")
