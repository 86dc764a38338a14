"""Closed-form SGC evaluator: K-step propagation followed by ridge
regression onto one-hot labels.
"""

from __future__ import annotations

import logging
from time import perf_counter
from typing import TYPE_CHECKING

import numpy as np
from scipy.linalg import solve

from cgc.condensers.propagation import propagate_features
from cgc.condensers.utils.config import DEFAULT_K
from cgc.core.errors import ConfigError
from cgc.evaluators.utils.config import DEFAULT_RIDGE
from cgc.evaluators.utils.helpers import (
    accuracy,
    check_compatible,
    evaluation_graph,
    training_graph,
)
from cgc.evaluators.utils.types import EvalReport

if TYPE_CHECKING:
    from cgc.condensers.utils.types import PropagationRule
    from cgc.core.graph import Dataset, FloatArray
    from cgc.core.types import CondensedGraph

logger = logging.getLogger()


def fit_ridge(
    features: FloatArray, targets: FloatArray, ridge: float
) -> tuple[FloatArray, FloatArray]:
    """Ridge regression with an unpenalized intercept.

    Solves the d x d normal equations when there are at least as many rows
    as features and the n x n dual system otherwise.
    """
    if ridge <= 0:
        raise ConfigError(f"ridge strength must be > 0, got {ridge}")
    x_mean = features.mean(axis=0)
    y_mean = targets.mean(axis=0)
    x = features - x_mean
    y = targets - y_mean
    n, d = x.shape
    if n >= d:
        weights = solve(x.T @ x + ridge * np.eye(d), x.T @ y, assume_a="pos")
    else:
        dual = solve(x @ x.T + ridge * np.eye(n), y, assume_a="pos")
        weights = x.T @ dual
    return weights, y_mean - x_mean @ weights


def eval_sgc_ridge(
    source: CondensedGraph | Dataset,
    original: Dataset,
    K: int = DEFAULT_K,
    ridge: float = DEFAULT_RIDGE,
    rule: PropagationRule | None = None,
) -> EvalReport:
    start = perf_counter()
    train = training_graph(source)
    target = evaluation_graph(original)
    check_compatible(train, target)

    h_train = propagate_features(train.adjacency, train.features, K, rule)
    weights, bias = fit_ridge(
        h_train.last[train.rows], train.labels.one_hot[train.rows], ridge
    )

    h_eval = propagate_features(target.adjacency, target.features, K, rule)
    scores = h_eval.last[target.test_idx] @ weights + bias
    score = accuracy(
        scores.argmax(axis=1), target.labels.labels[target.test_idx]
    )
    elapsed = (perf_counter() - start) * 1000.0
    logger.info(f"SGC-ridge test accuracy {score:.4f} ({elapsed:.1f} ms)")
    return EvalReport(
        model="sgc_ridge", accuracies=[score], wall_clock_ms=[elapsed]
    )
