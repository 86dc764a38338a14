"""Two-layer GCN trained with analytic gradients and Adam.

Z = A_hat relu(A_hat X W1) W2, softmax cross-entropy on the training rows,
L2 weight decay on both weight matrices and dropout on the input of each
layer. The identity structure drops both A_hat products, which makes the
model an MLP on the condensed features.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from time import perf_counter
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
from scipy.special import log_softmax, softmax
from tqdm import tqdm

from cgc.core.errors import NumericalError
from cgc.core.graph import FloatArray, normalize
from cgc.evaluators.utils.config import (
    ADAM_BETA1,
    ADAM_BETA2,
    ADAM_EPS,
    SPARSE_INPUT_DENSITY,
)
from cgc.evaluators.utils.helpers import (
    accuracy,
    check_compatible,
    evaluation_graph,
    training_graph,
)
from cgc.evaluators.utils.types import EvalConfig, EvalReport, TrainingTrace

if TYPE_CHECKING:
    from cgc.core.graph import Dataset, IndexArray
    from cgc.core.types import CondensedGraph
    from cgc.evaluators.utils.helpers import EvaluationView, TrainingView

logger = logging.getLogger()

Operator = sp.csr_matrix | None
Inputs = FloatArray | sp.csr_matrix


@dataclass(eq=False)
class GCN2:
    w1: FloatArray
    w2: FloatArray

    @classmethod
    def glorot(
        cls,
        num_features: int,
        hidden: int,
        num_classes: int,
        rng: np.random.Generator,
    ) -> GCN2:
        def _uniform(fan_in: int, fan_out: int) -> FloatArray:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-limit, limit, size=(fan_in, fan_out))

        return cls(
            w1=_uniform(num_features, hidden),
            w2=_uniform(hidden, num_classes),
        )

    def copy(self) -> GCN2:
        return GCN2(w1=self.w1.copy(), w2=self.w2.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.w1**2) + np.sum(self.w2**2)))


@dataclass(eq=False)
class Adam:
    lr: float
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS
    steps: int = 0
    moments: list[tuple[FloatArray, FloatArray]] = field(default_factory=list)

    def step(self, params: list[FloatArray], grads: list[FloatArray]) -> None:
        """Updates `params` in place."""
        if not self.moments:
            self.moments = [
                (np.zeros_like(p), np.zeros_like(p)) for p in params
            ]
        self.steps += 1
        bias1 = 1.0 - self.beta1**self.steps
        bias2 = 1.0 - self.beta2**self.steps
        for param, grad, (m, v) in zip(
            params, grads, self.moments, strict=True
        ):
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad**2
            param -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)


def _apply(operator: Operator, x: FloatArray) -> FloatArray:
    if operator is None:
        return x
    return np.asarray(operator @ x)


def _inputs(features: FloatArray) -> Inputs:
    density = np.count_nonzero(features) / max(features.size, 1)
    if density < SPARSE_INPUT_DENSITY:
        return sp.csr_matrix(features)
    return features


def forward(model: GCN2, operator: Operator, features: Inputs) -> FloatArray:
    """Logits of every node, without dropout."""
    z1 = _apply(operator, np.asarray(features @ model.w1))
    return _apply(operator, np.maximum(z1, 0.0) @ model.w2)


def loss_and_gradients(
    model: GCN2,
    operator: Operator,
    features: Inputs,
    labels: IndexArray,
    rows: IndexArray,
    weight_decay: float,
    hidden_mask: FloatArray | None = None,
) -> tuple[float, FloatArray, FloatArray]:
    """Mean cross-entropy over `rows` plus (weight_decay / 2) ||W||^2, and
    its exact gradients with respect to W1 and W2.

    `features` already carry the input dropout; `hidden_mask` is the scaled
    dropout mask applied to relu(Z1).
    """
    z1 = _apply(operator, np.asarray(features @ model.w1))
    h1 = np.maximum(z1, 0.0)
    if hidden_mask is not None:
        h1 = h1 * hidden_mask
    z2 = _apply(operator, h1 @ model.w2)

    n = rows.size
    targets = labels[rows]
    logits = z2[rows]
    log_probs = log_softmax(logits, axis=1)
    penalty = 0.5 * weight_decay * (
        np.sum(model.w1**2) + np.sum(model.w2**2)
    )
    loss = float(-np.mean(log_probs[np.arange(n), targets]) + penalty)

    g2 = np.zeros_like(z2)
    g2[rows] = softmax(logits, axis=1)
    g2[rows, targets] -= 1.0
    g2 /= n
    # A_hat is symmetric
    s2 = _apply(operator, g2)
    grad_w2 = h1.T @ s2 + weight_decay * model.w2

    d_h1 = s2 @ model.w2.T
    if hidden_mask is not None:
        d_h1 = d_h1 * hidden_mask
    s1 = _apply(operator, d_h1 * (z1 > 0.0))
    grad_w1 = np.asarray(features.T @ s1) + weight_decay * model.w1
    return loss, grad_w1, grad_w2


def _dropout_inputs(
    features: Inputs, rate: float, rng: np.random.Generator
) -> Inputs:
    if rate == 0.0:
        return features
    keep = 1.0 - rate
    if sp.issparse(features):
        dropped = features.copy()
        dropped.data *= (rng.random(dropped.data.size) < keep) / keep
        return dropped
    return features * ((rng.random(features.shape) < keep) / keep)


def _dropout_mask(
    shape: tuple[int, int], rate: float, rng: np.random.Generator
) -> FloatArray | None:
    if rate == 0.0:
        return None
    keep = 1.0 - rate
    return (rng.random(shape) < keep) / keep


def _score(
    model: GCN2,
    operator: Operator,
    features: Inputs,
    target: EvaluationView,
    idx: IndexArray,
) -> float:
    predicted = forward(model, operator, features)[idx].argmax(axis=1)
    return accuracy(predicted, target.labels.labels[idx])


def _train_repeat(
    train: TrainingView,
    target: EvaluationView,
    cfg: EvalConfig,
    seed: np.random.SeedSequence,
    trace: TrainingTrace | None,
) -> float | None:
    """Test accuracy of the best-validation model, or None on divergence."""
    rng = np.random.default_rng(seed)
    num_nodes, num_features = train.features.shape
    model = GCN2.glorot(
        num_features, cfg.hidden, train.labels.num_classes, rng
    )
    optimizer = Adam(cfg.lr)

    train_op = (
        None if train.adjacency is None else normalize(train.adjacency).matrix
    )
    eval_op = normalize(target.adjacency).matrix
    x_train = _inputs(train.features)
    x_eval = _inputs(target.features)

    select = target.val_idx.size > 0
    best = model.copy()
    best_val = (
        _score(model, eval_op, x_eval, target, target.val_idx)
        if select
        else -1.0
    )
    for _ in range(cfg.epochs):
        loss, grad_w1, grad_w2 = loss_and_gradients(
            model,
            train_op,
            _dropout_inputs(x_train, cfg.dropout, rng),
            train.labels.labels,
            train.rows,
            cfg.weight_decay,
            _dropout_mask((num_nodes, cfg.hidden), cfg.dropout, rng),
        )
        if not np.isfinite(loss):
            return None
        optimizer.step([model.w1, model.w2], [grad_w1, grad_w2])

        val = (
            _score(model, eval_op, x_eval, target, target.val_idx)
            if select
            else 0.0
        )
        if not select or val > best_val:
            best_val, best = val, model.copy()
        if trace is not None:
            trace.losses.append(loss)
            trace.val_accuracies.append(val)
            trace.weight_norms.append(model.norm())

    return _score(best, eval_op, x_eval, target, target.test_idx)


def train_gcn2(
    source: CondensedGraph | Dataset,
    original: Dataset,
    cfg: EvalConfig | None = None,
    *,
    trace: bool = False,
) -> EvalReport:
    """Trains `cfg.repeats` GCNs on `source` and tests them on `original`.

    Repeat i is seeded from SeedSequence([cfg.seed, i]). A repeat whose
    loss turns non-finite is dropped from the mean and flagged.
    """
    cfg = cfg or EvalConfig()
    train = training_graph(source)
    target = evaluation_graph(original)
    check_compatible(train, target)

    accuracies: list[float] = []
    wall_clock: list[float] = []
    flags: list[str] = []
    traces: list[TrainingTrace] = []
    for repeat in tqdm(range(cfg.repeats), desc="GCN repeats", leave=False):
        start = perf_counter()
        repeat_trace = TrainingTrace() if trace else None
        result = _train_repeat(
            train,
            target,
            cfg,
            np.random.SeedSequence([cfg.seed, repeat]),
            repeat_trace,
        )
        wall_clock.append((perf_counter() - start) * 1000.0)
        if repeat_trace is not None:
            traces.append(repeat_trace)
        if result is None:
            message = f"repeat {repeat} diverged (non-finite loss)"
            logger.warning(message)
            flags.append(message)
            continue
        accuracies.append(result)

    if not accuracies:
        raise NumericalError(
            "every GCN repeat diverged",
            diagnostics={"repeats": cfg.repeats, "lr": cfg.lr},
        )
    report = EvalReport(
        model="gcn2",
        accuracies=accuracies,
        wall_clock_ms=wall_clock,
        failures=len(flags),
        flags=flags,
        traces=traces if trace else None,
    )
    logger.info(
        f"GCN test accuracy {report.mean:.4f} +- {report.std:.4f}"
        f" over {len(accuracies)} repeats"
    )
    return report
