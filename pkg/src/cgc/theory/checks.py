"""Numerical checks of the matching identities and bounds behind
class-partition condensation, and of the closed-form feature solve.

Every check is a pure function of its inputs and returns a CheckReport;
`verify_props` draws a seeded suite of instances and runs all of them.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from typing import TYPE_CHECKING

import numpy as np
from scipy.linalg import solve

from cgc.condensers.partition import cluster_class
from cgc.condensers.structure import (
    condensed_operator,
    feature_objective,
    laplacian,
    solve_features,
)
from cgc.condensers.utils.config import DEFAULT_K, DEFAULT_SEED
from cgc.core.errors import ConfigError, NumericalError
from cgc.core.graph import SparseAdjacency
from cgc.theory.utils.config import (
    BOUND_NODES,
    BOUND_SUBCLASSES,
    BOUND_TOL,
    CHAIN_TOL,
    DEFAULT_DRAWS,
    FEATURE_ALPHAS,
    FEATURE_EDGE_PROB,
    FEATURE_NODES,
    GRADIENT_TOL,
    INSTANCE_ATTEMPTS,
    INSTANCE_CLASSES,
    INSTANCE_CONDENSED,
    INSTANCE_DIM,
    INSTANCE_NODES,
    INSTANCES_PER_CHECK,
    OBJECTIVE_TOL,
    PERTURBATION_SCALE,
    PERTURBATIONS,
    PROTOTYPE_TOL,
    PUSH_THROUGH_RIDGE,
    PUSH_THROUGH_TOL,
)
from cgc.theory.utils.types import CheckReport, RandomInstance

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from cgc.core.graph import FloatArray, IndexArray

logger = logging.getLogger()

_TINY = float(np.finfo(np.float64).tiny)


def mean_operator(labels: ArrayLike, num_classes: int) -> FloatArray:
    """Row i averages the nodes labelled i."""
    y = np.asarray(labels, dtype=np.int64)
    counts = np.bincount(y, minlength=num_classes)
    if np.any(counts == 0):
        raise ConfigError("every class needs at least one node")
    operator = np.zeros((num_classes, y.size))
    operator[y, np.arange(y.size)] = 1.0 / counts[y]
    return operator


def draw_thetas(
    rng: np.random.Generator, dim: int, num_classes: int, draws: int
) -> list[FloatArray]:
    """Relay parameters with unit-Gaussian entries."""
    return [rng.standard_normal((dim, num_classes)) for _ in range(draws)]


def random_instance(
    rng: np.random.Generator,
    num_nodes: int = INSTANCE_NODES,
    dim: int = INSTANCE_DIM,
    num_condensed: int = INSTANCE_CONDENSED,
    num_classes: int = INSTANCE_CLASSES,
    class_sizes: Sequence[int] | None = None,
) -> RandomInstance:
    """Gaussian Z and Z' redrawn until Z has full column rank and Z' Z'^T
    is invertible.
    """
    if class_sizes is not None:
        if len(class_sizes) != num_classes or min(class_sizes) < 1:
            raise ConfigError(
                f"need {num_classes} positive class sizes, got {class_sizes}"
            )
        num_nodes = int(sum(class_sizes))
        labels = np.repeat(np.arange(num_classes), class_sizes)
    else:
        labels = rng.permutation(np.arange(num_nodes) % num_classes)
    if not num_nodes > dim > num_condensed >= num_classes:
        raise ConfigError(
            "instances need n > d > n' >= c, got"
            f" n={num_nodes}, d={dim}, n'={num_condensed}, c={num_classes}"
        )

    for _ in range(INSTANCE_ATTEMPTS):
        Z = rng.standard_normal((num_nodes, dim))
        Z_prime = rng.standard_normal((num_condensed, dim))
        if (
            np.linalg.matrix_rank(Z) == dim
            and np.linalg.matrix_rank(Z_prime @ Z_prime.T) == num_condensed
        ):
            return RandomInstance(
                Z=Z,
                labels=labels.astype(np.int64),
                Z_prime=Z_prime,
                labels_prime=np.arange(num_condensed) % num_classes,
                theta=rng.standard_normal((dim, num_classes)),
                num_classes=num_classes,
            )
    raise NumericalError(
        "could not draw a full-rank instance",
        diagnostics={"attempts": INSTANCE_ATTEMPTS, "dim": dim},
    )


def check_parameter_matching(inst: RandomInstance) -> CheckReport:
    """||theta* - theta'*||^2 against its rewrites through the left inverse
    of Z, plus the push-through identity
    Z^T (Z Z^T + lam I)^-1 = (Z^T Z + lam I)^-1 Z^T.

    theta* is the least-squares fit on Z and theta'* the minimum-norm
    interpolant on Z'.
    """
    Z, Y, Z_prime, Y_prime = inst.Z, inst.Y, inst.Z_prime, inst.Y_prime
    n, d = Z.shape
    gram = Z.T @ Z
    left_inverse = solve(gram, Z.T, assume_a="pos")
    interpolant = solve(Z_prime @ Z_prime.T, Y_prime, assume_a="pos")

    theta_star = left_inverse @ Y
    theta_prime = Z_prime.T @ interpolant
    objective = float(np.sum((theta_star - theta_prime) ** 2))
    rewrites = (
        left_inverse @ Y - solve(gram, gram @ theta_prime, assume_a="pos"),
        left_inverse @ (Y - Z @ theta_prime),
        left_inverse @ (Y - Z @ Z_prime.T @ interpolant),
    )
    chain = max(
        abs(float(np.sum(r**2)) - objective) for r in rewrites
    ) / max(objective, _TINY)

    lam = PUSH_THROUGH_RIDGE
    lhs = solve(Z @ Z.T + lam * np.eye(n), Z, assume_a="pos").T
    rhs = solve(gram + lam * np.eye(d), Z.T, assume_a="pos")
    push = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))

    return CheckReport(
        name="parameter_matching",
        passed=chain <= CHAIN_TOL and push <= PUSH_THROUGH_TOL,
        residual=chain,
        tolerance=CHAIN_TOL,
        details={
            "objective": objective,
            "push_through": push,
            "push_through_tolerance": PUSH_THROUGH_TOL,
        },
    )


def check_prototype_matching(inst: RandomInstance) -> CheckReport:
    """||P'Z' - PZ||^2 equals the summed per-class differences of
    Z_i^T Y_i / |C_i|, relative to the scale of the prototypes.
    """
    c = inst.num_classes
    P = mean_operator(inst.labels, c)
    P_prime = mean_operator(inst.labels_prime, c)
    lhs = float(np.sum((P_prime @ inst.Z_prime - P @ inst.Z) ** 2))

    Y, Y_prime = inst.Y, inst.Y_prime
    rhs = 0.0
    for cls in range(c):
        rows = inst.labels == cls
        rows_prime = inst.labels_prime == cls
        original = inst.Z[rows].T @ Y[rows] / rows.sum()
        condensed = (
            inst.Z_prime[rows_prime].T @ Y_prime[rows_prime] / rows_prime.sum()
        )
        rhs += float(np.sum((original - condensed) ** 2))

    scale = float(np.sum((P @ inst.Z) ** 2))
    residual = abs(lhs - rhs) / max(lhs, rhs, scale, _TINY)
    return CheckReport(
        name="prototype_matching",
        passed=residual <= PROTOTYPE_TOL,
        residual=residual,
        tolerance=PROTOTYPE_TOL,
        details={"lhs": lhs, "rhs": rhs},
    )


def _class_moments(
    H: FloatArray, labels: IndexArray, num_classes: int, cls: int
) -> tuple[FloatArray, FloatArray]:
    """H_i^T H_i / |C_i| and H_i^T Y_i / |C_i| for class `cls`."""
    rows = np.flatnonzero(labels == cls)
    if rows.size == 0:
        raise ConfigError(f"class {cls} has no node")
    h = H[rows]
    y = np.eye(num_classes)[labels[rows]]
    return h.T @ h / rows.size, h.T @ y / rows.size


def check_gradient_matching_bound(
    H: ArrayLike,
    labels: ArrayLike,
    H_prime: ArrayLike,
    labels_prime: ArrayLike,
    num_classes: int,
    thetas: Iterable[FloatArray],
) -> CheckReport:
    """Per-class gradient matching of half-MSE relay losses is bounded by
    the prototype term plus the correlation term times ||theta||^2.

    Pass/fail uses that bound; the always-valid form with a factor 2 from
    ||a + b||^2 <= 2||a||^2 + 2||b||^2 is reported alongside.
    """
    h = np.asarray(H, dtype=np.float64)
    h_prime = np.asarray(H_prime, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    y_prime = np.asarray(labels_prime, dtype=np.int64)

    moments = [
        (
            _class_moments(h, y, num_classes, cls),
            _class_moments(h_prime, y_prime, num_classes, cls),
        )
        for cls in range(num_classes)
    ]
    prototype_term = sum(
        float(np.sum((proto - proto_p) ** 2))
        for (_, proto), (_, proto_p) in moments
    )
    correlation_term = sum(
        float(np.sum((corr - corr_p) ** 2))
        for (corr, _), (corr_p, _) in moments
    )

    draws = violations = safe_violations = 0
    worst = 0.0
    for theta in thetas:
        lhs = 0.0
        for (corr, proto), (corr_p, proto_p) in moments:
            gradient = corr @ theta - proto
            gradient_prime = corr_p @ theta - proto_p
            lhs += float(np.sum((gradient - gradient_prime) ** 2))
        rhs = prototype_term + correlation_term * float(np.sum(theta**2))
        slack = BOUND_TOL * max(1.0, rhs)
        violations += lhs > rhs + slack
        safe_violations += lhs > 2.0 * rhs + slack
        worst = max(worst, (lhs - rhs) / max(1.0, rhs))
        draws += 1

    return CheckReport(
        name="gradient_matching_bound",
        passed=violations == 0,
        residual=worst,
        tolerance=BOUND_TOL,
        draws=draws,
        details={
            "violations": violations,
            "safe_violations": safe_violations,
            "prototype_term": prototype_term,
            "correlation_term": correlation_term,
        },
    )


def check_aggregation_bound(
    H: ArrayLike,
    H_prime: ArrayLike,
    P_hat: ArrayLike,
    thetas: Iterable[FloatArray],
) -> CheckReport:
    """||H' theta - P H theta||^2 <= ||H' - P H||^2 ||theta||^2."""
    h = np.asarray(H, dtype=np.float64)
    h_prime = np.asarray(H_prime, dtype=np.float64)
    aggregation = np.asarray(P_hat, dtype=np.float64)
    gap = float(np.sum((h_prime - aggregation @ h) ** 2))

    draws = violations = 0
    worst = 0.0
    for theta in thetas:
        lhs = float(
            np.sum((h_prime @ theta - aggregation @ (h @ theta)) ** 2)
        )
        rhs = gap * float(np.sum(theta**2))
        violations += lhs > rhs + BOUND_TOL * max(1.0, rhs)
        worst = max(worst, (lhs - rhs) / max(1.0, rhs))
        draws += 1

    return CheckReport(
        name="aggregation_bound",
        passed=violations == 0,
        residual=worst,
        tolerance=BOUND_TOL,
        draws=draws,
        details={"violations": violations, "gap": gap},
    )


def check_feature_solve(
    H_prime: ArrayLike,
    adj: SparseAdjacency,
    alpha: float,
    K: int = DEFAULT_K,
    rng: np.random.Generator | None = None,
    perturbations: int = PERTURBATIONS,
) -> CheckReport:
    """The closed-form features zero the gradient
    2 Q^T (Q X - H') + 2 alpha L X and no nearby point, nor H' itself, has
    a lower objective.
    """
    rng = rng or np.random.default_rng(DEFAULT_SEED)
    h = np.asarray(H_prime, dtype=np.float64)
    features = solve_features(h, adj, alpha, K, jitter=0.0)
    Q = condensed_operator(adj, K)
    L = laplacian(adj)

    gradient = 2.0 * Q.T @ (Q @ features - h) + 2.0 * alpha * (L @ features)
    scale = float(np.linalg.norm(h))
    gradient_max = float(np.max(np.abs(gradient))) if gradient.size else 0.0

    optimum = feature_objective(features, h, Q, L, alpha)
    at_h = feature_objective(h, h, Q, L, alpha)
    floor = optimum - OBJECTIVE_TOL * max(1.0, optimum)
    beaten = sum(
        1
        for _ in range(perturbations)
        if feature_objective(
            features + PERTURBATION_SCALE * rng.standard_normal(h.shape),
            h,
            Q,
            L,
            alpha,
        )
        < floor
    )
    not_above_h = optimum <= at_h + OBJECTIVE_TOL * max(1.0, at_h)

    residual = gradient_max / max(scale, _TINY)
    return CheckReport(
        name=f"feature_solve[alpha={alpha:g}]",
        passed=residual <= GRADIENT_TOL and beaten == 0 and not_above_h,
        residual=residual,
        tolerance=GRADIENT_TOL,
        draws=perturbations,
        details={
            "gradient_max_abs": gradient_max,
            "objective": optimum,
            "objective_at_h": at_h,
            "perturbations_below": beaten,
        },
    )


def _merge(reports: Sequence[CheckReport]) -> CheckReport:
    """Worst case over repeated runs of one check."""
    worst = max(reports, key=lambda r: r.residual)
    details: dict[str, float] = {}
    for report in reports:
        for key, value in report.details.items():
            details[key] = max(details.get(key, value), value)
    return CheckReport(
        name=worst.name,
        passed=all(r.passed for r in reports),
        residual=worst.residual,
        tolerance=worst.tolerance,
        draws=sum(r.draws for r in reports),
        details=details,
    )


def _random_graph(rng: np.random.Generator, num_nodes: int) -> SparseAdjacency:
    rows, cols = np.triu_indices(num_nodes, k=1)
    keep = rng.random(rows.size) < FEATURE_EDGE_PROB
    return SparseAdjacency.from_edges(
        num_nodes, rows[keep], cols[keep], symmetrize=True
    )


def subclass_instance(
    rng: np.random.Generator,
    num_nodes: int = BOUND_NODES,
    dim: int = INSTANCE_DIM,
    num_classes: int = INSTANCE_CLASSES,
    subclasses: int = BOUND_SUBCLASSES,
) -> tuple[FloatArray, IndexArray, FloatArray, IndexArray]:
    """Gaussian classes and condensed nodes at their k-means centroids."""
    labels = np.arange(num_nodes) % num_classes
    centers = rng.standard_normal((num_classes, dim)) * 3.0
    H = centers[labels] + rng.standard_normal((num_nodes, dim))
    blocks = []
    for cls in range(num_classes):
        result = cluster_class(
            H[labels == cls], subclasses, seed=int(rng.integers(2**31 - 1))
        )
        blocks.append(result.centroids)
    H_prime = np.vstack(blocks)
    labels_prime = np.repeat(np.arange(num_classes), subclasses)
    return H, labels.astype(np.int64), H_prime, labels_prime


def verify_props(
    seed: int = DEFAULT_SEED, draws: int = DEFAULT_DRAWS
) -> list[CheckReport]:
    """Runs every check on instances drawn from `seed`."""
    rng = np.random.default_rng(seed)
    reports = [
        _merge(
            [
                check_parameter_matching(random_instance(rng))
                for _ in range(INSTANCES_PER_CHECK)
            ]
        ),
        _merge(
            [check_prototype_matching(random_instance(rng))]
            + [
                check_prototype_matching(
                    random_instance(rng, class_sizes=(7, 3))
                )
                for _ in range(INSTANCES_PER_CHECK)
            ]
        ),
    ]

    H, labels, H_prime, labels_prime = subclass_instance(rng)
    reports.append(
        check_gradient_matching_bound(
            H,
            labels,
            H_prime,
            labels_prime,
            INSTANCE_CLASSES,
            draw_thetas(rng, H.shape[1], INSTANCE_CLASSES, draws),
        )
    )

    assignments = cluster_class(
        H, BOUND_SUBCLASSES * INSTANCE_CLASSES, method="random", seed=seed
    ).assignments
    P_hat = mean_operator(assignments, BOUND_SUBCLASSES * INSTANCE_CLASSES)
    noise = rng.standard_normal((P_hat.shape[0], H.shape[1]))
    noisy = P_hat @ H + 0.1 * noise
    reports.append(
        check_aggregation_bound(
            H,
            noisy,
            P_hat,
            draw_thetas(rng, H.shape[1], INSTANCE_CLASSES, draws),
        )
    )

    for alpha in FEATURE_ALPHAS:
        adj = _random_graph(rng, FEATURE_NODES)
        reports.append(
            check_feature_solve(
                rng.standard_normal((FEATURE_NODES, INSTANCE_DIM)),
                adj,
                alpha,
                rng=rng,
            )
        )

    for report in reports:
        if not report.passed:
            logger.warning(
                f"Check {report.name} failed: residual {report.residual:.3e}"
                f" > {report.tolerance:.1e}"
            )
    return reports
