"""The condensation pipeline.

propagate -> fit_probe -> augment -> plan_labels -> per-class clustering ->
aggregate -> identity structure, or cosine adjacency plus the closed-form
feature solve.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from time import perf_counter

from cgc.condensers.assessment import fit_probe
from cgc.condensers.augmentation import augment
from cgc.condensers.partition import (
    aggregate,
    partition_pool,
    plan_labels,
    resolve_num_condensed,
)
from cgc.condensers.propagation import propagate
from cgc.condensers.structure import (
    build_adjacency,
    make_graphless,
    solve_features,
)
from cgc.condensers.utils.types import PipelineConfig
from cgc.core.graph import Dataset, LabeledNodes, induced_subgraph
from cgc.core.types import (
    CondensedArtifact,
    CondensedGraph,
    ProvenanceRecord,
    StructureParams,
)

logger = logging.getLogger()


@contextmanager
def _timed(timings: dict[str, float], stage: str) -> Iterator[None]:
    start = perf_counter()
    yield
    timings[stage] = (perf_counter() - start) * 1000.0


def condensation_input(ds: Dataset) -> Dataset:
    """Inductive datasets are condensed from their train-induced subgraph."""
    if ds.task == "inductive":
        return induced_subgraph(ds, ds.train_idx)
    return ds


def condense(ds: Dataset, cfg: PipelineConfig) -> CondensedArtifact:
    timings: dict[str, float] = {}
    warnings: list[str] = []
    start = perf_counter()

    source = condensation_input(ds)
    train_idx = source.train_idx
    num_classes = source.num_classes

    with _timed(timings, "propagate"):
        stack = propagate(source, cfg.K, cfg.propagation_rule)
    with _timed(timings, "assess"):
        assessment = fit_probe(stack, source.labels, train_idx)
    with _timed(timings, "augment"):
        pool = augment(
            stack,
            assessment,
            source.labels,
            train_idx,
            cfg.p,
            cfg.seed,
        )
        warnings.extend(pool.warnings)

    with _timed(timings, "partition"):
        num_condensed = cfg.num_condensed or resolve_num_condensed(
            cfg.ratio, source.num_nodes, train_idx.size, num_classes
        )
        label_plan = plan_labels(
            source.labels.labels[train_idx], num_classes, num_condensed
        )
        assignments = partition_pool(
            pool, label_plan, cfg.method, cfg.seed, cfg.workers
        )
    with _timed(timings, "aggregate"):
        plan = aggregate(pool, label_plan, assignments, cfg.tau, cfg.mode)
        warnings.extend(plan.warnings)

    y_prime = LabeledNodes(plan.labels, num_classes)
    with _timed(timings, "structure"):
        if cfg.structure == "identity":
            graph = make_graphless(plan.embeddings, y_prime)
        else:
            adjacency = build_adjacency(plan.embeddings, cfg.threshold)
            features = solve_features(
                plan.embeddings, adjacency, cfg.alpha, cfg.K, cfg.jitter
            )
            params: StructureParams = {
                "threshold": cfg.threshold,
                "alpha": cfg.alpha,
                "K": cfg.K,
            }
            if cfg.jitter is not None:
                params["jitter"] = cfg.jitter
            graph = CondensedGraph(
                labels=y_prime,
                features=features,
                adjacency=adjacency,
                gen_params=params,
            )
    timings["total"] = (perf_counter() - start) * 1000.0

    logger.info(
        f"Condensed '{ds.name}' to {graph.num_nodes} nodes"
        f" ({cfg.preset}, {timings['total']:.1f} ms)"
    )
    provenance = ProvenanceRecord(
        config=cfg.model_dump(mode="json"),
        seed=cfg.seed,
        preset=cfg.preset,
        timings_ms=timings,
        warnings=warnings,
        structure=graph.structure,
        num_condensed_nodes=graph.num_nodes,
        source_dataset=ds.name,
    )
    return CondensedArtifact(graph=graph, provenance=provenance)
