"""
Layer weakening: RemoveEdge, ReduceEdge and ReduceWeight, plus the background
density estimate that sets how much ReduceEdge and ReduceWeight keep.

Only edges internal to a community of the weakened partition are touched;
cross-community edges pass through unchanged.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateEstimateError, ParameterError
from .graph import Graph, Partition
from .seeding import STREAM_REDUCE, derive_seed, row_uniforms

logger = logging.getLogger(__name__)


class WeakenMethod(Enum):
    REMOVE_EDGE = "remove"
    REDUCE_EDGE = "reduce-edge"
    REDUCE_WEIGHT = "reduce-weight"


class ReduceFactorRule(Enum):
    """Which keep-fraction formula ReduceEdge / ReduceWeight use."""
    BACKGROUND_RATIO = "background"
    THM3 = "thm3"
    THM4 = "thm4"


@dataclass(frozen=True)
class DensityEstimate:
    p_hat: float
    q_hat: float
    p_true: float

    @classmethod
    def from_observed(cls, p_hat: float, q_hat: float) -> "DensityEstimate":
        if q_hat >= 1.0:
            raise DegenerateEstimateError("background density is 1; the grounded probability is undefined")
        return cls(p_hat, q_hat, (p_hat - q_hat) / (1.0 - q_hat))


def _internal_mask(g: Graph, p: Partition) -> np.ndarray:
    p.check_covers(g)
    labels = p.labels
    return labels[g.sources] == labels[g.targets]


def estimate_densities(g: Graph, p: Partition) -> DensityEstimate:
    """
    Observed internal density p_hat and cross density q_hat of a partition.

    Internal pairs are counted as sum_i s_i^2 / 2 (self pairs at half weight),
    cross pairs as (n^2 - sum_i s_i^2) / 2.
    """
    p.check_covers(g)
    if p.num_communities < 2:
        raise DegenerateEstimateError("density estimation needs at least two communities")
    sizes = p.sizes().astype(np.float64)
    n = float(p.node_count)
    internal_pairs = float(np.sum(sizes * sizes)) / 2.0
    cross_pairs = (n * n - 2.0 * internal_pairs) / 2.0
    if internal_pairs <= 0.0 or cross_pairs <= 0.0:
        raise DegenerateEstimateError("partition has no internal or no cross pairs")
    inside = _internal_mask(g, p)
    internal_weight = float(g.weights[inside].sum())
    cross_weight = float(g.weights[~inside].sum())
    p_hat = min(internal_weight / internal_pairs, 1.0)
    q_hat = min(cross_weight / cross_pairs, 1.0)
    return DensityEstimate.from_observed(p_hat, q_hat)


def keep_fraction(d: DensityEstimate, rule: ReduceFactorRule) -> float:
    """Fraction of internal edges (or weight) to keep, clamped to [0, 1]."""
    if rule is ReduceFactorRule.BACKGROUND_RATIO:
        if d.p_hat <= 0.0:
            return 1.0
        f = d.q_hat / d.p_hat
    elif rule is ReduceFactorRule.THM3:
        f = (1.0 - d.p_hat) / (1.0 - d.q_hat)
    elif rule is ReduceFactorRule.THM4:
        f = (d.p_hat - d.q_hat) / (1.0 - d.q_hat)
    else:
        raise ParameterError(f"unknown reduce-factor rule {rule!r}")
    return min(max(f, 0.0), 1.0)


def _resolve_keep(g: Graph, p: Partition, rule: ReduceFactorRule, keep: Optional[float]) -> float:
    if keep is None:
        f = keep_fraction(estimate_densities(g, p), rule)
    else:
        if not 0.0 <= keep <= 1.0:
            raise ParameterError(f"keep fraction must lie in [0, 1], got {keep}")
        f = float(keep)
    return f


def remove_edge(g: Graph, p: Partition) -> Graph:
    """Drop every edge internal to a community of ``p``."""
    return g.select(~_internal_mask(g, p))


def reduce_edge(g: Graph, p: Partition, rule: ReduceFactorRule = ReduceFactorRule.BACKGROUND_RATIO,
                seed: int = 0, keep: Optional[float] = None) -> Graph:
    """
    Keep each internal edge independently with probability f.

    f comes from ``keep_fraction`` unless ``keep`` forces it. The draw for edge
    (u, v) is keyed on (seed, u, v). Weights of kept edges are unchanged.
    """
    f = _resolve_keep(g, p, rule, keep)
    inside = _internal_mask(g, p)
    if f >= 1.0:
        return g.select(np.ones(g.edge_count, dtype=bool))
    if f <= 0.0:
        return g.select(~inside)
    keep_mask = ~inside
    idx = np.flatnonzero(inside)
    if len(idx):
        u, v = g.sources[idx], g.targets[idx]
        draws = np.empty(len(idx), dtype=np.float64)
        for row in np.unique(u).tolist():
            sel = u == row
            draws[sel] = row_uniforms(seed, STREAM_REDUCE, row, g.node_count)[v[sel]]
        keep_mask = keep_mask.copy()
        keep_mask[idx] = draws < f
    logger.debug("reduce_edge: keep fraction %.4f, kept %d of %d internal edges",
                 f, int(keep_mask[idx].sum()) if len(idx) else 0, len(idx))
    return g.select(keep_mask)


def reduce_weight(g: Graph, p: Partition, rule: ReduceFactorRule = ReduceFactorRule.BACKGROUND_RATIO,
                  keep: Optional[float] = None) -> Graph:
    """Multiply the weight of every internal edge by f; edges reaching 0 disappear."""
    f = _resolve_keep(g, p, rule, keep)
    inside = _internal_mask(g, p)
    weights = np.where(inside, g.weights * f, g.weights)
    return g.reweighted(weights)


def weaken(g: Graph, p: Partition, method: WeakenMethod,
           rule: ReduceFactorRule = ReduceFactorRule.BACKGROUND_RATIO,
           seed: int = 0, keep: Optional[float] = None) -> Graph:
    """Apply one weakening method to the communities of ``p``."""
    if method is WeakenMethod.REMOVE_EDGE:
        return remove_edge(g, p)
    if method is WeakenMethod.REDUCE_EDGE:
        return reduce_edge(g, p, rule, seed, keep)
    if method is WeakenMethod.REDUCE_WEIGHT:
        return reduce_weight(g, p, rule, keep)
    raise ParameterError(f"unknown weakening method {method!r}")


def weaken_layers(g: Graph, layers: Sequence[Partition], method: WeakenMethod,
                  rule: ReduceFactorRule = ReduceFactorRule.BACKGROUND_RATIO, seed: int = 0) -> Graph:
    """
    Weaken several layers one after another in index order.

    Density estimates are taken on each intermediate residual; layer ``i``
    uses a seed derived from (seed, i).
    """
    residual = g
    for i, layer in enumerate(layers):
        residual = weaken(residual, layer, method, rule, derive_seed(seed, i))
    return residual
