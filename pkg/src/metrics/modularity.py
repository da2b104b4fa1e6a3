"""
Community and partition modularity, always weighted.

Q_i = e_in_i / e - (d_i / 2e)^2 and Q = sum_i Q_i, where e is the total edge
weight and d_i = 2 e_in_i + e_out_i.
"""
from typing import Sequence

import numpy as np

from src.core.errors import ParameterError, UndefinedModularityError
from src.core.graph import CommunityStats, Graph, Partition, community_weights


def _total(g: Graph) -> float:
    e = g.total_weight()
    if e <= 0.0:
        raise UndefinedModularityError(f"modularity is undefined on a graph without edge weight ({g!r})")
    return e


def _terms(e_in: np.ndarray, e_out: np.ndarray, e: float) -> np.ndarray:
    d = 2.0 * e_in + e_out
    return e_in / e - (d / (2.0 * e)) ** 2


def community_modularity(g: Graph, p: Partition, i: int) -> float:
    p.check_covers(g)
    if not 0 <= i < p.num_communities:
        raise ParameterError(f"community {i} outside 0..{p.num_communities - 1}")
    e = _total(g)
    e_in, e_out = community_weights(g, p.labels, p.num_communities)
    return float(_terms(e_in[i:i + 1], e_out[i:i + 1], e)[0])


def partition_modularity(g: Graph, p: Partition) -> float:
    p.check_covers(g)
    return labels_modularity(g, p.labels, p.num_communities)


def labels_modularity(g: Graph, labels: np.ndarray, k: int = 0) -> float:
    """
    Modularity of a raw label array; ids need not be contiguous.

    Terms are summed in community-id order so repeated calls are bitwise equal.
    """
    e = _total(g)
    k = max(int(k), int(labels.max()) + 1)
    e_in, e_out = community_weights(g, labels, k)
    return float(np.sum(_terms(e_in, e_out, e)))


def batch_modularity(g: Graph, label_rows: Sequence[np.ndarray]) -> np.ndarray:
    """Modularity of many label arrays on one graph."""
    e = _total(g)
    strength = g.strength()
    u, v, w = g.sources, g.targets, g.weights
    out = np.empty(len(label_rows), dtype=np.float64)
    for idx, labels in enumerate(label_rows):
        k = int(labels.max()) + 1
        cu = labels[u]
        inside = cu == labels[v]
        e_in = np.bincount(cu[inside], weights=w[inside], minlength=k)
        d = np.bincount(labels, weights=strength, minlength=k)
        out[idx] = float(np.sum(e_in / e - (d / (2.0 * e)) ** 2))
    return out


def layer_modularity_eq3(stats: Sequence[CommunityStats], num_communities: int) -> float:
    """
    Layer modularity in the balanced-layer form Q = 1 - 1/n_l - sum e_out / sum d.

    Equals ``partition_modularity`` exactly when every community has the same
    degree and approximately otherwise.
    """
    e_out = sum(s.outgoing_weight for s in stats)
    d = sum(s.degree for s in stats)
    if d <= 0.0:
        raise UndefinedModularityError("layer carries no edge weight")
    return 1.0 - 1.0 / num_communities - e_out / d
