"""
Graph and Partition types shared by every other module.

Graphs are undirected and weighted, with optional self-loops. Unweighted graphs
are simply graphs whose weights are all 1.0. Both types are immutable once
built: weakening procedures return new graphs.
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GraphFormatError, ParameterError, PartitionMismatchError


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Graph:
    """
    Undirected weighted graph on nodes 0..n-1.

    Edges are stored once as (u, v) with u <= v, sorted lexicographically, in
    three parallel arrays. A pair may appear only once; an edge of weight 0 is
    treated as absent and dropped.
    """

    __slots__ = ("_n", "_u", "_v", "_w", "_index")

    def __init__(self, node_count: int, edges: Iterable[Sequence[float]] = ()):
        if int(node_count) != node_count or node_count < 1:
            raise ParameterError(f"node_count must be a positive integer, got {node_count!r}")
        n = int(node_count)

        seen: Dict[Tuple[int, int], float] = {}
        for edge in edges:
            if len(edge) == 2:
                u, v = edge
                w = 1.0
            elif len(edge) == 3:
                u, v, w = edge
            else:
                raise GraphFormatError(f"edge must be (u, v) or (u, v, weight), got {edge!r}")
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) has a node outside [0, {n})")
            if not (np.isfinite(w) and w >= 0.0):
                raise GraphFormatError(f"edge ({u}, {v}) has a negative or non-finite weight {w}")
            key = (u, v) if u <= v else (v, u)
            if key in seen:
                raise GraphFormatError(f"duplicate edge {key}")
            seen[key] = w

        pairs = sorted(k for k, w in seen.items() if w > 0.0)
        u_arr = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
        v_arr = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
        w_arr = np.fromiter((seen[p] for p in pairs), dtype=np.float64, count=len(pairs))
        self._init(n, u_arr, v_arr, w_arr)

    def _init(self, n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> None:
        self._n = n
        self._u = _readonly(u)
        self._v = _readonly(v)
        self._w = _readonly(w)
        self._index: Optional[Dict[Tuple[int, int], int]] = None

    @classmethod
    def from_arrays(cls, node_count: int, u: np.ndarray, v: np.ndarray, w: Optional[np.ndarray] = None) -> "Graph":
        """
        Build a graph from endpoint arrays.

        Pairs are canonicalised to u <= v and sorted; duplicates raise. This is
        the fast path used by the generator.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.ones(len(u), dtype=np.float64) if w is None else np.asarray(w, dtype=np.float64)
        if not (len(u) == len(v) == len(w)):
            raise GraphFormatError("endpoint and weight arrays differ in length")
        n = int(node_count)
        if n < 1:
            raise ParameterError(f"node_count must be positive, got {node_count}")
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise GraphFormatError(f"edge endpoint outside [0, {n})")
        if len(w) and not np.all(np.isfinite(w) & (w >= 0.0)):
            raise GraphFormatError("negative or non-finite edge weight")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        keep = w > 0.0
        lo, hi, w = lo[keep], hi[keep], w[keep]
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if len(lo) > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise GraphFormatError("duplicate edge in edge arrays")
        graph = cls.__new__(cls)
        graph._init(n, lo.copy(), hi.copy(), w.copy())
        return graph

    def _derive(self, mask: np.ndarray, weights: Optional[np.ndarray] = None) -> "Graph":
        # Subsets of an already-canonical edge list stay canonical.
        w = self._w[mask] if weights is None else weights[mask]
        u, v = self._u[mask], self._v[mask]
        nonzero = w > 0.0
        graph = Graph.__new__(Graph)
        graph._init(self._n, u[nonzero].copy(), v[nonzero].copy(), w[nonzero].copy())
        return graph

    # -- accessors --------------------------------------------------------

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return len(self._u)

    @property
    def sources(self) -> np.ndarray:
        return self._u

    @property
    def targets(self) -> np.ndarray:
        return self._v

    @property
    def weights(self) -> np.ndarray:
        return self._w

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        for u, v, w in zip(self._u.tolist(), self._v.tolist(), self._w.tolist()):
            yield u, v, w

    def _lookup(self) -> Dict[Tuple[int, int], int]:
        if self._index is None:
            self._index = {(u, v): i for i, (u, v) in enumerate(zip(self._u.tolist(), self._v.tolist()))}
        return self._index

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if u <= v else (v, u)
        return key in self._lookup()

    def weight(self, u: int, v: int) -> float:
        """Weight of edge {u, v}, 0.0 when absent."""
        key = (u, v) if u <= v else (v, u)
        idx = self._lookup().get(key)
        return 0.0 if idx is None else float(self._w[idx])

    def total_weight(self) -> float:
        return float(self._w.sum())

    def strength(self) -> np.ndarray:
        """Weighted degree of every node; a self-loop counts twice."""
        return (np.bincount(self._u, weights=self._w, minlength=self._n)
                + np.bincount(self._v, weights=self._w, minlength=self._n))

    # -- derived graphs ----------------------------------------------------

    def select(self, mask: np.ndarray) -> "Graph":
        """New graph keeping only the edges where ``mask`` is true."""
        return self._derive(np.asarray(mask, dtype=bool))

    def reweighted(self, weights: np.ndarray) -> "Graph":
        """New graph with per-edge weights replaced; zero-weight edges are dropped."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != self._w.shape:
            raise GraphFormatError("weight array does not match edge count")
        if not np.all(np.isfinite(weights) & (weights >= 0.0)):
            raise GraphFormatError("negative or non-finite edge weight")
        return self._derive(np.ones(len(weights), dtype=bool), weights)

    def scaled(self, factor: float) -> "Graph":
        if not factor > 0:
            raise ParameterError(f"scale factor must be positive, got {factor}")
        return self.reweighted(self._w * factor)

    def to_networkx(self):
        """Export as a ``networkx.Graph`` with a ``weight`` edge attribute."""
        import networkx as nx

        nxg = nx.Graph()
        nxg.add_nodes_from(range(self._n))
        nxg.add_weighted_edges_from(self.edges())
        return nxg

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self._n == other._n
                and np.array_equal(self._u, other._u)
                and np.array_equal(self._v, other._v)
                and np.array_equal(self._w, other._w))

    def __hash__(self) -> int:
        return hash((self._n, self.edge_count, self.total_weight()))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, edges={self.edge_count}, weight={self.total_weight():g})"


class Partition:
    """
    Total assignment of nodes 0..n-1 to disjoint communities 0..k-1.

    Every community id below k must be used. ``Partition.from_labels`` accepts
    arbitrary labels and compacts them in order of first appearance.
    """

    __slots__ = ("_labels", "_k")

    def __init__(self, assignment: Sequence[int]):
        labels = np.asarray(assignment, dtype=np.int64)
        if labels.ndim != 1 or len(labels) == 0:
            raise ParameterError("partition needs a non-empty one-dimensional assignment")
        if labels.min() < 0:
            raise ParameterError("community ids must be non-negative")
        k = int(labels.max()) + 1
        if np.count_nonzero(np.bincount(labels, minlength=k)) != k:
            raise ParameterError("community ids must be contiguous 0..k-1 with no empty community")
        self._labels = _readonly(labels.copy())
        self._k = k

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        labels = np.asarray(labels)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        return cls(rank[inverse.ravel()])

    @classmethod
    def from_communities(cls, node_count: int, communities: Iterable[Iterable[int]]) -> "Partition":
        labels = np.full(node_count, -1, dtype=np.int64)
        for cid, members in enumerate(communities):
            for v in members:
                if labels[v] != -1:
                    raise ParameterError(f"node {v} appears in two communities")
                labels[v] = cid
        if np.any(labels < 0):
            raise PartitionMismatchError("communities do not cover every node")
        return cls.from_labels(labels)

    @classmethod
    def single(cls, node_count: int) -> "Partition":
        return cls(np.zeros(node_count, dtype=np.int64))

    @classmethod
    def singletons(cls, node_count: int) -> "Partition":
        return cls(np.arange(node_count, dtype=np.int64))

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def node_count(self) -> int:
        return len(self._labels)

    @property
    def num_communities(self) -> int:
        return self._k

    def sizes(self) -> np.ndarray:
        return np.bincount(self._labels, minlength=self._k)

    def members(self, community: int) -> List[int]:
        return np.flatnonzero(self._labels == community).tolist()

    def communities(self) -> List[List[int]]:
        return [self.members(c) for c in range(self._k)]

    def check_covers(self, graph: Graph) -> None:
        if self.node_count != graph.node_count:
            raise PartitionMismatchError(
                f"partition covers {self.node_count} nodes but graph has {graph.node_count}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self._labels, other._labels)

    def __hash__(self) -> int:
        return hash(self._labels.tobytes())

    def __repr__(self) -> str:
        return f"Partition(n={self.node_count}, communities={self._k})"


@dataclass(frozen=True)
class CommunityStats:
    internal_weight: float
    outgoing_weight: float

    @property
    def degree(self) -> float:
        return 2.0 * self.internal_weight + self.outgoing_weight


def total_weight(g: Graph) -> float:
    """Sum of edge weights; a self-loop contributes its weight once."""
    return g.total_weight()


def community_weights(g: Graph, labels: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised per-community (internal, outgoing) weights for a label array.

    Labels may leave some ids below ``k`` unused; those communities get zeros.
    """
    cu = labels[g.sources]
    cv = labels[g.targets]
    inside = cu == cv
    w = g.weights
    e_in = np.bincount(cu[inside], weights=w[inside], minlength=k)
    crossing = ~inside
    e_out = (np.bincount(cu[crossing], weights=w[crossing], minlength=k)
             + np.bincount(cv[crossing], weights=w[crossing], minlength=k))
    return e_in, e_out


def community_stats(g: Graph, p: Partition) -> List[CommunityStats]:
    """Per-community internal weight, outgoing weight and degree (d = 2 e_in + e_out)."""
    p.check_covers(g)
    e_in, e_out = community_weights(g, p.labels, p.num_communities)
    return [CommunityStats(float(a), float(b)) for a, b in zip(e_in, e_out)]
