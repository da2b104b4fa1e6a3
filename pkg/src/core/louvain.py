"""
Louvain modularity optimisation: local moving plus aggregation.

The node visit order is a seeded shuffle on every pass. A node moves to the
neighbouring community with the largest modularity gain (lowest id on ties)
only when that beats staying put by more than ``min_gain``. Once aggregation
stops improving, a last local-moving phase runs on the original nodes so the
returned partition is locally optimal with respect to single-node moves.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .errors import ParameterError, UndefinedModularityError
from .graph import Graph, Partition
from .seeding import seed_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LouvainConfig:
    seed: int = 0
    min_gain: float = 1e-7
    max_passes: int = 100

    def __post_init__(self):
        if isinstance(self.seed, bool) or int(self.seed) != self.seed:
            raise ParameterError(f"seed must be an integer, got {self.seed!r}")
        if not self.min_gain > 0:
            raise ParameterError(f"min_gain must be positive, got {self.min_gain}")
        if int(self.max_passes) != self.max_passes or self.max_passes < 1:
            raise ParameterError(f"max_passes must be a positive integer, got {self.max_passes}")


class _Level:
    """Weighted graph at one aggregation level: adjacency without self-loops plus self-loop weights."""

    __slots__ = ("neighbors", "self_loops", "strength")

    def __init__(self, neighbors: List[Dict[int, float]], self_loops: List[float]):
        self.neighbors = neighbors
        self.self_loops = self_loops
        self.strength = [sum(nbrs.values()) + 2.0 * loop for nbrs, loop in zip(neighbors, self_loops)]

    @classmethod
    def from_graph(cls, g: Graph) -> "_Level":
        neighbors: List[Dict[int, float]] = [dict() for _ in range(g.node_count)]
        self_loops = [0.0] * g.node_count
        for u, v, w in g.edges():
            if u == v:
                self_loops[u] += w
            else:
                neighbors[u][v] = neighbors[u].get(v, 0.0) + w
                neighbors[v][u] = neighbors[v].get(u, 0.0) + w
        return cls(neighbors, self_loops)

    def __len__(self) -> int:
        return len(self.neighbors)

    def aggregate(self, comm: List[int], k: int) -> "_Level":
        neighbors: List[Dict[int, float]] = [dict() for _ in range(k)]
        self_loops = [0.0] * k
        for i, nbrs in enumerate(self.neighbors):
            ci = comm[i]
            self_loops[ci] += self.self_loops[i]
            for j, w in nbrs.items():
                if j < i:
                    continue
                cj = comm[j]
                if ci == cj:
                    self_loops[ci] += w
                else:
                    neighbors[ci][cj] = neighbors[ci].get(cj, 0.0) + w
                    neighbors[cj][ci] = neighbors[cj].get(ci, 0.0) + w
        return _Level(neighbors, self_loops)


def _compact(comm: List[int]) -> Tuple[List[int], int]:
    mapping: Dict[int, int] = {}
    out = [mapping.setdefault(c, len(mapping)) for c in comm]
    return out, len(mapping)


def _move_nodes(level: _Level, comm: List[int], rng: np.random.Generator,
                cfg: LouvainConfig, m2: float) -> Tuple[List[int], bool]:
    """
    Repeated local-moving passes until a pass moves nothing.

    Gains are in units of m * dQ (m = total weight): moving node i with
    strength k_i into community c gains k_i,c - tot_c * k_i / 2m relative to
    leaving it isolated.
    """
    n = len(level)
    comm = list(comm)
    tot = [0.0] * n
    for node, c in enumerate(comm):
        tot[c] += level.strength[node]
    threshold = cfg.min_gain * m2 / 2.0
    moved_any = False

    for _ in range(cfg.max_passes):
        moves = 0
        for node in rng.permutation(n).tolist():
            own = comm[node]
            k_i = level.strength[node]
            links: Dict[int, float] = {}
            for nb, w in level.neighbors[node].items():
                c = comm[nb]
                links[c] = links.get(c, 0.0) + w
            tot[own] -= k_i
            stay = links.get(own, 0.0) - tot[own] * k_i / m2

            best, best_gain = own, None
            for c in sorted(links):
                if c == own:
                    continue
                gain = links[c] - tot[c] * k_i / m2
                if best_gain is None or gain > best_gain:
                    best, best_gain = c, gain
            if best_gain is None or best_gain - stay <= threshold:
                best = own
            tot[best] += k_i
            if best != own:
                comm[node] = best
                moves += 1
        if moves == 0:
            break
        moved_any = True
    else:
        logger.warning("local moving stopped after max_passes=%d without converging", cfg.max_passes)
    return comm, moved_any


def detect(g: Graph, cfg: LouvainConfig) -> Partition:
    """Run Louvain on ``g`` and return the partition of its original nodes."""
    m = g.total_weight()
    if m <= 0.0:
        raise UndefinedModularityError(f"cannot detect communities on an edgeless graph ({g!r})")
    m2 = 2.0 * m
    rng = seed_rng(cfg.seed)

    base = _Level.from_graph(g)
    membership = list(range(g.node_count))
    level = base
    depth = 0
    while True:
        comm, moved = _move_nodes(level, list(range(len(level))), rng, cfg, m2)
        if not moved:
            break
        comm, k = _compact(comm)
        membership = [comm[c] for c in membership]
        depth += 1
        if k == len(level):
            break
        level = level.aggregate(comm, k)

    membership, polished = _move_nodes(base, membership, rng, cfg, m2)
    result = Partition.from_labels(membership)
    logger.debug("louvain seed=%d: %d levels, %d communities%s", cfg.seed, depth,
                 result.num_communities, " (polished)" if polished else "")
    return result
