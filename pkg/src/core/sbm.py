"""
Multi-layer stochastic block model.

Each layer partitions all n nodes into n_l equal communities of size n / n_l.
A pair of nodes receives an edge with probability 1 - prod_l (1 - p_l) over
the layers in which the pair shares a community, and never otherwise. A self
pair is sampled at half that probability so that a community of size s
carries s^2 / 2 pairs in expectation, the convention the closed forms use.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ParameterError
from .graph import Graph, Partition, community_weights
from .seeding import STREAM_EDGES, STREAM_PLANT, rng_for, row_uniforms

logger = logging.getLogger(__name__)


class Placement(Enum):
    """How layers after the first lay their communities over the nodes."""
    STRIPED = "striped"
    INTERLEAVED = "interleaved"
    RANDOM_BALANCED = "random-balanced"


@dataclass(frozen=True)
class LayerSpec:
    num_communities: int
    edge_prob: float

    def __post_init__(self):
        if int(self.num_communities) != self.num_communities or self.num_communities < 2:
            raise ParameterError(f"a layer needs at least 2 communities, got {self.num_communities}")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise ParameterError(f"edge probability must lie in [0, 1], got {self.edge_prob}")
        if self.num_communities < 3:
            logger.debug("layer with %d communities is below the model's usual minimum of 3",
                         self.num_communities)

    @classmethod
    def parse(cls, text: str) -> "LayerSpec":
        """Parse ``"communities:probability"``, e.g. ``"15:0.1"``."""
        try:
            count, prob = text.split(":")
            return cls(int(count), float(prob))
        except ValueError as e:
            if isinstance(e, ParameterError):
                raise
            raise ParameterError(f"layer must look like COMMUNITIES:PROB, got {text!r}") from None


@dataclass(frozen=True)
class SbmParams:
    n: int
    layers: Tuple[LayerSpec, ...]
    seed: int = 0
    placement: Placement = Placement.RANDOM_BALANCED

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n}")
        if not self.layers:
            raise ParameterError("at least one layer is required")
        for i, layer in enumerate(self.layers):
            if self.n % layer.num_communities:
                raise ParameterError(
                    f"n={self.n} is not divisible by the {layer.num_communities} communities of layer {i + 1}")
        if self.placement is Placement.STRIPED:
            product = int(np.prod([layer.num_communities for layer in self.layers]))
            if self.n % product:
                raise ParameterError(
                    f"striped placement needs n divisible by {product} (product of community counts), got n={self.n}")

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def community_size(self, layer: int) -> int:
        return self.n // self.layers[layer].num_communities

    def with_seed(self, seed: int) -> "SbmParams":
        return SbmParams(self.n, self.layers, seed, self.placement)

    def label(self) -> str:
        parts = ", ".join(f"{l.num_communities}" for l in self.layers)
        probs = ", ".join(f"{l.edge_prob:g}" for l in self.layers)
        return f"G({self.n}, {parts}, {probs})"


@dataclass(frozen=True)
class GroundTruth:
    layers: Tuple[Partition, ...]
    specs: Tuple[LayerSpec, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.layers:
            raise ParameterError("ground truth needs at least one layer")
        n = self.layers[0].node_count
        if any(p.node_count != n for p in self.layers):
            raise ParameterError("ground-truth layers cover different node counts")

    @property
    def node_count(self) -> int:
        return self.layers[0].node_count

    @property
    def num_layers(self) -> int:
        return len(self.layers)


def plant_layers(params: SbmParams) -> GroundTruth:
    """
    Planted layer partitions.

    Layer 0 is contiguous blocks. Later layers put node v in community
    v mod n_l (striped and interleaved) or shuffle a balanced assignment with a
    seeded permutation (random-balanced).
    """
    n = params.n
    nodes = np.arange(n, dtype=np.int64)
    layers: List[Partition] = []
    for idx, spec in enumerate(params.layers):
        size = n // spec.num_communities
        if idx == 0:
            labels = nodes // size
        elif params.placement is Placement.RANDOM_BALANCED:
            balanced = np.repeat(np.arange(spec.num_communities, dtype=np.int64), size)
            labels = balanced[rng_for(params.seed, STREAM_PLANT, idx).permutation(n)]
        else:
            labels = nodes % spec.num_communities
        layers.append(Partition(labels))
    return GroundTruth(tuple(layers), params.layers)


def pair_probabilities(row: int, labels: Sequence[np.ndarray], probs: Sequence[float]) -> np.ndarray:
    """Edge probability between ``row`` and every node, from the layer memberships."""
    none = np.ones(len(labels[0]), dtype=np.float64)
    for lab, p in zip(labels, probs):
        none *= np.where(lab == lab[row], 1.0 - p, 1.0)
    return 1.0 - none


def generate(params: SbmParams) -> Tuple[Graph, GroundTruth]:
    """
    Sample a graph from the model.

    Draws are keyed on (seed, u, v): every row u draws its own uniforms for the
    pairs (u, v >= u), so output is fixed by the seed alone.
    """
    truth = plant_layers(params)
    n = params.n
    labels = [p.labels for p in truth.layers]
    probs = [spec.edge_prob for spec in params.layers]

    us: List[np.ndarray] = []
    vs: List[np.ndarray] = []
    for u in range(n):
        prob = pair_probabilities(u, labels, probs)
        prob[u] *= 0.5
        draws = row_uniforms(params.seed, STREAM_EDGES, u, n)
        hit = np.flatnonzero(draws[u:] < prob[u:]) + u
        if len(hit):
            us.append(np.full(len(hit), u, dtype=np.int64))
            vs.append(hit)

    if us:
        graph = Graph.from_arrays(n, np.concatenate(us), np.concatenate(vs))
    else:
        graph = Graph.from_arrays(n, np.empty(0, np.int64), np.empty(0, np.int64))
    logger.debug("generated %s seed=%d: %d edges", params.label(), params.seed, graph.edge_count)
    return graph, truth


@dataclass(frozen=True)
class LayerExpectation:
    """Expected per-community statistics of one layer."""
    internal: float
    outgoing: float

    @property
    def degree(self) -> float:
        return 2.0 * self.internal + self.outgoing

    def modularity(self, num_communities: int) -> float:
        d = self.degree
        return 1.0 - 1.0 / num_communities - (self.outgoing / d if d > 0 else 0.0)


def _require_two_layers(params: SbmParams) -> None:
    if params.num_layers != 2:
        raise ParameterError(f"closed forms cover two-layer models only, got {params.num_layers} layers")


def expected_stats(params: SbmParams) -> List[LayerExpectation]:
    """
    Closed-form per-community expectations of a two-layer model.

    For layer l with the other layer o: m_l = s_l^2 / 2,
    e_ll = (1 - 1/n_o) m_l p_l + (1/n_o) m_l p_lo with p_lo = p_l + p_o - p_l p_o,
    e_lout = (p_o / n_o) s_l (n - s_l). These assume every cross-layer
    intersection has exactly n / (n_1 n_2) nodes.
    """
    _require_two_layers(params)
    n = params.n
    p = [spec.edge_prob for spec in params.layers]
    both = p[0] + p[1] - p[0] * p[1]
    out: List[LayerExpectation] = []
    for l in (0, 1):
        o = 1 - l
        s = params.community_size(l)
        n_o = params.layers[o].num_communities
        m = s * s / 2.0
        internal = (1.0 - 1.0 / n_o) * m * p[l] + (1.0 / n_o) * m * both
        outgoing = (p[o] / n_o) * s * (n - s)
        out.append(LayerExpectation(internal, outgoing))
    return out


def intersection_matrix(truth: GroundTruth) -> np.ndarray:
    """Sizes |C_1^i ∩ C_2^j| of a two-layer ground truth."""
    if truth.num_layers != 2:
        raise ParameterError("intersection matrix needs exactly two layers")
    a, b = truth.layers
    counts = np.zeros((a.num_communities, b.num_communities), dtype=np.int64)
    np.add.at(counts, (a.labels, b.labels), 1)
    return counts


def conditional_stats(params: SbmParams, truth: GroundTruth) -> List[np.ndarray]:
    """
    Exact expected (internal, outgoing) weight of every community given the
    planted layers.

    Matches the closed forms when every intersection has the same size, and
    corrects for uneven intersections otherwise. Returns one (k_l, 2) array per
    layer.
    """
    _require_two_layers(params)
    p = [spec.edge_prob for spec in params.layers]
    both = p[0] + p[1] - p[0] * p[1]
    counts = intersection_matrix(truth).astype(np.float64)
    result = []
    for l, r in ((0, counts), (1, counts.T)):
        o = 1 - l
        s_l = r.sum(axis=1)
        s_o = r.sum(axis=0)
        shared = (r * r).sum(axis=1) / 2.0
        internal = (s_l * s_l / 2.0 - shared) * p[l] + shared * both
        outgoing = p[o] * (r * (s_o[None, :] - r)).sum(axis=1)
        result.append(np.column_stack([internal, outgoing]))
    return result


def realized_stats(graph: Graph, truth: GroundTruth) -> List[np.ndarray]:
    """Observed (internal, outgoing) weight per community for every layer."""
    out = []
    for layer in truth.layers:
        layer.check_covers(graph)
        e_in, e_out = community_weights(graph, layer.labels, layer.num_communities)
        out.append(np.column_stack([e_in, e_out]))
    return out


def resolve_placement(n: int, layers: Sequence[LayerSpec], seed: int, placement: Placement) -> SbmParams:
    """
    Build parameters, falling back to random-balanced placement when striped
    placement's divisibility requirement fails.
    """
    try:
        return SbmParams(n, tuple(layers), seed, placement)
    except ParameterError as e:
        if placement is not Placement.STRIPED:
            raise
        logger.warning("%s; falling back to random-balanced placement", e)
        return SbmParams(n, tuple(layers), seed, Placement.RANDOM_BALANCED)
