"""
HICODE: identify layers one at a time, then refine each against the others.

Identification runs the base detector, records its partition as the next
layer and weakens that layer on the current graph, L times. Refinement
re-derives, for every layer l, a residual from the original graph with all
other layers weakened, and reruns the detector on it. The original graph is
never modified.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import DegenerateEstimateError, ParameterError, UndefinedModularityError
from .graph import Graph, Partition
from .louvain import LouvainConfig, detect
from .sbm import GroundTruth
from .seeding import STREAM_LOUVAIN, STREAM_REDUCE, derive_seed
from .weaken import ReduceFactorRule, WeakenMethod, weaken, weaken_layers
from src.metrics.modularity import partition_modularity
from src.metrics.nmi import nmi

logger = logging.getLogger(__name__)

# Stage callback: (stage label, graph the detector ran on, partition it returned).
StageHook = Callable[[str, Graph, Partition], None]

_IDENTIFY_ROUND = 0


@dataclass(frozen=True)
class HicodeConfig:
    num_layers: int
    base: LouvainConfig = field(default_factory=LouvainConfig)
    method: WeakenMethod = WeakenMethod.REDUCE_EDGE
    rule: ReduceFactorRule = ReduceFactorRule.BACKGROUND_RATIO
    refine_rounds: int = 5
    convergence_nmi: float = 0.999
    seed: int = 0

    def __post_init__(self):
        if int(self.num_layers) != self.num_layers or self.num_layers < 1:
            raise ParameterError(f"num_layers must be a positive integer, got {self.num_layers}")
        if int(self.refine_rounds) != self.refine_rounds or self.refine_rounds < 0:
            raise ParameterError(f"refine_rounds must be a non-negative integer, got {self.refine_rounds}")
        if not 0.0 < self.convergence_nmi <= 1.0:
            raise ParameterError(f"convergence_nmi must lie in (0, 1], got {self.convergence_nmi}")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    layer: int
    modularity: float
    nmi_to_previous: Optional[float]
    nmi_to_ground_truth: Optional[float] = None
    matched_truth_layer: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "round": self.round,
            "layer": self.layer + 1,
            "modularity": round(self.modularity, 6),
            "nmi_to_previous": None if self.nmi_to_previous is None else round(self.nmi_to_previous, 6),
            "nmi_to_ground_truth": None if self.nmi_to_ground_truth is None else round(self.nmi_to_ground_truth, 6),
            "matched_truth_layer": None if self.matched_truth_layer is None else self.matched_truth_layer + 1,
        }


@dataclass
class HicodeResult:
    layers: List[Partition]
    history: List[RoundRecord] = field(default_factory=list)
    truncated: bool = False
    rounds_run: int = 0
    converged: bool = False

    def records_for_round(self, round_index: int) -> List[RoundRecord]:
        return [r for r in self.history if r.round == round_index]


@dataclass
class Identification:
    layers: List[Partition]
    truncated: bool = False


def _detector(cfg: HicodeConfig, round_index: int, layer: int) -> LouvainConfig:
    return replace(cfg.base, seed=derive_seed(cfg.seed, STREAM_LOUVAIN, round_index, layer))


def _weaken_seed(cfg: HicodeConfig, round_index: int, layer: int) -> int:
    return derive_seed(cfg.seed, STREAM_REDUCE, round_index, layer)


def _best_truth_match(p: Partition, truth: GroundTruth) -> Tuple[float, int]:
    scores = [nmi(p, layer) for layer in truth.layers]
    best = max(range(len(scores)), key=lambda i: scores[i])
    return scores[best], best


def _record(g: Graph, round_index: int, layer: int, estimate: Partition, previous: Optional[Partition],
            truth: Optional[GroundTruth]) -> RoundRecord:
    q = partition_modularity(g, estimate)
    to_prev = None if previous is None else nmi(estimate, previous)
    to_truth, matched = (None, None) if truth is None else _best_truth_match(estimate, truth)
    return RoundRecord(round_index, layer, q, to_prev, to_truth, matched)


def identify(g: Graph, cfg: HicodeConfig, on_stage: Optional[StageHook] = None) -> Identification:
    """
    Identification stage.

    Stops early, flagging truncation, when the residual graph has no edges
    left for the detector or the found layer cannot be weakened.
    """
    layers: List[Partition] = []
    current = g
    for l in range(cfg.num_layers):
        try:
            found = detect(current, _detector(cfg, _IDENTIFY_ROUND, l))
        except UndefinedModularityError:
            logger.warning("identification truncated at layer %d: residual graph has no edges", l + 1)
            return Identification(layers, truncated=True)
        layers.append(found)
        if on_stage is not None:
            on_stage(f"t0-{l + 1}", current, found)
        if l + 1 < cfg.num_layers:
            try:
                current = weaken(current, found, cfg.method, cfg.rule, _weaken_seed(cfg, _IDENTIFY_ROUND, l))
            except DegenerateEstimateError as e:
                logger.warning("identification truncated after layer %d: %s", l + 1, e)
                return Identification(layers, truncated=True)
        logger.info("identified layer %d: %d communities", l + 1, found.num_communities)
    return Identification(layers)


def refine(g: Graph, layers: Sequence[Partition], cfg: HicodeConfig,
           truth: Optional[GroundTruth] = None, on_stage: Optional[StageHook] = None) -> HicodeResult:
    """
    Refinement stage.

    Each round replaces every layer estimate in turn, so later layers in a
    round already see the refreshed earlier ones. Stops early once every
    layer's estimate agrees with its previous one at ``convergence_nmi``.
    """
    estimates = list(layers)
    result = HicodeResult(list(estimates))
    result.history.extend(_record(g, _IDENTIFY_ROUND, l, p, None, truth) for l, p in enumerate(estimates))
    if len(estimates) < 2:
        return result

    for r in range(1, cfg.refine_rounds + 1):
        agreements = []
        for l in range(len(estimates)):
            others = [p for j, p in enumerate(estimates) if j != l]
            try:
                residual = weaken_layers(g, others, cfg.method, cfg.rule, _weaken_seed(cfg, r, l))
                found = detect(residual, _detector(cfg, r, l))
            except (UndefinedModularityError, DegenerateEstimateError) as e:
                logger.warning("refinement round %d stopped at layer %d: %s", r, l + 1, e)
                result.truncated = True
                result.layers = list(estimates)
                return result
            if on_stage is not None:
                on_stage(f"t{r}-{l + 1}", residual, found)
            record = _record(g, r, l, found, estimates[l], truth)
            result.history.append(record)
            agreements.append(record.nmi_to_previous)
            estimates[l] = found
        result.rounds_run = r
        result.layers = list(estimates)
        logger.info("refinement round %d: nmi to previous %s", r, ", ".join(f"{a:.4f}" for a in agreements))
        if all(a >= cfg.convergence_nmi for a in agreements):
            result.converged = True
            break
    return result


def run(g: Graph, cfg: HicodeConfig, truth: Optional[GroundTruth] = None,
        on_stage: Optional[StageHook] = None) -> HicodeResult:
    """Identification followed by refinement."""
    found = identify(g, cfg, on_stage)
    if not found.layers:
        raise UndefinedModularityError(f"HICODE needs a graph with edges ({g!r})")
    result = refine(g, found.layers, cfg, truth, on_stage)
    result.truncated = result.truncated or found.truncated
    return result
