"""
Modularity landscape around two ground-truth layers.

Partitions are sampled near layer 1, near layer 2 and as mixtures of both,
placed on the plane by their NMI with each layer, and coloured by modularity
on the graph of the current HICODE stage. NMI coordinates do not depend on
the graph, so one sampler serves every stage of a trace.
"""
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core.errors import ParameterError
from src.core.graph import Graph, Partition
from src.core.hicode import HicodeConfig, HicodeResult, run
from src.core.sbm import GroundTruth
from src.core.seeding import STREAM_LANDSCAPE, derive_seed, rng_for, seed_rng
from src.core.weaken import ReduceFactorRule, WeakenMethod, weaken
from src.harness.core.execution import TrialEngine
from src.metrics.modularity import batch_modularity, partition_modularity
from src.metrics.nmi import labels_nmi, nmi

logger = logging.getLogger(__name__)

REPLICATES_PER_K = 4
MAX_MUTATIONS = 500
MIXED_SAMPLES = 1200
NEAR_LAYER_NMI = 0.8

CSV_COLUMNS = ["stage", "kind", "k", "nmi1", "nmi2", "modularity", "is_marker"]


class SampleKind(Enum):
    PERTURBED_FROM_1 = "perturbed1"
    PERTURBED_FROM_2 = "perturbed2"
    MIXED = "mixed"
    REFERENCE_1 = "reference1"
    REFERENCE_2 = "reference2"
    MARKER = "marker"


_KIND_TAG = {SampleKind.PERTURBED_FROM_1: 1, SampleKind.PERTURBED_FROM_2: 2, SampleKind.MIXED: 3}
_SAMPLED_KINDS = frozenset(_KIND_TAG)


@dataclass(frozen=True)
class LandscapeSample:
    kind: SampleKind
    k: int
    nmi1: float
    nmi2: float
    q: float
    stage: str = ""
    replicate: int = 0

    @property
    def is_marker(self) -> bool:
        return self.kind is SampleKind.MARKER

    @property
    def is_sampled(self) -> bool:
        return self.kind in _SAMPLED_KINDS


def _as_partition(labels: np.ndarray) -> Partition:
    k = int(labels.max()) + 1
    if np.count_nonzero(np.bincount(labels, minlength=k)) == k:
        return Partition(labels)
    return Partition.from_labels(labels)


def mutate_labels(labels: np.ndarray, k: int, num_labels: int, rng: np.random.Generator) -> np.ndarray:
    """Copy of ``labels`` after ``k`` swap-or-move mutations over ``num_labels`` labels."""
    out = labels.copy()
    if k == 0:
        return out
    n = len(out)
    swaps = (rng.random(k) < 0.5).tolist()
    first = rng.integers(0, n, size=k).tolist()
    second = rng.integers(0, n, size=k).tolist()
    shift = rng.integers(1, num_labels, size=k).tolist()
    for i in range(k):
        a = first[i]
        if swaps[i]:
            b = second[i]
            out[a], out[b] = out[b], out[a]
        else:
            out[a] = (out[a] + shift[i]) % num_labels
    return out


def sample_perturbed(p: Partition, k: int, seed: int) -> Partition:
    """
    Apply ``k`` random mutations to ``p``.

    Each mutation swaps the communities of two random nodes or, with equal
    probability, moves one random node to a different random community.
    Communities emptied along the way simply disappear.
    """
    if k < 0:
        raise ParameterError(f"mutation count must be non-negative, got {k}")
    if p.num_communities < 2:
        raise ParameterError("perturbation needs a partition with at least two communities")
    return _as_partition(mutate_labels(p.labels, k, p.num_communities, seed_rng(seed)))


def _mixed_labels(l1: Partition, l2: Partition, k: int, rng: np.random.Generator) -> np.ndarray:
    chosen = rng.choice(l1.node_count, size=k, replace=False)
    labels = l2.labels + l1.num_communities
    labels[chosen] = l1.labels[chosen]
    return labels


def sample_mixed(l1: Partition, l2: Partition, k: int, seed: int) -> Partition:
    """``k`` random nodes keep their layer-1 community, the rest their layer-2 one."""
    if l1.node_count != l2.node_count:
        raise ParameterError("layers cover different node counts")
    if not 0 <= k <= l1.node_count:
        raise ParameterError(f"mix parameter must lie in [0, {l1.node_count}], got {k}")
    return _as_partition(_mixed_labels(l1, l2, k, seed_rng(seed)))


@dataclass
class _Candidate:
    kind: SampleKind
    k: int
    replicate: int
    labels: np.ndarray
    nmi1: float = 0.0
    nmi2: float = 0.0


class LandscapeSampler:
    """Sampled partitions and their NMI coordinates for one ground truth."""

    def __init__(self, truth: GroundTruth, seed: int = 0, replicates: int = REPLICATES_PER_K,
                 max_mutations: int = MAX_MUTATIONS, mixed: int = MIXED_SAMPLES,
                 jobs: int = 1, quiet: bool = True):
        if truth.num_layers != 2:
            raise ParameterError(f"the landscape needs a two-layer ground truth, got {truth.num_layers}")
        self.truth = truth
        self.seed = seed
        self.layer1, self.layer2 = truth.layers
        self.cross_nmi = nmi(self.layer1, self.layer2)
        self.candidates = self._draw(replicates, max_mutations, mixed)
        engine = TrialEngine(jobs, desc="landscape nmi", quiet=quiet)
        coords = engine.map(self._coordinates, self.candidates)
        for candidate, (a, b) in zip(self.candidates, coords):
            candidate.nmi1, candidate.nmi2 = a, b
        logger.info("landscape sampler: %d partitions (seed=%d)", len(self.candidates), seed)

    def _draw(self, replicates: int, max_mutations: int, mixed: int) -> List[_Candidate]:
        candidates: List[_Candidate] = []
        for kind, base in ((SampleKind.PERTURBED_FROM_1, self.layer1), (SampleKind.PERTURBED_FROM_2, self.layer2)):
            for k in range(1, max_mutations + 1):
                for r in range(replicates):
                    rng = rng_for(self.seed, STREAM_LANDSCAPE, _KIND_TAG[kind], k, r)
                    labels = mutate_labels(base.labels, k, base.num_communities, rng)
                    candidates.append(_Candidate(kind, k, r, labels))
        n = self.truth.node_count
        mix_k = rng_for(self.seed, STREAM_LANDSCAPE, _KIND_TAG[SampleKind.MIXED]).integers(0, n + 1, size=mixed)
        mixed_candidates = []
        for r, k in enumerate(mix_k.tolist()):
            rng = rng_for(self.seed, STREAM_LANDSCAPE, _KIND_TAG[SampleKind.MIXED], k, r)
            mixed_candidates.append(_Candidate(SampleKind.MIXED, k, r, _mixed_labels(self.layer1, self.layer2, k, rng)))
        mixed_candidates.sort(key=lambda p: (p.k, p.replicate))
        return candidates + mixed_candidates

    def _coordinates(self, candidate: _Candidate) -> Tuple[float, float]:
        return labels_nmi(candidate.labels, self.layer1.labels), labels_nmi(candidate.labels, self.layer2.labels)

    def __len__(self) -> int:
        return len(self.candidates)

    def evaluate(self, g: Graph, stage: str = "") -> List[LandscapeSample]:
        """Sample rows plus the two reference rows, with modularity on ``g``."""
        self.layer1.check_covers(g)
        qs = batch_modularity(g, [p.labels for p in self.candidates])
        rows = [LandscapeSample(p.kind, p.k, p.nmi1, p.nmi2, float(q), stage, p.replicate)
                for p, q in zip(self.candidates, qs)]
        rows.append(LandscapeSample(SampleKind.REFERENCE_1, 0, 1.0, self.cross_nmi,
                                    partition_modularity(g, self.layer1), stage))
        rows.append(LandscapeSample(SampleKind.REFERENCE_2, 0, self.cross_nmi, 1.0,
                                    partition_modularity(g, self.layer2), stage))
        return rows

    def marker(self, found: Partition, g: Graph, stage: str = "") -> LandscapeSample:
        return LandscapeSample(SampleKind.MARKER, 0, nmi(found, self.layer1), nmi(found, self.layer2),
                               partition_modularity(g, found), stage)


def build_landscape(g: Graph, truth: GroundTruth, seed: int = 0, jobs: int = 1,
                    quiet: bool = True) -> List[LandscapeSample]:
    """5200 sampled rows (2000 per layer, 1200 mixed) plus two reference rows."""
    return LandscapeSampler(truth, seed, jobs=jobs, quiet=quiet).evaluate(g, "static")


@dataclass
class LandscapeStage:
    label: str
    samples: List[LandscapeSample]
    marker: Optional[LandscapeSample] = None

    def rows(self) -> List[LandscapeSample]:
        return self.samples + ([self.marker] if self.marker is not None else [])

    def reference_q(self, layer: int) -> float:
        kind = SampleKind.REFERENCE_1 if layer == 1 else SampleKind.REFERENCE_2
        return next(s.q for s in self.samples if s.kind is kind)


@dataclass
class LandscapeTrace:
    stages: List[LandscapeStage] = field(default_factory=list)
    result: Optional[HicodeResult] = None

    def stage(self, label: str) -> LandscapeStage:
        for stage in self.stages:
            if stage.label == label:
                return stage
        raise KeyError(label)


def trace_hicode(g: Graph, truth: GroundTruth, cfg: HicodeConfig, seed: Optional[int] = None,
                 jobs: int = 1, quiet: bool = True) -> LandscapeTrace:
    """
    Run HICODE and rebuild the landscape on every graph the detector sees.

    Stage ``t{r}-{l}`` is round r (0 = identification), layer l: its samples
    are scored on that step's residual graph and its marker is the partition
    the detector returned there.
    """
    sampler = LandscapeSampler(truth, cfg.seed if seed is None else seed, jobs=jobs, quiet=quiet)
    trace = LandscapeTrace()

    def on_stage(label: str, residual: Graph, found: Partition) -> None:
        trace.stages.append(LandscapeStage(label, sampler.evaluate(residual, label),
                                           sampler.marker(found, residual, label)))
        logger.info("stage %s: marker nmi1=%.3f nmi2=%.3f", label,
                    trace.stages[-1].marker.nmi1, trace.stages[-1].marker.nmi2)

    trace.result = run(g, cfg, truth, on_stage)
    return trace


def reduction_shift(g: Graph, truth: GroundTruth, method: WeakenMethod,
                    rule: ReduceFactorRule = ReduceFactorRule.BACKGROUND_RATIO,
                    weakened: int = 0, seed: int = 0) -> Tuple[float, float]:
    """Modularity of the other ground-truth layer before and after weakening layer ``weakened``."""
    other = truth.layers[1 - weakened]
    residual = weaken(g, truth.layers[weakened], method, rule, seed)
    return partition_modularity(g, other), partition_modularity(residual, other)


def summarize_stage(samples: Sequence[LandscapeSample]) -> Dict[str, float]:
    """
    Peak modularity near each layer and each reference row's relative standing.

    ``rank`` is the fraction of sampled partitions whose modularity is below the
    reference layer's.
    """
    sampled = [s for s in samples if s.is_sampled]
    qs = np.array([s.q for s in sampled])
    near1 = [s.q for s in sampled if s.nmi1 > NEAR_LAYER_NMI]
    near2 = [s.q for s in sampled if s.nmi2 > NEAR_LAYER_NMI]
    summary = {
        "samples": float(len(sampled)),
        "peak_near_layer1": max(near1) if near1 else float("nan"),
        "peak_near_layer2": max(near2) if near2 else float("nan"),
    }
    for s in samples:
        if s.kind in (SampleKind.REFERENCE_1, SampleKind.REFERENCE_2):
            tag = "layer1" if s.kind is SampleKind.REFERENCE_1 else "layer2"
            summary[f"{tag}_q"] = s.q
            summary[f"{tag}_rank"] = float(np.mean(qs < s.q)) if len(qs) else float("nan")
    return summary


def samples_to_frame(samples: Sequence[LandscapeSample]) -> pd.DataFrame:
    return pd.DataFrame(
        [(s.stage, s.kind.value, s.k, s.nmi1, s.nmi2, s.q, int(s.is_marker)) for s in samples],
        columns=CSV_COLUMNS,
    )


def write_stage_csv(samples: Sequence[LandscapeSample], path: str) -> None:
    out_dir = os.path.dirname(path)
    if out_dir and not os.path.exists(out_dir):
        os.makedirs(out_dir, exist_ok=True)
    samples_to_frame(samples).to_csv(path, index=False, float_format="%.6f")


def write_trace(trace: LandscapeTrace, out_dir: str) -> List[str]:
    paths = []
    for stage in trace.stages:
        path = os.path.join(out_dir, f"landscape_{stage.label}.csv")
        write_stage_csv(stage.rows(), path)
        paths.append(path)
    return paths
