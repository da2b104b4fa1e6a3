"""
File formats.

- Edge list: ``u<TAB>v[<TAB>weight]`` per line, 0-indexed, ``#`` lines ignored.
  The writer emits a ``# nodes<TAB>N`` line, which the reader honours so that
  isolated trailing nodes survive a round trip; without it n = max id + 1.
- Partition: ``node<TAB>community`` per line.
- Ground truth: a versioned YAML document with one block per layer.
"""
import logging
import os
from typing import Iterable, List, Optional, TextIO

import numpy as np
import yaml

from .errors import GraphFormatError
from .graph import Graph, Partition
from .sbm import GroundTruth, LayerSpec

logger = logging.getLogger(__name__)

GROUND_TRUTH_FORMAT = "hicode-lab/ground-truth"
GROUND_TRUTH_VERSION = 1


def _ensure_parent(path: str) -> None:
    out_dir = os.path.dirname(path)
    if out_dir and not os.path.exists(out_dir):
        os.makedirs(out_dir, exist_ok=True)


def _format_weight(w: float) -> str:
    return format(w, ".17g")


def parse_edge_list(lines: Iterable[str], source: str = "<edges>") -> Graph:
    declared: Optional[int] = None
    edges = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) == 2 and fields[0] == "nodes":
                try:
                    declared = int(fields[1])
                except ValueError:
                    raise GraphFormatError(f"{source}:{lineno}: bad node count {fields[1]!r}") from None
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) not in (2, 3):
            raise GraphFormatError(f"{source}:{lineno}: expected 'u<TAB>v[<TAB>weight]', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise GraphFormatError(f"{source}:{lineno}: non-numeric field in {line!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"{source}:{lineno}: negative node id in {line!r}")
        if not (np.isfinite(w) and w >= 0.0):
            raise GraphFormatError(f"{source}:{lineno}: weight must be finite and non-negative in {line!r}")
        edges.append((u, v, w))

    inferred = max((max(u, v) for u, v, _ in edges), default=-1) + 1
    n = declared if declared is not None else inferred
    if n < inferred:
        raise GraphFormatError(f"{source}: declares {n} nodes but uses node {inferred - 1}")
    if n < 1:
        raise GraphFormatError(f"{source}: graph has no nodes")
    try:
        return Graph(n, edges)
    except GraphFormatError as e:
        raise GraphFormatError(f"{source}: {e}") from None


def read_edge_list(path: str) -> Graph:
    with open(path, "r") as f:
        return parse_edge_list(f, source=path)


def dump_edge_list(g: Graph, out: TextIO) -> None:
    out.write(f"# nodes\t{g.node_count}\n")
    for u, v, w in g.edges():
        out.write(f"{u}\t{v}\t{_format_weight(w)}\n")


def write_edge_list(g: Graph, path: str) -> None:
    _ensure_parent(path)
    with open(path, "w") as f:
        dump_edge_list(g, f)
    logger.info("wrote %d edges to %s", g.edge_count, path)


def parse_partition(lines: Iterable[str], source: str = "<partition>") -> Partition:
    assignment = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 2:
            raise GraphFormatError(f"{source}:{lineno}: expected 'node<TAB>community', got {line!r}")
        try:
            node, community = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFormatError(f"{source}:{lineno}: non-integer field in {line!r}") from None
        if node in assignment:
            raise GraphFormatError(f"{source}:{lineno}: node {node} assigned twice")
        assignment[node] = community
    if not assignment:
        raise GraphFormatError(f"{source}: empty partition")
    n = max(assignment) + 1
    missing = [v for v in range(n) if v not in assignment]
    if missing or min(assignment) < 0:
        raise GraphFormatError(f"{source}: nodes must be 0..{n - 1} with none missing (first gap: {missing[:1]})")
    return Partition.from_labels([assignment[v] for v in range(n)])


def read_partition(path: str) -> Partition:
    with open(path, "r") as f:
        return parse_partition(f, source=path)


def write_partition(p: Partition, path: str) -> None:
    _ensure_parent(path)
    with open(path, "w") as f:
        for node, community in enumerate(p.labels.tolist()):
            f.write(f"{node}\t{community}\n")


def ground_truth_document(truth: GroundTruth, seed: Optional[int] = None) -> dict:
    blocks = []
    for idx, layer in enumerate(truth.layers):
        block = {"layer": idx + 1, "communities": layer.num_communities}
        if idx < len(truth.specs):
            block["p"] = truth.specs[idx].edge_prob
        block["assignment"] = layer.labels.tolist()
        blocks.append(block)
    doc = {"format": GROUND_TRUTH_FORMAT, "version": GROUND_TRUTH_VERSION, "n": truth.node_count}
    if seed is not None:
        doc["seed"] = int(seed)
    doc["layers"] = blocks
    return doc


class _FlowListDumper(yaml.SafeDumper):
    pass


def _represent_list(dumper, data):
    # Node maps print on one line; block lists would run to thousands of lines.
    flow = bool(data) and all(isinstance(x, int) for x in data)
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=flow)


_FlowListDumper.add_representer(list, _represent_list)


def write_ground_truth(truth: GroundTruth, path: str, seed: Optional[int] = None) -> None:
    _ensure_parent(path)
    with open(path, "w") as f:
        yaml.dump(ground_truth_document(truth, seed), f, Dumper=_FlowListDumper,
                  sort_keys=False, width=120)


def load_ground_truth(doc: dict, source: str = "<ground truth>") -> GroundTruth:
    if not isinstance(doc, dict) or doc.get("format") != GROUND_TRUTH_FORMAT:
        raise GraphFormatError(f"{source}: not a ground-truth document")
    if doc.get("version") != GROUND_TRUTH_VERSION:
        raise GraphFormatError(f"{source}: unsupported ground-truth version {doc.get('version')!r}")
    n = doc.get("n")
    layers: List[Partition] = []
    specs: List[LayerSpec] = []
    for block in doc.get("layers") or []:
        assignment = block.get("assignment")
        if not isinstance(assignment, list) or len(assignment) != n:
            raise GraphFormatError(f"{source}: layer {block.get('layer')} assignment does not cover {n} nodes")
        layers.append(Partition.from_labels(np.asarray(assignment, dtype=np.int64)))
        if "p" in block:
            specs.append(LayerSpec(int(block["communities"]), float(block["p"])))
    if not layers:
        raise GraphFormatError(f"{source}: no layers")
    return GroundTruth(tuple(layers), tuple(specs) if len(specs) == len(layers) else ())


def read_ground_truth(path: str) -> GroundTruth:
    with open(path, "r") as f:
        try:
            doc = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise GraphFormatError(f"{path}: {e}") from None
    return load_ground_truth(doc, source=path)
