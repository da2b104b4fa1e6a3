"""
Command-line entry point.

Subcommands: generate, detect, weaken, hicode, nmi, modularity, verify,
landscape, plot. Exit status is 0 on success, 1 when a verification fails
and 2 on usage, input or parameter errors.
"""
import argparse
import logging
import os
import sys
from dataclasses import replace
from typing import List, Optional

import yaml
from tabulate import tabulate

from src.core.errors import HicodeLabError, ParameterError
from src.core.graph import community_stats
from src.core.hicode import HicodeConfig, run
from src.core.io import (read_edge_list, read_ground_truth, read_partition, write_edge_list,
                         write_ground_truth, write_partition)
from src.core.louvain import LouvainConfig, detect
from src.core.sbm import LayerSpec, Placement, SbmParams, generate, resolve_placement
from src.core.weaken import ReduceFactorRule, WeakenMethod, weaken
from src.harness.config import ConfigLoader
from src.harness.core.verification import CLAIMS, format_report, reports_to_yaml, verify_all, verify_claim
from src.harness.landscape import build_landscape, summarize_stage, trace_hicode, write_stage_csv, write_trace
from src.harness.plotting import plot_csv, plot_directory
from src.metrics.modularity import community_modularity, partition_modularity
from src.metrics.nmi import nmi

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


# -- shared argument groups ---------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="INFO logging; -vv for DEBUG.")
    common.add_argument("--quiet", action="store_true", help="Disable progress bars.")
    common.add_argument("--config", default=ConfigLoader.DEFAULT_PATH, help="Path to experiments.yaml.")
    return common


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--preset", help="Model preset name from the experiments file.")
    g.add_argument("--n", type=int, help="Number of nodes.")
    g.add_argument("--layer", action="append", default=[], metavar="K:P",
                   help="Layer with K communities and edge probability P; repeat per layer.")
    g.add_argument("--placement", choices=[pl.value for pl in Placement],
                   help="Community placement of layers after the first (default random-balanced).")


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="Master seed (default 0, or the preset's seed).")


def _add_weaken_args(p: argparse.ArgumentParser, default_method: Optional[str] = "reduce-edge") -> None:
    p.add_argument("--method", choices=[m.value for m in WeakenMethod], default=default_method,
                   help="Weakening method.")
    p.add_argument("--rule", choices=[r.value for r in ReduceFactorRule], default=None,
                   help="Keep-fraction rule for reduce-edge / reduce-weight (default background).")


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


def _model_params(args) -> SbmParams:
    if args.preset:
        if args.n is not None or args.layer:
            raise ParameterError("give either --preset or --n/--layer, not both")
        model = ConfigLoader.get_model(args.preset, args.config)
        seed = model.seed if args.seed is None else args.seed
        params = model.to_params(seed)
        if args.placement:
            params = resolve_placement(params.n, params.layers, seed, Placement(args.placement))
        return params
    if args.n is None or not args.layer:
        raise ParameterError("model needs --preset or both --n and at least one --layer")
    layers = [LayerSpec.parse(text) for text in args.layer]
    placement = Placement(args.placement) if args.placement else Placement.RANDOM_BALANCED
    return resolve_placement(args.n, layers, _seed(args), placement)


def _rule(args) -> ReduceFactorRule:
    return ReduceFactorRule(args.rule) if args.rule else ReduceFactorRule.BACKGROUND_RATIO


def _hicode_config(args, seed: int) -> HicodeConfig:
    if args.hicode_preset:
        preset = ConfigLoader.get_hicode(args.hicode_preset, args.config)
        cfg = preset.to_config(seed, args.layers)
    else:
        cfg = HicodeConfig(num_layers=args.layers or 2, seed=seed)
    overrides = {}
    if args.method:
        overrides["method"] = WeakenMethod(args.method)
    if args.rule:
        overrides["rule"] = ReduceFactorRule(args.rule)
    if args.rounds is not None:
        overrides["refine_rounds"] = args.rounds
    return replace(cfg, **overrides) if overrides else cfg


def _header(title: str, seed: int, **extra) -> str:
    items = [f"seed={seed}"] + [f"{k}={v}" for k, v in extra.items()]
    return f"# {title} ({', '.join(items)})"


# -- subcommands ------------------------------------------------------------------

def cmd_generate(args) -> int:
    params = _model_params(args)
    g, truth = generate(params)
    write_edge_list(g, args.out)
    if args.truth:
        write_ground_truth(truth, args.truth, params.seed)
    print(_header("generate", params.seed, model=params.label(), placement=params.placement.value))
    print(f"nodes={g.node_count} edges={g.edge_count}")
    return EXIT_OK


def cmd_detect(args) -> int:
    g = read_edge_list(args.graph)
    p = detect(g, LouvainConfig(seed=_seed(args), min_gain=args.min_gain, max_passes=args.max_passes))
    write_partition(p, args.out)
    print(_header("detect", _seed(args)))
    print(f"communities={p.num_communities} modularity={partition_modularity(g, p):.6f}")
    return EXIT_OK


def cmd_weaken(args) -> int:
    g = read_edge_list(args.graph)
    p = read_partition(args.partition)
    residual = weaken(g, p, WeakenMethod(args.method), _rule(args), _seed(args), args.keep)
    write_edge_list(residual, args.out)
    print(_header("weaken", _seed(args), method=args.method, rule=_rule(args).value))
    print(f"edges {g.edge_count} -> {residual.edge_count}, weight {g.total_weight():g} -> {residual.total_weight():g}")
    return EXIT_OK


def cmd_hicode(args) -> int:
    g = read_edge_list(args.graph)
    truth = read_ground_truth(args.truth) if args.truth else None
    seed = _seed(args)
    cfg = _hicode_config(args, seed)
    result = run(g, cfg, truth)

    os.makedirs(args.out_dir, exist_ok=True)
    for l, layer in enumerate(result.layers):
        write_partition(layer, os.path.join(args.out_dir, f"layer_{l + 1}.part"))
    history = {
        "seed": seed,
        "method": cfg.method.value,
        "rule": cfg.rule.value,
        "layers": len(result.layers),
        "rounds_run": result.rounds_run,
        "converged": result.converged,
        "truncated": result.truncated,
        "history": [r.as_dict() for r in result.history],
    }
    with open(os.path.join(args.out_dir, "history.yaml"), "w") as f:
        yaml.safe_dump(history, f, sort_keys=False)

    print(_header("hicode", seed, method=cfg.method.value, rule=cfg.rule.value))
    rows = [[d["round"], d["layer"], d["modularity"], d["nmi_to_previous"], d["nmi_to_ground_truth"]]
            for d in (r.as_dict() for r in result.history)]
    print(tabulate(rows, headers=["round", "layer", "modularity", "nmi_prev", "nmi_truth"], floatfmt=".6f"))
    if result.truncated:
        print(f"truncated: found {len(result.layers)} of {cfg.num_layers} layers")
    return EXIT_OK


def cmd_nmi(args) -> int:
    print(f"{nmi(read_partition(args.a), read_partition(args.b)):.6f}")
    return EXIT_OK


def cmd_modularity(args) -> int:
    g = read_edge_list(args.graph)
    p = read_partition(args.partition)
    if args.per_community:
        stats = community_stats(g, p)
        rows = [[i, s.internal_weight, s.outgoing_weight, s.degree, community_modularity(g, p, i)]
                for i, s in enumerate(stats)]
        print(tabulate(rows, headers=["community", "e_in", "e_out", "degree", "Q_i"], floatfmt=".6f"))
    print(f"{partition_modularity(g, p):.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    params = _model_params(args)
    seed = params.seed
    quiet = args.quiet
    if args.claim == "all":
        reports = verify_all(params, args.trials, seed, args.jobs, _rule(args), args.samples, quiet=quiet)
    else:
        reports = [verify_claim(args.claim, params, args.trials, seed, args.jobs, _rule(args), args.samples,
                                use_estimates=args.estimates, quiet=quiet)]
    print(_header("verify", seed, model=params.label(), placement=params.placement.value))
    print(format_report(reports))
    if args.report:
        with open(args.report, "w") as f:
            f.write(reports_to_yaml(reports, params, seed))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAILED


def cmd_landscape(args) -> int:
    if args.graph or args.truth:
        if not (args.graph and args.truth):
            raise ParameterError("--graph and --truth must be given together")
        g, truth = read_edge_list(args.graph), read_ground_truth(args.truth)
        seed = _seed(args)
    else:
        params = _model_params(args)
        g, truth = generate(params)
        seed = params.seed
    if args.stages < 0:
        raise ParameterError(f"--stages must be non-negative, got {args.stages}")

    summaries = []
    if args.stages == 0:
        samples = build_landscape(g, truth, seed, args.jobs, args.quiet)
        write_stage_csv(samples, os.path.join(args.out_dir, "landscape_static.csv"))
        summaries.append(("static", summarize_stage(samples)))
    else:
        method = WeakenMethod(args.method)
        cfg = HicodeConfig(num_layers=2, method=method, rule=_rule(args), refine_rounds=args.stages - 1, seed=seed)
        trace = trace_hicode(g, truth, cfg, seed, args.jobs, args.quiet)
        write_trace(trace, args.out_dir)
        summaries.extend((stage.label, summarize_stage(stage.samples)) for stage in trace.stages)

    print(_header("landscape", seed, stages=args.stages, out_dir=args.out_dir))
    keys = ["peak_near_layer1", "peak_near_layer2", "layer1_q", "layer2_q", "layer1_rank", "layer2_rank"]
    print(tabulate([[label] + [s.get(k) for k in keys] for label, s in summaries],
                   headers=["stage"] + keys, floatfmt=".4f"))
    return EXIT_OK


def cmd_plot(args) -> int:
    if args.csv:
        written = [plot_csv(path, os.path.join(args.out_dir, os.path.splitext(os.path.basename(path))[0] + ".svg")
                            if args.out_dir else None) for path in args.csv]
    else:
        written = plot_directory(args.in_dir, args.out_dir)
    for path in written:
        print(path)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hicode-lab", description="Hidden community detection laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="Sample a multi-layer block-model graph.")
    _add_model_args(p)
    _add_seed(p)
    p.add_argument("--out", required=True, help="Edge-list output path.")
    p.add_argument("--truth", help="Ground-truth output path.")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", parents=[common], help="Run Louvain on an edge list.")
    p.add_argument("graph")
    p.add_argument("--out", required=True, help="Partition output path.")
    p.add_argument("--min-gain", type=float, default=1e-7)
    p.add_argument("--max-passes", type=int, default=100)
    _add_seed(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("weaken", parents=[common], help="Weaken the communities of a partition.")
    p.add_argument("graph")
    p.add_argument("partition")
    _add_weaken_args(p)
    p.add_argument("--keep", type=float, help="Force the keep fraction instead of estimating it.")
    p.add_argument("--out", required=True, help="Edge-list output path.")
    _add_seed(p)
    p.set_defaults(func=cmd_weaken)

    p = sub.add_parser("hicode", parents=[common], help="Identify and refine hidden layers.")
    p.add_argument("graph")
    p.add_argument("--hicode-preset", help="HICODE preset name from the experiments file.")
    p.add_argument("--layers", type=int, help="Number of layers (default 2).")
    _add_weaken_args(p, default_method=None)
    p.add_argument("--rounds", type=int, help="Refinement rounds (default 5).")
    p.add_argument("--truth", help="Ground-truth file; adds nmi_to_ground_truth to the history.")
    p.add_argument("--out-dir", required=True)
    _add_seed(p)
    p.set_defaults(func=cmd_hicode)

    p = sub.add_parser("nmi", parents=[common], help="NMI of two partition files.")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_nmi)

    p = sub.add_parser("modularity", parents=[common], help="Modularity of a partition on a graph.")
    p.add_argument("graph")
    p.add_argument("partition")
    p.add_argument("--per-community", action="store_true", help="Also print a per-community table.")
    p.set_defaults(func=cmd_modularity)

    p = sub.add_parser("verify", parents=[common], help="Check the model's lemmas and theorems.")
    p.add_argument("--claim", choices=list(CLAIMS) + ["all"], default="all")
    _add_model_args(p)
    _add_seed(p)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--samples", type=int, default=5000, help="Sampled partitions for thm2 beyond 12 nodes.")
    p.add_argument("--rule", choices=[r.value for r in ReduceFactorRule], default=None)
    p.add_argument("--estimates", action="store_true", help="Weaken detected layers instead of ground truth.")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--report", help="Write the reports as YAML to this path.")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("landscape", parents=[common], help="Modularity landscape CSVs per HICODE stage.")
    _add_model_args(p)
    _add_seed(p)
    p.add_argument("--graph", help="Edge list to use instead of generating one.")
    p.add_argument("--truth", help="Ground truth matching --graph.")
    p.add_argument("--stages", type=int, default=2,
                   help="HICODE iterations to trace (0 = static landscape of the input graph).")
    _add_weaken_args(p, default_method="remove")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("plot", parents=[common], help="Render landscape CSVs to SVG.")
    p.add_argument("csv", nargs="*", help="CSV files; default every landscape_*.csv in --in-dir.")
    p.add_argument("--in-dir", default=".")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except (HicodeLabError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
