"""
SVG scatter plots of landscape CSVs.

x = NMI with layer 1, y = NMI with layer 2, colour = modularity on a 256-step
viridis ramp. Reference rows are drawn as stars, HICODE markers as crosses.
"""
import glob
import logging
import os
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from src.core.errors import GraphFormatError  # noqa: E402
from src.harness.landscape import CSV_COLUMNS  # noqa: E402

logger = logging.getLogger(__name__)

COLORMAP = matplotlib.colormaps["viridis"].resampled(256)


def read_stage_csv(path: str) -> pd.DataFrame:
    frame = pd.read_csv(path)
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise GraphFormatError(f"{path}: not a landscape CSV (missing {', '.join(missing)})")
    return frame


def plot_stage(frame: pd.DataFrame, out_path: str, title: Optional[str] = None) -> str:
    """Render one stage to ``out_path`` as a standalone SVG."""
    sampled = frame[frame["kind"].isin(["perturbed1", "perturbed2", "mixed"])]
    refs = frame[frame["kind"].isin(["reference1", "reference2"])]
    markers = frame[frame["is_marker"] == 1]
    q = frame["modularity"]
    vmin, vmax = float(q.min()), float(q.max())
    if vmin == vmax:
        vmax = vmin + 1e-9

    plt.rcParams["svg.hashsalt"] = "hicode-lab"
    fig, ax = plt.subplots(figsize=(7, 6))
    points = ax.scatter(sampled["nmi1"], sampled["nmi2"], c=sampled["modularity"], cmap=COLORMAP,
                        vmin=vmin, vmax=vmax, s=6, linewidths=0)
    ax.scatter(refs["nmi1"], refs["nmi2"], c=refs["modularity"], cmap=COLORMAP, vmin=vmin, vmax=vmax,
               marker="*", s=160, edgecolors="black", linewidths=0.6, label="ground truth")
    if len(markers):
        ax.scatter(markers["nmi1"], markers["nmi2"], marker="x", s=90, color="darkred",
                   linewidths=2, label="detected")
    fig.colorbar(points, ax=ax, label="modularity")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("NMI with layer 1")
    ax.set_ylabel("NMI with layer 2")
    ax.set_title(title or (str(frame["stage"].iloc[0]) if len(frame) else "landscape"),
                 fontsize=12, fontweight="bold")
    ax.grid(alpha=0.3)
    ax.legend(loc="lower left", fontsize=8)

    out_dir = os.path.dirname(out_path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    plt.tight_layout()
    plt.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out_path


def plot_csv(csv_path: str, out_path: Optional[str] = None) -> str:
    if out_path is None:
        out_path = os.path.splitext(csv_path)[0] + ".svg"
    return plot_stage(read_stage_csv(csv_path), out_path)


def plot_directory(in_dir: str, out_dir: Optional[str] = None) -> List[str]:
    """Render every ``landscape_*.csv`` in ``in_dir``."""
    paths = sorted(glob.glob(os.path.join(in_dir, "landscape_*.csv")))
    if not paths:
        raise GraphFormatError(f"{in_dir}: no landscape_*.csv files")
    written = []
    for path in paths:
        name = os.path.splitext(os.path.basename(path))[0] + ".svg"
        written.append(plot_csv(path, os.path.join(out_dir or in_dir, name)))
        logger.info("plotted %s", written[-1])
    return written
