"""Static SVG figures: scatter, line and KDE heatmap primitives on the Agg backend."""
import logging
from pathlib import Path
from typing import Dict, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

logger = logging.getLogger(__name__)

# svg.hashsalt keeps element ids stable so reruns write identical files
plt.rcParams["svg.hashsalt"] = "pafm"
plt.rcParams["svg.fonttype"] = "none"


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"🖼️ Wrote {path}")
    return path


def scatter_svg(path, layers: Sequence[Tuple[str, np.ndarray]], title: str = "") -> Path:
    """One scatter layer per (label, points) pair, first layer drawn underneath."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for label, points in layers:
        points = np.asarray(points)
        ax.scatter(points[:, 0], points[:, 1], s=2, alpha=0.5, label=label)
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="upper right", markerscale=4)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def line_svg(
    path,
    series: Dict[str, Tuple[np.ndarray, np.ndarray]],
    xlabel: str,
    ylabel: str,
    title: str = "",
    log_y: bool = False,
) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (x, y) in series.items():
        ax.plot(np.asarray(x), np.asarray(y), label=label, linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if log_y:
        ax.set_yscale("log")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def heatmap_grid_svg(
    path,
    grids: Sequence[Sequence[np.ndarray]],
    extent: Tuple[float, float, float, float],
    row_titles: Sequence[str],
    col_titles: Sequence[str],
) -> Path:
    """grids[r][c] is a 2-D density image over ``extent`` = (xmin, xmax, ymin, ymax)."""
    n_rows, n_cols = len(grids), len(grids[0])
    fig, axes = plt.subplots(n_rows, n_cols, figsize=(2.2 * n_cols, 2.2 * n_rows), squeeze=False)
    for r in range(n_rows):
        for c in range(n_cols):
            ax = axes[r][c]
            ax.imshow(grids[r][c], origin="lower", extent=extent, cmap="viridis", aspect="auto")
            ax.set_xticks([])
            ax.set_yticks([])
            if r == 0:
                ax.set_title(col_titles[c], fontsize=9)
            if c == 0:
                ax.set_ylabel(row_titles[r], fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def density_image(density_fn, extent: Tuple[float, float, float, float], resolution: int = 64) -> np.ndarray:
    """Evaluate ``density_fn(queries)`` on a resolution x resolution lattice over ``extent``."""
    xs = np.linspace(extent[0], extent[1], resolution)
    ys = np.linspace(extent[2], extent[3], resolution)
    gx, gy = np.meshgrid(xs, ys)
    queries = np.stack([gx.ravel(), gy.ravel()], axis=1)
    return np.asarray(density_fn(queries)).reshape(resolution, resolution)
