"""Figure rendering for sweep curves, threshold criteria, and label maps.

Everything here renders straight to files with the Agg backend, so the
report path works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .connectivity import LabelMap
from .image import ImageGrid
from .objectives import SweepReport
from .thresholding import ThresholdResult


def save_sweep_figure(report: SweepReport, path, dpi: int = 150) -> None:
    """Objective curve over the tolerance grid with the selection marked."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(report.grid, report.objective_values, color="tab:blue", lw=1.5, label=report.objective_kind)
    ax.axvline(report.selected_lambda, color="tab:red", ls="--", lw=1.0,
               label=f"selected = {report.selected_lambda:g}")
    ax.set_xlabel("lambda")
    ax.set_ylabel(f"objective ({report.direction})")
    ax2 = ax.twinx()
    ax2.step(report.grid, report.component_counts, where="post", color="tab:gray", lw=1.0, alpha=0.6)
    ax2.set_ylabel("components", color="tab:gray")
    ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def save_criterion_figure(result: ThresholdResult, path, dpi: int = 150) -> None:
    """Threshold criterion curve with the chosen threshold marked."""
    ts = [t for t, _ in result.curve]
    vs = [v for _, v in result.curve]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ts, vs, color="tab:blue", lw=1.2)
    ax.axvline(result.threshold, color="tab:red", ls="--", lw=1.0,
               label=f"threshold = {result.threshold}")
    ax.set_xlabel("t")
    ax.set_ylabel("criterion")
    ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def save_labels_figure(labels: LabelMap, path, dpi: int = 150) -> None:
    """Label map rendered with a qualitative colormap; background is black."""
    arr = np.ma.masked_equal(labels.labels, 0)
    cmap = plt.get_cmap("tab20").copy()
    cmap.set_bad(color="black")
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(arr, cmap=cmap, interpolation="nearest")
    ax.set_title(f"{labels.component_count} components")
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def save_image_figure(image: ImageGrid, path, dpi: int = 150) -> None:
    """Grayscale rendering of a raster."""
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(image.pixels, cmap="gray", vmin=0, vmax=image.maxval, interpolation="nearest")
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
