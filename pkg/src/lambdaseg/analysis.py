"""Post-segmentation component selection and extraction."""

from __future__ import annotations

import csv

import numpy as np

from .connectivity import LabelMap
from .errors import EmptySelectionError
from .image import ImageGrid
from .objectives import ComponentStats

SELECTION_CRITERIA = ("largest", "brightest")


def largest_component(stats: list[ComponentStats]) -> int:
    """Label of the component with the most pixels; ties break to the
    smallest label."""
    if not stats:
        raise EmptySelectionError("no components to select from")
    best = stats[0]
    for s in stats[1:]:
        if s.size > best.size:
            best = s
    return best.label


def brightest_component(stats: list[ComponentStats]) -> int:
    """Label of the component with the largest total intensity; ties break
    to the smallest label."""
    if not stats:
        raise EmptySelectionError("no components to select from")
    best = stats[0]
    for s in stats[1:]:
        if s.total_intensity > best.total_intensity:
            best = s
    return best.label


def select_component(stats: list[ComponentStats], criterion: str) -> int:
    if criterion == "largest":
        return largest_component(stats)
    if criterion == "brightest":
        return brightest_component(stats)
    raise ValueError(f"criterion must be one of {SELECTION_CRITERIA}, got {criterion!r}")


def extract_component(labels: LabelMap, component: int, image: ImageGrid) -> ImageGrid:
    """Zero out every pixel outside the chosen component."""
    if not 1 <= component <= labels.component_count:
        raise ValueError(
            f"component {component} does not exist (1..{labels.component_count})"
        )
    keep = labels.labels == component
    out = np.where(keep, image.pixels, 0)
    return ImageGrid(width=image.width, height=image.height, maxval=image.maxval, pixels=out)


def write_stats_csv(stats: list[ComponentStats], path) -> None:
    """Write component statistics as CSV rows
    ``id,size,mean,variance,total_intensity,entropy``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "size", "mean", "variance", "total_intensity", "entropy"])
        for s in stats:
            writer.writerow(
                [s.label, s.size, repr(s.mean), repr(s.variance), repr(s.total_intensity), repr(s.entropy)]
            )
