"""Smoothing and pre-cut masking applied before segmentation.

A pre-cut computes a global threshold and marks every pixel strictly below
it as background, so sub-threshold area can never join a component. Pixel
values themselves are not altered by masking. When smoothing is requested
it runs first, and the threshold is computed from the smoothed frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import ImageGrid, histogram
from .thresholding import kapur_threshold, otsu_threshold, peak_fraction_threshold

PRECUT_METHODS = ("none", "kapur", "otsu", "peak-fraction", "fixed")
SMOOTHING_KINDS = ("none", "box3")


@dataclass(frozen=True)
class PrecutSpec:
    """Pre-cut method, its parameter, and the smoothing step preceding it."""

    method: str = "none"
    fraction: float = 0.45  # peak-fraction parameter
    threshold: int | None = None  # fixed parameter
    smoothing: str = "none"

    def __post_init__(self):
        if self.method not in PRECUT_METHODS:
            raise ValueError(f"method must be one of {PRECUT_METHODS}, got {self.method!r}")
        if self.smoothing not in SMOOTHING_KINDS:
            raise ValueError(f"smoothing must be one of {SMOOTHING_KINDS}, got {self.smoothing!r}")
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if self.method == "fixed":
            if self.threshold is None or self.threshold < 0:
                raise ValueError("fixed pre-cut needs a non-negative threshold")


@dataclass(frozen=True, eq=False)
class PrecutResult:
    """Preprocessed frame, background mask (True = excluded), and the
    threshold actually applied (None when no cut was made)."""

    image: ImageGrid
    background: np.ndarray = field(repr=False)
    threshold: int | None
    method: str
    smoothing: str

    @property
    def masked_pixels(self) -> int:
        return int(np.count_nonzero(self.background))


def box_smooth(image: ImageGrid) -> ImageGrid:
    """3x3 box mean with replicate padding, rounded half-up.

    Output dimensions and maxval match the input; values stay within the
    input's [min, max] range.
    """
    padded = np.pad(image.pixels.astype(np.int64), 1, mode="edge")
    total = np.zeros((image.height, image.width), dtype=np.int64)
    for dy in range(3):
        for dx in range(3):
            total += padded[dy : dy + image.height, dx : dx + image.width]
    # round-half-up of total/9 in exact integer arithmetic
    smoothed = (2 * total + 9) // 18
    return ImageGrid(width=image.width, height=image.height, maxval=image.maxval, pixels=smoothed)


def _compute_threshold(image: ImageGrid, spec: PrecutSpec) -> int | None:
    if spec.method == "none":
        return None
    if spec.method == "fixed":
        if spec.threshold > image.maxval:
            raise ValueError(f"fixed threshold {spec.threshold} exceeds maxval {image.maxval}")
        return int(spec.threshold)
    if spec.method == "kapur":
        return kapur_threshold(histogram(image)).threshold
    if spec.method == "otsu":
        return otsu_threshold(histogram(image)).threshold
    return peak_fraction_threshold(image, spec.fraction)


def apply_precut(image: ImageGrid, spec: PrecutSpec) -> PrecutResult:
    """Smooth (optionally), compute the pre-cut threshold, and mask.

    Pixels with value < t become background; pixels at or above t are kept.
    Threshold failures (degenerate histograms) propagate to the caller.
    """
    frame = box_smooth(image) if spec.smoothing == "box3" else image
    t = _compute_threshold(frame, spec)
    if t is None:
        mask = np.zeros((frame.height, frame.width), dtype=bool)
    else:
        mask = frame.pixels < t
    return PrecutResult(
        image=frame,
        background=mask,
        threshold=t,
        method=spec.method,
        smoothing=spec.smoothing,
    )
