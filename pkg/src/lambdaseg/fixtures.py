"""Bundled synthetic scenes with known ground truth.

The main scene plants a bright gradual-variation blob (a linear intensity
ramp) on a dark noisy background next to a textured band, so pre-cut
thresholds, tolerance sweeps, and component selection can be validated end
to end without external imagery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import ImageGrid

# High-frequency texture tile, zero-sum with period 3 in both axes, so a
# 3x3 box mean cancels it exactly away from region borders. Adjacent-cell
# differences (including tile wrap-around) span 6..48, so textured regions
# shatter gradually over tolerances ~0.81..0.977 and are fully reduced to
# singletons by 0.98.
_TEXTURE_TILE = np.array(
    [
        [27, -15, -6],
        [-21, 15, 9],
        [-15, 6, 0],
    ],
    dtype=np.int64,
)


@dataclass(frozen=True, eq=False)
class BlobScene:
    """Synthetic frame and the boolean mask of the planted blob."""

    image: ImageGrid
    truth: np.ndarray = field(repr=False)

    @property
    def blob_pixels(self) -> int:
        return int(np.count_nonzero(self.truth))


def gradual_blob(seed: int = 20207) -> BlobScene:
    """64x64 scene: dark noisy background, bright ramp blob, textured band.

    Layout (values before any smoothing):

    * background: quantized noise over {0, 3, ..., 45};
    * blob: 16x16 square at rows/cols 6..21, horizontal ramp 160..220
      (step 4 per column), the brightest structure in the frame;
    * band: rows 34..57, cols 4..59 at base 96, with an interior island
      (rows 37..54, cols 22..40) lifted by 72, both carrying the zero-sum
      texture tile.

    The texture gives the frame a strong high-tolerance entropy peak while
    it survives, and a box smooth removes it exactly, flattening that peak;
    the blob's ramp steps of 4 keep it a single component for every
    tolerance up to 0.98. Deterministic for a fixed seed.
    """
    size = 64
    rng = np.random.default_rng(seed)
    img = rng.integers(0, 16, size=(size, size), dtype=np.int64) * 3

    b0, bs = 6, 16
    cols = np.arange(bs, dtype=np.int64)
    img[b0 : b0 + bs, b0 : b0 + bs] = 160 + 4 * cols[np.newaxis, :]
    truth = np.zeros((size, size), dtype=bool)
    truth[b0 : b0 + bs, b0 : b0 + bs] = True

    hz0, hz1, hc0, hc1 = 34, 58, 4, 60
    ys, xs = np.mgrid[hz0:hz1, hc0:hc1]
    band = np.full((hz1 - hz0, hc1 - hc0), 96, dtype=np.int64)
    island = (ys >= 37) & (ys < 55) & (xs >= 22) & (xs < 41)
    band += island * 72
    band += _TEXTURE_TILE[ys % 3, xs % 3]
    img[hz0:hz1, hc0:hc1] = band

    return BlobScene(image=ImageGrid.from_array(img, maxval=255), truth=truth)


def pixel_set_f1(predicted: np.ndarray, truth: np.ndarray) -> float:
    """F1 overlap between two boolean pixel masks."""
    p = np.asarray(predicted, dtype=bool)
    t = np.asarray(truth, dtype=bool)
    inter = int(np.count_nonzero(p & t))
    denom = int(np.count_nonzero(p)) + int(np.count_nonzero(t))
    if denom == 0:
        return 1.0
    return 2.0 * inter / denom
