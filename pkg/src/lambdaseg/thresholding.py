"""Global threshold baselines: maximum-entropy, between-class variance, and
peak-fraction clip levels.

The two histogram methods share a convention: a candidate threshold t puts
values <= t in the low class and values > t in the high class, and only
thresholds where both classes are populated are valid. Ties break toward
the smallest threshold.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import floor

import numpy as np

from .errors import DegenerateHistogramError
from .image import Histogram, ImageGrid

PEAK_SOURCES = ("max", "mode")


@dataclass(frozen=True)
class ThresholdResult:
    """Selected threshold, its criterion value, and the full criterion curve."""

    threshold: int
    criterion_value: float
    curve: tuple[tuple[int, float], ...]


def _valid_range(counts: np.ndarray) -> tuple[int, int]:
    populated = np.nonzero(counts)[0]
    if len(populated) < 2:
        raise DegenerateHistogramError(
            f"need at least 2 distinct populated bins, found {len(populated)}"
        )
    # both classes non-empty: t from the first populated bin up to just
    # below the last one
    return int(populated[0]), int(populated[-1]) - 1


def kapur_threshold(hist: Histogram) -> ThresholdResult:
    """Maximum-entropy threshold: maximize the summed within-class entropies.

    For each valid t the low class (values <= t) and high class (values > t)
    are treated as distributions normalized within the class, and the
    criterion is the sum of their entropies in nats.
    """
    counts = hist.counts.astype(np.float64)
    t_lo, t_hi = _valid_range(hist.counts)
    csum = np.cumsum(counts)
    total = csum[-1]
    clogc = np.where(counts > 0, counts * np.log(np.where(counts > 0, counts, 1.0)), 0.0)
    ssum = np.cumsum(clogc)
    s_total = ssum[-1]

    ts = np.arange(t_lo, t_hi + 1)
    p_lo = csum[ts]
    p_hi = total - p_lo
    h_lo = np.log(p_lo) - ssum[ts] / p_lo
    h_hi = np.log(p_hi) - (s_total - ssum[ts]) / p_hi
    crit = h_lo + h_hi
    best = int(np.argmax(crit))
    return ThresholdResult(
        threshold=int(ts[best]),
        criterion_value=float(crit[best]),
        curve=tuple((int(t), float(v)) for t, v in zip(ts, crit)),
    )


def otsu_threshold(hist: Histogram) -> ThresholdResult:
    """Between-class variance threshold: maximize w_lo * w_hi * (mu_lo - mu_hi)^2.

    Weights are class probabilities; since the total variance is fixed for a
    given histogram, maximizing the between-class variance is the same as
    minimizing the within-class variance.
    """
    counts = hist.counts.astype(np.float64)
    t_lo, t_hi = _valid_range(hist.counts)
    total = float(hist.total)
    values = np.arange(len(counts), dtype=np.float64)
    csum = np.cumsum(counts)
    msum = np.cumsum(counts * values)
    m_total = msum[-1]

    ts = np.arange(t_lo, t_hi + 1)
    n_lo = csum[ts]
    n_hi = total - n_lo
    mu_lo = msum[ts] / n_lo
    mu_hi = (m_total - msum[ts]) / n_hi
    crit = (n_lo / total) * (n_hi / total) * (mu_lo - mu_hi) ** 2
    best = int(np.argmax(crit))
    return ThresholdResult(
        threshold=int(ts[best]),
        criterion_value=float(crit[best]),
        curve=tuple((int(t), float(v)) for t, v in zip(ts, crit)),
    )


def peak_fraction_threshold(image: ImageGrid, fraction: float = 0.45, source: str = "max") -> int:
    """Clip level at a fraction of the image's peak intensity.

    ``source`` selects what "peak" means: "max" (default) uses the maximum
    pixel value of the frame; "mode" uses the most frequent intensity
    (smallest on ties). The result is the fraction of the peak rounded
    half-up to an integer.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if source not in PEAK_SOURCES:
        raise ValueError(f"source must be one of {PEAK_SOURCES}, got {source!r}")
    if source == "max":
        peak = int(image.pixels.max())
    else:
        counts = np.bincount(image.pixels.ravel(), minlength=image.maxval + 1)
        peak = int(np.argmax(counts))
    return int(floor(fraction * peak + 0.5))


def write_criterion_csv(result: ThresholdResult, path) -> None:
    """Write the criterion curve as CSV rows ``t,criterion``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "criterion"])
        for t, v in result.curve:
            writer.writerow([t, repr(v)])
