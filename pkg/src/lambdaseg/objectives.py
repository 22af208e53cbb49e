"""Segmentation-level objectives and the tolerance sweep that selects lambda.

Three families are provided, all evaluated on a label map:

* entropy: sum of per-component intensity entropies (optionally combined
  with complement entropies), maximized;
* variance: sum of per-component population variances plus a component
  count penalty, or the per-component average, minimized;
* piecewise-constant functional: fitted-raster variance, boundary length,
  and fit error with user weights, minimized.

``sweep_select`` evaluates one objective across a tolerance grid and picks
the optimizing lambda, breaking ties toward the smallest grid value.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import isfinite, log

import numpy as np

from .connectivity import ConnectivityConfig, LabelMap, segment
from .image import Histogram, ImageGrid

log_ = logging.getLogger(__name__)

OBJECTIVE_DIRECTIONS = {
    "max-entropy": "maximize",
    "max-entropy-combined": "maximize",
    "min-variance": "minimize",
    "min-variance-avg": "minimize",
    "mumford-shah": "minimize",
}

THREADS_ENV = "LAMBDASEG_THREADS"


@dataclass(frozen=True)
class ComponentStats:
    """Summary statistics of one labeled component."""

    label: int
    size: int
    histogram: Histogram
    mean: float
    variance: float
    total_intensity: float
    entropy: float


@dataclass(frozen=True)
class MumfordShahWeights:
    """Weights of the piecewise-constant functional plus the component
    count penalty ``c`` used by the variance objective."""

    alpha_w: float = 1.0
    beta_w: float = 1.0
    gamma_w: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        for name in ("alpha_w", "beta_w", "gamma_w", "c"):
            v = getattr(self, name)
            if not (isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True)
class SweepReport:
    """Objective curve over the tolerance grid and the selected optimum."""

    grid: tuple[float, ...]
    objective_values: tuple[float, ...]
    component_counts: tuple[int, ...]
    selected_lambda: float
    selected_components: int
    objective_kind: str
    direction: str
    params: dict = field(default_factory=dict)

    @property
    def selected_value(self) -> float:
        return self.objective_values[self.grid.index(self.selected_lambda)]


def _split_foreground(image: ImageGrid, labels: LabelMap):
    if labels.labels.shape != image.pixels.shape:
        raise ValueError("label map does not match image dimensions")
    lab = labels.labels.ravel()
    fg = lab > 0
    return lab[fg], image.pixels.ravel()[fg]


def _moments(lab, vals, m):
    """Per-component size, intensity sum, and squared-intensity sum."""
    v = vals.astype(np.float64)
    sizes = np.bincount(lab, minlength=m + 1)[1:]
    totals = np.bincount(lab, weights=v, minlength=m + 1)[1:]
    sumsq = np.bincount(lab, weights=v * v, minlength=m + 1)[1:]
    return sizes, totals, sumsq


def _value_counts(lab, vals, base):
    """Sparse per-component intensity counts via composite keys."""
    keys = lab.astype(np.int64) * base + vals.astype(np.int64)
    uniq, counts = np.unique(keys, return_counts=True)
    return (uniq // base).astype(np.intp), (uniq % base).astype(np.intp), counts


def _entropies(lab, vals, sizes, m, base):
    comp, _, counts = _value_counts(lab, vals, base)
    p = counts / sizes[comp - 1]
    terms = -p * np.log(p)
    return np.bincount(comp, weights=terms, minlength=m + 1)[1:]


def component_stats(image: ImageGrid, labels: LabelMap) -> list[ComponentStats]:
    """Per-component size, histogram, mean, population variance, total
    intensity, and entropy (nats). Background pixels are excluded."""
    m = labels.component_count
    if m == 0:
        return []
    lab, vals = _split_foreground(image, labels)
    base = image.maxval + 1
    sizes, totals, sumsq = _moments(lab, vals, m)
    means = totals / sizes
    variances = np.maximum(sumsq / sizes - means * means, 0.0)
    entropies = _entropies(lab, vals, sizes, m, base)
    comp, val, counts = _value_counts(lab, vals, base)
    grid_counts = np.zeros((m, base), dtype=np.int64)
    grid_counts[comp - 1, val] = counts
    return [
        ComponentStats(
            label=i + 1,
            size=int(sizes[i]),
            histogram=Histogram(counts=grid_counts[i], total=int(sizes[i])),
            mean=float(means[i]),
            variance=float(variances[i]),
            total_intensity=float(totals[i]),
            entropy=float(entropies[i]),
        )
        for i in range(m)
    ]


def histogram_entropy(hist: Histogram) -> float:
    """Entropy in nats of a histogram's intensity distribution."""
    c = hist.counts[hist.counts > 0]
    p = c / hist.total
    return float(np.sum(-p * np.log(p)) + 0.0)


def inner_entropy_total(image: ImageGrid, labels: LabelMap) -> float:
    """Sum of per-component intensity entropies in nats (0 when no components)."""
    m = labels.component_count
    if m == 0:
        return 0.0
    lab, vals = _split_foreground(image, labels)
    sizes = np.bincount(lab, minlength=m + 1)[1:]
    ent = _entropies(lab, vals, sizes, m, image.maxval + 1)
    return float(np.sum(ent) + 0.0)


def outer_entropy_total(image: ImageGrid, labels: LabelMap, average: bool = False) -> float:
    """Sum over components of the entropy of the component's complement.

    The complement of a component is the multiset of all other labeled
    pixels; background pixels never enter it. A component covering every
    labeled pixel has an empty complement and contributes 0. With
    ``average`` the sum is divided by the component count.
    """
    m = labels.component_count
    if m == 0:
        raise ValueError("outer entropy of an empty segmentation")
    lab, vals = _split_foreground(image, labels)
    base = image.maxval + 1
    n_total = lab.size
    sizes = np.bincount(lab, minlength=m + 1)[1:]
    whole = np.bincount(vals, minlength=base).astype(np.float64)

    def f(x):
        out = np.zeros_like(x, dtype=np.float64)
        pos = x > 0
        out[pos] = x[pos] * np.log(x[pos])
        return out

    s_all = float(np.sum(f(whole)))
    comp, val, counts = _value_counts(lab, vals, base)
    # removing a component only changes the terms of the values it contains
    removed = f(whole[val]) - f(whole[val] - counts)
    delta = np.bincount(comp, weights=removed, minlength=m + 1)[1:]
    rest = n_total - sizes
    total = 0.0
    for i in range(m):
        if rest[i] == 0:
            log_.debug("component %d covers every labeled pixel; empty complement contributes 0", i + 1)
            continue
        total += log(rest[i]) - (s_all - delta[i]) / rest[i]
    return total / m if average else total


def combined_entropy(
    image: ImageGrid,
    labels: LabelMap,
    a: float = 1.0,
    b: float = 1.0,
    average_outer: bool = False,
) -> float:
    """Weighted sum a * inner entropy + b * complement entropy."""
    if not (isfinite(a) and isfinite(b)):
        raise ValueError("entropy weights must be finite")
    value = 0.0
    if a != 0.0:
        value += a * inner_entropy_total(image, labels)
    if b != 0.0:
        value += b * outer_entropy_total(image, labels, average=average_outer)
    return value


def min_variance_objective(
    image: ImageGrid,
    labels: LabelMap,
    c: float = 1.0,
    average: bool = False,
) -> float:
    """Sum of per-component population variances plus c * component count.

    In average mode the variance sum is divided by the component count and
    the penalty term is dropped.
    """
    m = labels.component_count
    if m == 0:
        raise ValueError("variance objective of an empty segmentation")
    lab, vals = _split_foreground(image, labels)
    sizes, totals, sumsq = _moments(lab, vals, m)
    means = totals / sizes
    variances = np.maximum(sumsq / sizes - means * means, 0.0)
    total = float(np.sum(variances) + 0.0)
    if average:
        return total / m
    return total + c * m


def boundary_length(labels: LabelMap) -> int:
    """Number of 4-adjacent pixel pairs with differing labels (background
    boundaries included)."""
    lab = labels.labels
    horiz = int(np.count_nonzero(lab[:, :-1] != lab[:, 1:]))
    vert = int(np.count_nonzero(lab[:-1, :] != lab[1:, :]))
    return horiz + vert


def fit_image(image: ImageGrid, labels: LabelMap) -> np.ndarray:
    """Piecewise-constant fit: each pixel replaced by its component's mean.

    Background pixels pass through unchanged. Returns a float64 raster of
    the image's shape.
    """
    m = labels.component_count
    out = image.pixels.astype(np.float64)
    if m == 0:
        return out
    lab = labels.labels.ravel()
    fg = lab > 0
    vals = image.pixels.ravel()[fg]
    sizes, totals, _ = _moments(lab[fg], vals, m)
    means = totals / sizes
    flat = out.ravel()
    flat[fg] = means[lab[fg] - 1]
    return flat.reshape(image.height, image.width)


def mumford_shah_objective(
    image: ImageGrid,
    labels: LabelMap,
    weights: MumfordShahWeights = MumfordShahWeights(),
) -> float:
    """Weighted piecewise-constant functional alpha * V + beta * L + gamma * D.

    V sums the within-component population variance of the fitted raster
    (identically 0 under the mean fit), L is the boundary length, and D is
    the sum of squared differences between fitted and original rasters.
    """
    fitted = fit_image(image, labels)
    m = labels.component_count
    v_term = 0.0
    if m > 0:
        lab = labels.labels.ravel()
        fg = lab > 0
        lab_fg = lab[fg]
        fit_fg = fitted.ravel()[fg]
        sizes = np.bincount(lab_fg, minlength=m + 1)[1:]
        means = np.bincount(lab_fg, weights=fit_fg, minlength=m + 1)[1:] / sizes
        dev = fit_fg - means[lab_fg - 1]
        per_comp = np.bincount(lab_fg, weights=dev * dev, minlength=m + 1)[1:] / sizes
        v_term = float(np.sum(per_comp) + 0.0)
    l_term = float(boundary_length(labels))
    diff = fitted - image.pixels
    d_term = float(np.sum(diff * diff))
    return weights.alpha_w * v_term + weights.beta_w * l_term + weights.gamma_w * d_term


def default_grid(steps: int = 100) -> tuple[float, ...]:
    """Evenly spaced tolerance grid {k / steps : k = 0..steps}."""
    return tuple(k / steps for k in range(steps + 1))


def _resolve_threads(threads: int | None, jobs: int) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "0")
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    if threads == 0:
        threads = min(os.cpu_count() or 1, jobs, 8)
    return max(1, min(threads, jobs))


def evaluate_objective(
    kind: str,
    image: ImageGrid,
    labels: LabelMap,
    weights: MumfordShahWeights = MumfordShahWeights(),
    a: float = 1.0,
    b: float = 1.0,
    average_outer: bool = False,
) -> float:
    """Evaluate one objective kind on a fixed segmentation."""
    if kind == "max-entropy":
        return inner_entropy_total(image, labels)
    if kind == "max-entropy-combined":
        return combined_entropy(image, labels, a=a, b=b, average_outer=average_outer)
    if kind == "min-variance":
        return min_variance_objective(image, labels, c=weights.c, average=False)
    if kind == "min-variance-avg":
        return min_variance_objective(image, labels, average=True)
    if kind == "mumford-shah":
        return mumford_shah_objective(image, labels, weights)
    raise ValueError(f"unknown objective kind {kind!r}")


def sweep_select(
    image: ImageGrid,
    config: ConnectivityConfig,
    objective_kind: str,
    grid=None,
    *,
    weights: MumfordShahWeights | None = None,
    a: float = 1.0,
    b: float = 1.0,
    average_outer: bool = False,
    background: np.ndarray | None = None,
    threads: int | None = None,
) -> SweepReport:
    """Segment at every grid tolerance, evaluate the objective, and select.

    Entropy kinds are maximized, variance and piecewise-constant kinds are
    minimized; ties break toward the smallest tolerance. Grid points are
    independent and may be evaluated concurrently (``threads``; 0 or the
    LAMBDASEG_THREADS variable means auto), with results merged in grid
    order so the report is deterministic.
    """
    if objective_kind not in OBJECTIVE_DIRECTIONS:
        raise ValueError(f"unknown objective kind {objective_kind!r}")
    grid = default_grid() if grid is None else tuple(float(g) for g in grid)
    if not grid:
        raise ValueError("tolerance grid is empty")
    if any(not 0.0 <= g <= 1.0 for g in grid):
        raise ValueError("grid values must lie in [0, 1]")
    if any(g2 <= g1 for g1, g2 in zip(grid, grid[1:])):
        raise ValueError("grid values must be strictly increasing")
    weights = weights or MumfordShahWeights()

    def evaluate(lam: float) -> tuple[float, int]:
        labels = segment(image, lam, config, background=background)
        value = evaluate_objective(
            objective_kind, image, labels, weights=weights, a=a, b=b, average_outer=average_outer
        )
        return value, labels.component_count

    workers = _resolve_threads(threads, len(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, grid))
    else:
        results = [evaluate(g) for g in grid]

    values = tuple(r[0] for r in results)
    counts = tuple(r[1] for r in results)
    direction = OBJECTIVE_DIRECTIONS[objective_kind]
    best = 0
    for i in range(1, len(grid)):
        if direction == "maximize":
            if values[i] > values[best]:
                best = i
        elif values[i] < values[best]:
            best = i
    return SweepReport(
        grid=grid,
        objective_values=values,
        component_counts=counts,
        selected_lambda=grid[best],
        selected_components=counts[best],
        objective_kind=objective_kind,
        direction=direction,
        params={
            "a": a,
            "b": b,
            "average_outer": average_outer,
            "c": weights.c,
            "alpha_w": weights.alpha_w,
            "beta_w": weights.beta_w,
            "gamma_w": weights.gamma_w,
        },
    )


def write_sweep_csv(report: SweepReport, path) -> None:
    """Write the sweep curve as CSV rows ``lambda,objective,components``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "objective", "components"])
        for lam, val, m in zip(report.grid, report.objective_values, report.component_counts):
            writer.writerow([repr(lam), repr(val), m])


def sweep_summary(report: SweepReport) -> dict:
    """JSON-ready summary: selected tolerance, kind, weights, grid bounds."""
    return {
        "selected_lambda": report.selected_lambda,
        "selected_components": report.selected_components,
        "objective_at_selected": report.selected_value,
        "objective_kind": report.objective_kind,
        "direction": report.direction,
        "params": dict(report.params),
        "grid": {
            "start": report.grid[0],
            "end": report.grid[-1],
            "count": len(report.grid),
        },
    }
