"""Connectivity measures on the pixel-adjacency graph and component labeling.

Two pixels have a neighbor connectivity given by an intensity similarity
measure; a path aggregates step connectivities by minimum or by product; the
degree of connectedness between two pixels is the best such value over all
simple paths. Thresholding the degree at a tolerance ``lam`` in [0, 1]
partitions the raster into components: the higher the tolerance, the finer
the segmentation.
"""

from __future__ import annotations

import csv
import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidPathError, UnsupportedCompositionError
from .image import ImageGrid, write_pgm

ADJACENCIES = (4, 8)
COMPOSITIONS = ("min", "product")


@dataclass(frozen=True)
class ConnectivityConfig:
    """Adjacency arity, similarity range, and path composition rule.

    ``normalization`` is the intensity range R of the similarity measure
    1 - |u - v| / R; None means "use the image's maxval".
    """

    adjacency: int = 4
    composition: str = "min"
    normalization: float | None = None

    def __post_init__(self):
        if self.adjacency not in ADJACENCIES:
            raise ValueError(f"adjacency must be 4 or 8, got {self.adjacency}")
        if self.composition not in COMPOSITIONS:
            raise ValueError(f"composition must be 'min' or 'product', got {self.composition!r}")
        if self.normalization is not None and not self.normalization > 0:
            raise ValueError("normalization range must be positive")

    def range_for(self, image: ImageGrid) -> float:
        return float(self.normalization) if self.normalization is not None else float(image.maxval)


@dataclass(frozen=True, eq=False)
class LabelMap:
    """Per-pixel component ids; 0 marks background, components run 1..M."""

    width: int
    height: int
    labels: np.ndarray = field(repr=False)  # shape (height, width), int32
    component_count: int = 0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.labels, dtype=np.int32).reshape(self.height, self.width)
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelMap):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.component_count == other.component_count
            and np.array_equal(self.labels, other.labels)
        )


def similarity(u: float, v: float, r: float) -> float:
    """Intensity closeness 1 - |u - v| / r, clamped to [0, 1].

    Symmetric, and 1 exactly when u == v.
    """
    a = 1.0 - abs(u - v) / r
    if a < 0.0:
        return 0.0
    return a


@lru_cache(maxsize=64)
def _neighbor_table(width: int, height: int, adjacency: int) -> tuple[tuple[int, ...], ...]:
    """Flat-index neighbor lists for a width x height grid."""
    if adjacency == 4:
        offsets = ((0, -1), (-1, 0), (1, 0), (0, 1))
    else:
        offsets = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))
    table = []
    for y in range(height):
        for x in range(width):
            nbrs = []
            for dx, dy in offsets:
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    nbrs.append(ny * width + nx)
            table.append(tuple(nbrs))
    return tuple(table)


def _check_coord(image: ImageGrid, pt) -> tuple[int, int]:
    x, y = int(pt[0]), int(pt[1])
    if not (0 <= x < image.width and 0 <= y < image.height):
        raise IndexError(f"pixel ({x}, {y}) outside {image.width}x{image.height} image")
    return x, y


def _adjacent(a: tuple[int, int], b: tuple[int, int], adjacency: int) -> bool:
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    if dx == 0 and dy == 0:
        return False
    if adjacency == 4:
        return dx + dy == 1
    return dx <= 1 and dy <= 1


def neighbor_connectivity(image: ImageGrid, a, b, config: ConnectivityConfig = ConnectivityConfig()) -> float:
    """Similarity of two pixels when adjacent under the configured arity, else 0."""
    ax, ay = _check_coord(image, a)
    bx, by = _check_coord(image, b)
    if not _adjacent((ax, ay), (bx, by), config.adjacency):
        return 0.0
    r = config.range_for(image)
    return similarity(image.pixels[ay, ax], image.pixels[by, bx], r)


def path_connectivity(path, image: ImageGrid, config: ConnectivityConfig = ConnectivityConfig()) -> float:
    """Aggregate step connectivity along a pixel path.

    The aggregate is the minimum step value or the product of step values,
    per ``config.composition``. A single-pixel path scores 1. Consecutive
    path entries must be adjacent.
    """
    pts = [_check_coord(image, p) for p in path]
    if not pts:
        raise InvalidPathError("empty path")
    r = config.range_for(image)
    out = 1.0
    for a, b in zip(pts, pts[1:]):
        if not _adjacent(a, b, config.adjacency):
            raise InvalidPathError(f"path step {a} -> {b} is not adjacent")
        step = similarity(image.pixels[a[1], a[0]], image.pixels[b[1], b[0]], r)
        if config.composition == "min":
            out = step if step < out else out
        else:
            out *= step
    return out


def connectedness_degree(image: ImageGrid, a, b, config: ConnectivityConfig = ConnectivityConfig()) -> float:
    """Best path connectivity between two pixels over all simple paths.

    Computed as a widest-path search: a best-first expansion where a path's
    score can never improve as it grows (both min and product composition
    shrink monotonically), so the first time the target is settled its score
    is optimal. Reflexive: the degree from a pixel to itself is 1.
    """
    ax, ay = _check_coord(image, a)
    bx, by = _check_coord(image, b)
    src = ay * image.width + ax
    dst = by * image.width + bx
    if src == dst:
        return 1.0
    r = config.range_for(image)
    use_min = config.composition == "min"
    nbrs = _neighbor_table(image.width, image.height, config.adjacency)
    pix = image.pixels.ravel().tolist()
    best = [0.0] * len(pix)
    best[src] = 1.0
    heap = [(-1.0, src)]
    settled = [False] * len(pix)
    while heap:
        negv, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        value = -negv
        if u == dst:
            return value
        pu = pix[u]
        for v in nbrs[u]:
            if settled[v]:
                continue
            d = pu - pix[v]
            if d < 0:
                d = -d
            step = 1.0 - d / r
            if step < 0.0:
                step = 0.0
            cand = min(value, step) if use_min else value * step
            if cand > best[v]:
                best[v] = cand
                heapq.heappush(heap, (-cand, v))
    return best[dst]


def segment(
    image: ImageGrid,
    lam: float,
    config: ConnectivityConfig = ConnectivityConfig(),
    background: np.ndarray | None = None,
) -> LabelMap:
    """Partition the raster into components connected at tolerance ``lam``.

    Two unmasked pixels share a label exactly when a path joins them whose
    every step has neighbor connectivity >= lam. Only the min composition is
    supported here: under it, co-connectedness at a fixed tolerance is an
    equivalence relation and components coincide with the connected
    components of the graph that keeps edges at or above the tolerance.
    Components are numbered 1..M by first raster-scan encounter; masked
    pixels get label 0.
    """
    if config.composition != "min":
        raise UnsupportedCompositionError(
            "segmentation requires min composition; product path scores are not transitive"
        )
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    w, h = image.width, image.height
    n = w * h
    r = config.range_for(image)
    lam = float(lam)
    nbrs = _neighbor_table(w, h, config.adjacency)
    pix = image.pixels.ravel().tolist()
    if background is not None:
        bg = np.asarray(background, dtype=bool).ravel()
        if bg.size != n:
            raise ValueError("background mask shape does not match image")
        bg = bg.tolist()
    else:
        bg = [False] * n

    labels = [0] * n
    next_label = 1
    queue = deque()
    for seed in range(n):
        if labels[seed] or bg[seed]:
            continue
        labels[seed] = next_label
        queue.append(seed)
        while queue:
            u = queue.popleft()
            pu = pix[u]
            for v in nbrs[u]:
                if labels[v] or bg[v]:
                    continue
                d = pu - pix[v]
                if d < 0:
                    d = -d
                a = 1.0 - d / r
                if a < 0.0:
                    a = 0.0
                if a >= lam:
                    labels[v] = next_label
                    queue.append(v)
        next_label += 1
    return LabelMap(
        width=w,
        height=h,
        labels=np.array(labels, dtype=np.int32).reshape(h, w),
        component_count=next_label - 1,
    )


def write_label_pgm(labels: LabelMap, path) -> None:
    """Serialize a label map as a 16-bit binary PGM (label ids as samples)."""
    if labels.component_count > 65535:
        raise ValueError("label map has more than 65535 components; cannot fit 16-bit PGM")
    img = ImageGrid(width=labels.width, height=labels.height, maxval=65535, pixels=labels.labels)
    write_pgm(img, path, binary=True)


def write_label_csv(labels: LabelMap, path) -> None:
    """Serialize a label map as CSV rows ``x,y,label`` (x = column, y = row)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "label"])
        arr = labels.labels
        for y in range(labels.height):
            row = arr[y]
            for x in range(labels.width):
                writer.writerow([x, y, int(row[x])])
