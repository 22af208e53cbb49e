"""Grayscale raster type, intensity histograms, and PGM (P2/P5) file I/O.

Pixel data is stored row-major with the origin at the top-left corner,
matching the PGM raster order, so files round-trip bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptySelectionError,
    FormatError,
    TruncationError,
    UnsupportedFormatError,
)

MAX_MAXVAL = 65535


@dataclass(frozen=True, eq=False)
class ImageGrid:
    """Rectangular grayscale raster with integer samples in ``[0, maxval]``.

    The pixel array is made read-only on construction; instances can be
    shared freely across threads.
    """

    width: int
    height: int
    maxval: int
    pixels: np.ndarray = field(repr=False)  # shape (height, width)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        if not 1 <= self.maxval <= MAX_MAXVAL:
            raise ValueError(f"maxval must be in [1, {MAX_MAXVAL}], got {self.maxval}")
        arr = np.asarray(self.pixels)
        if arr.shape != (self.height, self.width):
            arr = arr.reshape(self.height, self.width)
        arr = np.ascontiguousarray(arr, dtype=np.int32)
        if arr.size and (arr.min() < 0 or arr.max() > self.maxval):
            raise ValueError("pixel values must lie in [0, maxval]")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_array(cls, arr, maxval: int = 255) -> "ImageGrid":
        arr = np.asarray(arr)
        h, w = arr.shape
        return cls(width=w, height=h, maxval=maxval, pixels=arr)

    @property
    def size(self) -> int:
        return self.width * self.height

    def value_at(self, x: int, y: int) -> int:
        """Intensity at column ``x``, row ``y``."""
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise IndexError(f"pixel ({x}, {y}) outside {self.width}x{self.height} image")
        return int(self.pixels[y, x])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageGrid):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.maxval == other.maxval
            and np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True, eq=False)
class Histogram:
    """Intensity counts indexed ``0..maxval`` plus the selected pixel total."""

    counts: np.ndarray = field(repr=False)
    total: int = 0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.counts, dtype=np.int64)
        arr.flags.writeable = False
        object.__setattr__(self, "counts", arr)
        if int(arr.sum()) != self.total:
            raise ValueError("histogram counts do not sum to total")

    @property
    def maxval(self) -> int:
        return len(self.counts) - 1

    def populated_bins(self) -> int:
        return int(np.count_nonzero(self.counts))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Histogram):
            return NotImplemented
        return self.total == other.total and np.array_equal(self.counts, other.counts)


def histogram(image: ImageGrid, background: np.ndarray | None = None) -> Histogram:
    """Count intensities of the image, skipping pixels flagged in ``background``.

    ``background`` is an optional boolean array (True = excluded) with the
    image's shape. Raises EmptySelectionError when no pixel survives.
    """
    vals = image.pixels.ravel()
    if background is not None:
        keep = ~np.asarray(background, dtype=bool).ravel()
        vals = vals[keep]
    if vals.size == 0:
        raise EmptySelectionError("histogram over an empty pixel selection")
    counts = np.bincount(vals, minlength=image.maxval + 1)
    return Histogram(counts=counts, total=int(vals.size))


def _read_header_tokens(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated integers, skipping '#' comments."""
    tokens: list[int] = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] != ord("\n"):
                i += 1
            continue
        j = i
        while j < n and not data[j : j + 1].isspace() and data[j] != ord("#"):
            j += 1
        if j == i:
            raise FormatError("unexpected end of PGM header")
        tok = data[i:j]
        try:
            tokens.append(int(tok))
        except ValueError:
            raise FormatError(f"non-numeric PGM header token {tok!r}") from None
        i = j
    return tokens, i


def read_pgm(path) -> ImageGrid:
    """Read an ASCII (P2) or binary (P5) PGM file.

    Header comments are skipped; 16-bit binary samples are big-endian.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 2:
        raise FormatError(f"{path}: not a PGM file")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"{path}: unsupported magic {magic!r}, expected P2 or P5")
    try:
        (width, height, maxval), pos = _read_header_tokens(data, 3, 2)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if width < 1 or height < 1:
        raise FormatError(f"{path}: invalid dimensions {width}x{height}")
    if maxval > MAX_MAXVAL:
        raise UnsupportedFormatError(f"{path}: maxval {maxval} exceeds 16-bit limit")
    if maxval < 1:
        raise FormatError(f"{path}: invalid maxval {maxval}")
    count = width * height

    if magic == b"P2":
        body = data[pos:]
        # strip comments, then parse the ASCII raster in one pass
        if b"#" in body:
            lines = body.split(b"\n")
            body = b"\n".join(ln.split(b"#", 1)[0] for ln in lines)
        fields = body.split()
        if len(fields) < count:
            raise TruncationError(f"{path}: raster has {len(fields)} samples, header declares {count}")
        try:
            samples = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise FormatError(f"{path}: non-numeric sample in P2 raster") from None
    else:
        # single whitespace byte separates the header from binary samples
        pos += 1
        raw = data[pos:]
        if maxval > 255:
            need = 2 * count
            if len(raw) < need:
                raise TruncationError(f"{path}: raster has {len(raw)} bytes, header declares {need}")
            samples = np.frombuffer(raw[:need], dtype=">u2").astype(np.int64)
        else:
            if len(raw) < count:
                raise TruncationError(f"{path}: raster has {len(raw)} bytes, header declares {count}")
            samples = np.frombuffer(raw[:count], dtype=np.uint8).astype(np.int64)

    if samples.min() < 0 or samples.max() > maxval:
        raise FormatError(f"{path}: sample outside [0, {maxval}]")
    return ImageGrid(width=width, height=height, maxval=maxval, pixels=samples.reshape(height, width))


def write_pgm(image: ImageGrid, path, binary: bool = True) -> None:
    """Write ``image`` as P5 (binary) or P2 (ASCII); read_pgm inverts it exactly."""
    header = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n{image.maxval}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            if image.maxval > 255:
                fh.write(image.pixels.astype(">u2").tobytes())
            else:
                fh.write(image.pixels.astype(np.uint8).tobytes())
        else:
            for row in image.pixels:
                fh.write(" ".join(str(int(v)) for v in row).encode("ascii"))
                fh.write(b"\n")
