"""Exception types raised by lambdaseg."""


class LambdaSegError(Exception):
    """Base class for all package errors."""


class FormatError(LambdaSegError):
    """A PGM file has a malformed header or out-of-range samples."""


class TruncationError(FormatError):
    """A PGM raster holds fewer samples than its header declares."""


class UnsupportedFormatError(FormatError):
    """A PGM file uses a feature outside the supported subset (e.g. maxval > 65535)."""


class EmptySelectionError(LambdaSegError):
    """A histogram or statistic was requested over zero pixels."""


class DegenerateHistogramError(LambdaSegError):
    """A threshold method needs at least two distinct populated bins."""


class InvalidPathError(LambdaSegError):
    """A pixel path contains a non-adjacent consecutive pair."""


class UnsupportedCompositionError(LambdaSegError):
    """Segmentation was requested with a path composition rule it does not support."""
