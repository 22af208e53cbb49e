"""Connectivity-based grayscale segmentation with automatic tolerance selection."""

from .analysis import (
    brightest_component,
    extract_component,
    largest_component,
    select_component,
    write_stats_csv,
)
from .connectivity import (
    ConnectivityConfig,
    LabelMap,
    connectedness_degree,
    neighbor_connectivity,
    path_connectivity,
    segment,
    similarity,
    write_label_csv,
    write_label_pgm,
)
from .errors import (
    DegenerateHistogramError,
    EmptySelectionError,
    FormatError,
    InvalidPathError,
    LambdaSegError,
    TruncationError,
    UnsupportedCompositionError,
    UnsupportedFormatError,
)
from .fixtures import BlobScene, gradual_blob, pixel_set_f1
from .image import Histogram, ImageGrid, histogram, read_pgm, write_pgm
from .objectives import (
    ComponentStats,
    MumfordShahWeights,
    SweepReport,
    boundary_length,
    combined_entropy,
    component_stats,
    default_grid,
    evaluate_objective,
    fit_image,
    histogram_entropy,
    inner_entropy_total,
    min_variance_objective,
    mumford_shah_objective,
    outer_entropy_total,
    sweep_select,
    sweep_summary,
    write_sweep_csv,
)
from .pipeline import PipelineResult, PipelineSpec, StageError, config_hash, run_pipeline, write_manifest
from .preprocess import PrecutResult, PrecutSpec, apply_precut, box_smooth
from .thresholding import (
    ThresholdResult,
    kapur_threshold,
    otsu_threshold,
    peak_fraction_threshold,
    write_criterion_csv,
)

__version__ = "0.1.0"
