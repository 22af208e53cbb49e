"""End-to-end driver: smooth, pre-cut, sweep, segment at the selected
tolerance, pick a component, extract it.

Every intermediate value (computed threshold, selected tolerance, chosen
component) lands in a JSON-ready manifest, and the whole run is a pure
function of the inputs, so repeated runs are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .analysis import SELECTION_CRITERIA, select_component, extract_component
from .connectivity import ConnectivityConfig, LabelMap, segment
from .image import ImageGrid
from .objectives import (
    MumfordShahWeights,
    OBJECTIVE_DIRECTIONS,
    SweepReport,
    component_stats,
    sweep_select,
    sweep_summary,
)
from .preprocess import PrecutResult, PrecutSpec, apply_precut

STAGE_ORDER = ("smooth", "threshold", "mask", "sweep", "segment", "select", "extract")


@dataclass(frozen=True)
class PipelineSpec:
    """Full configuration of one pipeline run."""

    precut: PrecutSpec = PrecutSpec()
    connectivity: ConnectivityConfig = ConnectivityConfig()
    objective_kind: str = "max-entropy"
    grid: tuple[float, ...] | None = None
    weights: MumfordShahWeights = MumfordShahWeights()
    a: float = 1.0
    b: float = 1.0
    average_outer: bool = False
    selection: str = "largest"
    threads: int | None = None

    def __post_init__(self):
        if self.objective_kind not in OBJECTIVE_DIRECTIONS:
            raise ValueError(f"unknown objective kind {self.objective_kind!r}")
        if self.selection not in SELECTION_CRITERIA:
            raise ValueError(f"selection must be one of {SELECTION_CRITERIA}")

    def config_dict(self) -> dict:
        return {
            "precut": {
                "method": self.precut.method,
                "fraction": self.precut.fraction,
                "threshold": self.precut.threshold,
                "smoothing": self.precut.smoothing,
            },
            "connectivity": {
                "adjacency": self.connectivity.adjacency,
                "composition": self.connectivity.composition,
                "normalization": self.connectivity.normalization,
            },
            "objective_kind": self.objective_kind,
            "grid": list(self.grid) if self.grid is not None else None,
            "params": {
                "a": self.a,
                "b": self.b,
                "average_outer": self.average_outer,
                "c": self.weights.c,
                "alpha_w": self.weights.alpha_w,
                "beta_w": self.weights.beta_w,
                "gamma_w": self.weights.gamma_w,
            },
            "selection": self.selection,
        }


@dataclass(frozen=True, eq=False)
class PipelineResult:
    precut: PrecutResult
    report: SweepReport
    labels: LabelMap
    stats: list = field(repr=False)
    selected_component: int
    extracted: ImageGrid
    manifest: dict = field(repr=False)


class StageError(RuntimeError):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage: {cause}")
        self.stage = stage
        self.cause = cause


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise StageError(name, exc) from exc


def config_hash(spec: PipelineSpec) -> str:
    canonical = json.dumps(spec.config_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()


def run_pipeline(image: ImageGrid, spec: PipelineSpec = PipelineSpec()) -> PipelineResult:
    """Run smooth -> threshold -> mask -> sweep -> segment -> select -> extract."""
    pre = _stage("threshold", apply_precut, image, spec.precut)
    report = _stage(
        "sweep",
        sweep_select,
        pre.image,
        spec.connectivity,
        spec.objective_kind,
        spec.grid,
        weights=spec.weights,
        a=spec.a,
        b=spec.b,
        average_outer=spec.average_outer,
        background=pre.background,
        threads=spec.threads,
    )
    labels = _stage(
        "segment", segment, pre.image, report.selected_lambda, spec.connectivity, pre.background
    )
    stats = _stage("select", component_stats, pre.image, labels)
    chosen = _stage("select", select_component, stats, spec.selection)
    extracted = _stage("extract", extract_component, labels, chosen, pre.image)

    chosen_stats = stats[chosen - 1]
    manifest = {
        "stage_order": list(STAGE_ORDER),
        "config": spec.config_dict(),
        "config_sha256": config_hash(spec),
        "stages": {
            "smooth": {"kind": pre.smoothing},
            "threshold": {"method": pre.method, "computed_threshold": pre.threshold},
            "mask": {"masked_pixels": pre.masked_pixels},
            "sweep": sweep_summary(report),
            "segment": {"components": labels.component_count},
            "select": {
                "criterion": spec.selection,
                "component": chosen,
                "size": chosen_stats.size,
                "total_intensity": chosen_stats.total_intensity,
            },
        },
    }
    return PipelineResult(
        precut=pre,
        report=report,
        labels=labels,
        stats=stats,
        selected_component=chosen,
        extracted=extracted,
        manifest=manifest,
    )


def write_manifest(manifest: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
