"""Command-line driver.

Subcommands wire the library into reproducible file outputs: label maps as
16-bit PGM, curves as CSV with rendered PNG figures alongside, and a JSON
manifest recording every intermediate value. Identical inputs and flags
produce byte-identical CSV/JSON/PGM outputs.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .analysis import write_stats_csv
from .connectivity import ConnectivityConfig, write_label_csv, write_label_pgm
from .errors import LambdaSegError
from .image import read_pgm, write_pgm
from .objectives import (
    MumfordShahWeights,
    OBJECTIVE_DIRECTIONS,
    component_stats,
    sweep_summary,
    write_sweep_csv,
)
from .pipeline import PipelineSpec, StageError, config_hash, run_pipeline
from .preprocess import PrecutSpec, apply_precut
from .connectivity import segment
from .thresholding import (
    kapur_threshold,
    otsu_threshold,
    peak_fraction_threshold,
    write_criterion_csv,
)
from .image import ImageGrid, histogram


def _parse_precut(text: str):
    """Parse a pre-cut spec: none | kapur | otsu | peak-fraction[:f] | fixed:t."""
    name, _, arg = text.partition(":")
    try:
        if name == "peak-fraction":
            return name, float(arg) if arg else 0.45, None
        if name == "fixed":
            if not arg:
                raise ValueError("fixed pre-cut needs a threshold, e.g. fixed:23")
            return name, 0.45, int(arg)
        if name in ("none", "kapur", "otsu"):
            if arg:
                raise ValueError(f"{name} takes no parameter")
            return name, 0.45, None
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    raise argparse.ArgumentTypeError(
        f"unknown pre-cut {text!r}; expected none, kapur, otsu, peak-fraction[:f], fixed:t"
    )


def _parse_grid(text: str) -> tuple[float, ...]:
    """Parse start:end:step with inclusive endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:end:step, got {text!r}")
    try:
        start, end, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric grid bound in {text!r}") from None
    if step <= 0 or end < start:
        raise argparse.ArgumentTypeError("grid needs end >= start and step > 0")
    count = int((end - start) / step + 1e-9) + 1
    grid = tuple(round(start + k * step, 12) for k in range(count))
    if any(not 0.0 <= g <= 1.0 for g in grid):
        raise argparse.ArgumentTypeError("grid values must lie in [0, 1]")
    return grid


def _precut_spec(args) -> PrecutSpec:
    method, fraction, threshold = args.precut
    return PrecutSpec(
        method=method,
        fraction=fraction,
        threshold=threshold,
        smoothing="box3" if args.smooth else "none",
    )


def _weights(args) -> MumfordShahWeights:
    return MumfordShahWeights(alpha_w=args.alpha, beta_w=args.beta, gamma_w=args.gamma, c=args.c)


def _input_block(path: Path, image: ImageGrid) -> dict:
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return {
        "path": str(path),
        "sha256": digest,
        "width": image.width,
        "height": image.height,
        "maxval": image.maxval,
    }


def _outdir(args) -> Path:
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_segment(args) -> int:
    image = read_pgm(args.input)
    pre = apply_precut(image, _precut_spec(args))
    config = ConnectivityConfig(adjacency=args.adjacency)
    labels = segment(pre.image, args.lam, config, background=pre.background)
    out = _outdir(args)
    write_label_pgm(labels, out / "labels.pgm")
    write_stats_csv(component_stats(pre.image, labels), out / "stats.csv")
    if args.labels_csv:
        write_label_csv(labels, out / "labels.csv")
    if not args.no_plots:
        from . import plots

        plots.save_labels_figure(labels, out / "labels.png")
    print(f"M={labels.component_count}")
    return 0


def cmd_sweep(args) -> int:
    path = Path(args.input)
    image = read_pgm(path)
    spec = PipelineSpec(
        precut=_precut_spec(args),
        connectivity=ConnectivityConfig(adjacency=args.adjacency),
        objective_kind=args.objective,
        grid=args.grid,
        weights=_weights(args),
        a=args.a,
        b=args.b,
        average_outer=args.average_outer,
        threads=args.threads,
    )
    pre = apply_precut(image, spec.precut)
    from .objectives import sweep_select

    report = sweep_select(
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
    labels = segment(pre.image, report.selected_lambda, spec.connectivity, pre.background)
    out = _outdir(args)
    write_sweep_csv(report, out / "sweep.csv")
    payload = {
        "summary": sweep_summary(report),
        "config": spec.config_dict(),
        "config_sha256": config_hash(spec),
        "input": _input_block(path, image),
        "stages": {
            "smooth": {"kind": pre.smoothing},
            "threshold": {"method": pre.method, "computed_threshold": pre.threshold},
            "mask": {"masked_pixels": pre.masked_pixels},
        },
    }
    _write_json(payload, out / "sweep.json")
    write_label_pgm(labels, out / "labels.pgm")
    write_stats_csv(component_stats(pre.image, labels), out / "stats.csv")
    if not args.no_plots:
        from . import plots

        plots.save_sweep_figure(report, out / "sweep.png")
        plots.save_labels_figure(labels, out / "labels.png")
    print(f"lambda*={report.selected_lambda!r}")
    print(f"M={report.selected_components}")
    return 0


def cmd_threshold(args) -> int:
    image = read_pgm(args.input)
    if args.method == "peak-fraction":
        t = peak_fraction_threshold(image, args.fraction, source=args.peak_source)
        result = None
    else:
        hist = histogram(image)
        result = kapur_threshold(hist) if args.method == "kapur" else otsu_threshold(hist)
        t = result.threshold
    print(t)
    if args.mask_out:
        mask = (image.pixels > t).astype(image.pixels.dtype) * image.maxval
        write_pgm(
            ImageGrid(width=image.width, height=image.height, maxval=image.maxval, pixels=mask),
            args.mask_out,
        )
    if result is not None and args.curve_csv:
        write_criterion_csv(result, args.curve_csv)
    if result is not None and args.curve_plot:
        from . import plots

        plots.save_criterion_figure(result, args.curve_plot)
    return 0


def cmd_pipeline(args) -> int:
    path = Path(args.input)
    image = read_pgm(path)
    spec = PipelineSpec(
        precut=_precut_spec(args),
        connectivity=ConnectivityConfig(adjacency=args.adjacency),
        objective_kind=args.objective,
        grid=args.grid,
        weights=_weights(args),
        a=args.a,
        b=args.b,
        average_outer=args.average_outer,
        selection=args.select,
        threads=args.threads,
    )
    result = run_pipeline(image, spec)
    out = _outdir(args)
    manifest = dict(result.manifest)
    manifest["input"] = _input_block(path, image)
    manifest["outputs"] = {
        "sweep_csv": "sweep.csv",
        "labels_pgm": "labels.pgm",
        "stats_csv": "stats.csv",
        "extracted_pgm": "extracted.pgm",
        "manifest_json": "manifest.json",
    }
    write_sweep_csv(result.report, out / "sweep.csv")
    write_label_pgm(result.labels, out / "labels.pgm")
    write_stats_csv(result.stats, out / "stats.csv")
    write_pgm(result.extracted, out / "extracted.pgm")
    _write_json(manifest, out / "manifest.json")
    if not args.no_plots:
        from . import plots

        plots.save_sweep_figure(result.report, out / "sweep.png")
        plots.save_labels_figure(result.labels, out / "labels.png")
        plots.save_image_figure(result.extracted, out / "extracted.png")
    print(f"lambda*={result.report.selected_lambda!r}")
    print(f"component={result.selected_component}")
    return 0


def _add_common_io(sub, with_plots: bool = True):
    sub.add_argument("input", help="input PGM (P2 or P5)")
    sub.add_argument("--outdir", default=".", help="directory for output files (default: .)")
    if with_plots:
        sub.add_argument("--no-plots", action="store_true", help="skip PNG figure rendering")


def _add_preprocess(sub):
    sub.add_argument(
        "--precut",
        type=_parse_precut,
        default=("none", 0.45, None),
        help="pre-cut method: none, kapur, otsu, peak-fraction[:f], fixed:t (default: none)",
    )
    sub.add_argument("--smooth", action="store_true", help="3x3 box smoothing before the pre-cut")
    sub.add_argument("--adjacency", type=int, choices=(4, 8), default=4)


def _add_objective(sub):
    sub.add_argument(
        "--objective",
        choices=sorted(OBJECTIVE_DIRECTIONS),
        required=True,
        help="objective optimized over the tolerance grid",
    )
    sub.add_argument("--grid", type=_parse_grid, default=None, help="start:end:step (default 0:1:0.01)")
    sub.add_argument("--a", type=float, default=1.0, help="inner entropy weight (combined kind)")
    sub.add_argument("--b", type=float, default=1.0, help="outer entropy weight (combined kind)")
    sub.add_argument("--average-outer", action="store_true", help="average the outer entropy over components")
    sub.add_argument("--c", type=float, default=1.0, help="component count penalty (min-variance)")
    sub.add_argument("--alpha", type=float, default=1.0, help="fitted-variance weight (mumford-shah)")
    sub.add_argument("--beta", type=float, default=1.0, help="boundary length weight (mumford-shah)")
    sub.add_argument("--gamma", type=float, default=1.0, help="fit error weight (mumford-shah)")
    sub.add_argument("--threads", type=int, default=None,
                     help="sweep parallelism; 0 = auto (default: LAMBDASEG_THREADS or 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambdaseg",
        description="Connectivity-based segmentation with automatic tolerance selection.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    seg = subs.add_parser("segment", help="segment at a fixed tolerance")
    _add_common_io(seg)
    _add_preprocess(seg)
    seg.add_argument("--lambda", dest="lam", type=float, required=True, help="tolerance in [0, 1]")
    seg.add_argument("--labels-csv", action="store_true", help="also write labels.csv (x,y,label)")
    seg.set_defaults(func=cmd_segment)

    swp = subs.add_parser("sweep", help="select the tolerance by optimizing an objective")
    _add_common_io(swp)
    _add_preprocess(swp)
    _add_objective(swp)
    swp.set_defaults(func=cmd_sweep)

    thr = subs.add_parser("threshold", help="global threshold baselines")
    thr.add_argument("input", help="input PGM (P2 or P5)")
    thr.add_argument("--method", choices=("kapur", "otsu", "peak-fraction"), required=True)
    thr.add_argument("--fraction", type=float, default=0.45, help="peak fraction (default 0.45)")
    thr.add_argument("--peak-source", choices=("max", "mode"), default="max",
                     help="what 'peak' means for peak-fraction: max intensity or histogram mode")
    thr.add_argument("--mask-out", default=None, help="write a binary mask PGM (value > t)")
    thr.add_argument("--curve-csv", default=None, help="write the criterion curve as CSV")
    thr.add_argument("--curve-plot", default=None, help="render the criterion curve as PNG")
    thr.set_defaults(func=cmd_threshold)

    pipe = subs.add_parser("pipeline", help="smooth, pre-cut, sweep, segment, select, extract")
    _add_common_io(pipe)
    _add_preprocess(pipe)
    _add_objective(pipe)
    pipe.add_argument("--select", choices=("largest", "brightest"), default="largest",
                      help="component selection criterion (default: largest)")
    pipe.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LambdaSegError, StageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
