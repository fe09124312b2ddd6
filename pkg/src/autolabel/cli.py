"""Command-line front door.

Subcommands:
    scan            run the virtual scanner and emit a labeled dataset
    evaluate        compare two datasets (predicted vs truth/reference)
    repeatability   return-to-home noise trials, maxima + per-trial CSV
    fiducial-sweep  Monte-Carlo pose error vs visible-tag count

Exit codes: 0 success, 2 validation error, 3 runtime error.  Progress goes
to stderr; machine-readable results go to files or stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_camera, load_scene
from .exceptions import AutoLabelError, ConfigurationError
from .fiducial import tag_count_sweep
from .metrics import (
    compare_datasets,
    format_report_table,
    repeatability_stats,
    write_per_frame_csv,
    write_report_json,
)
from .pipeline import run_scan
from .simulator import simulate_home_returns

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _add_scan_parser(sub) -> None:
    p = sub.add_parser("scan", help="run the virtual scanner, emit a dataset")
    p.add_argument("--config", required=True, help="scene JSON")
    p.add_argument("--calib", required=True, help="camera calibration JSON")
    p.add_argument("--init", required=True, help="initial-frame labels JSON")
    p.add_argument("--out", required=True, help="dataset output directory")
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="overrides the scene file's seed")
    p.add_argument("--method", choices=("odometry", "fiducial"), default="odometry")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-images", action="store_true",
                   help="skip rendering camera images (masks always written)")
    p.add_argument("--overlay", action="store_true",
                   help="also write images with painted mask boundaries")
    p.add_argument("--truth-out", default=None,
                   help="also emit the ground-truth dataset here")
    p.add_argument("--initial-label-sec", type=float, default=0.0,
                   help="operator time spent labeling the first frame")
    p.add_argument("--zero-noise", action="store_true")
    p.add_argument("--trans-bound-mm", default=None,
                   help="override, comma separated: x,y,z")
    p.add_argument("--rot-bound-deg", type=float, default=None)
    p.add_argument("--range-sigma-mm", type=float, default=None)
    p.add_argument("--tag-noise-px", type=float, default=None)


def _cmd_scan(args) -> int:
    bounds = None
    if args.trans_bound_mm is not None:
        parts = args.trans_bound_mm.split(",")
        if len(parts) != 3:
            raise ConfigurationError("--trans-bound-mm needs three comma-separated values")
        bounds = tuple(float(v) for v in parts)
    cfg = RunConfig(
        scene_path=args.config,
        camera_path=args.calib,
        init_path=args.init,
        out_dir=args.out,
        frames=args.frames,
        seed=args.seed,
        method=args.method,
        jobs=args.jobs,
        write_images=not args.no_images,
        write_overlays=args.overlay,
        truth_dir=args.truth_out,
        initial_label_sec=args.initial_label_sec,
        zero_noise=args.zero_noise,
        translation_bound_mm=bounds,
        rotation_bound_deg=args.rot_bound_deg,
        range_sigma_mm=args.range_sigma_mm,
        tag_pixel_sigma_px=args.tag_noise_px,
    )
    scene, camera, labels = cfg.validate()
    _log(f"scan: {cfg.frames} frames, method={cfg.method}, "
         f"seed={cfg.seed if cfg.seed is not None else scene.seed}")
    result = run_scan(
        scene, camera, labels,
        out_dir=cfg.out_dir,
        n_frames=cfg.frames,
        seed=cfg.seed,
        method=cfg.method,
        write_images=cfg.write_images,
        write_overlays=cfg.write_overlays,
        truth_dir=cfg.truth_dir,
        jobs=cfg.jobs,
        initial_label_sec=cfg.initial_label_sec,
    )
    _log(f"scan: wrote {result.n_frames_written} frames to {result.out_dir} "
         f"in {result.machine_time_sec:.2f}s"
         + (f", skipped {result.skipped_frame_ids}" if result.skipped_frame_ids else ""))
    print(json.dumps({
        "out_dir": result.out_dir,
        "frames_written": result.n_frames_written,
        "skipped_frame_ids": result.skipped_frame_ids,
        "machine_time_sec": result.machine_time_sec,
        "range_mean_m": result.range_estimate.mean,
    }))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    report, per_frame = compare_datasets(
        args.pred, args.truth,
        pixel_error_mode=args.pixel_error_mode,
        initial_label_sec=args.initial_label_sec,
    )
    if args.report:
        write_report_json(args.report, report)
        _log(f"evaluate: report written to {args.report}")
    if args.per_frame_csv:
        write_per_frame_csv(args.per_frame_csv, per_frame)
    print(format_report_table([report]))
    return EXIT_OK


def _cmd_repeatability(args) -> int:
    scene = load_scene(args.config)
    deviations = simulate_home_returns(
        scene.initial_pose, scene.noise, n_trials=args.trials, seed=args.seed
    )
    stats = repeatability_stats(deviations)
    if args.out_csv:
        path = Path(args.out_csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "dx_mm", "dy_mm", "dz_mm",
                             "rx_deg", "ry_deg", "rz_deg"])
            for i, row in enumerate(deviations):
                writer.writerow(
                    [i] + [f"{1e3 * v:.6f}" for v in row[:3]]
                    + [f"{np.rad2deg(v):.6f}" for v in row[3:]]
                )
        _log(f"repeatability: per-trial deltas written to {path}")
    print(json.dumps({
        "trials": int(len(deviations)),
        "translation_max_mm": [1e3 * v for v in stats.translation_max],
        "rotation_max_deg": [float(np.rad2deg(v)) for v in stats.rotation_max],
    }, indent=2))
    return EXIT_OK


def _cmd_fiducial_sweep(args) -> int:
    scene = load_scene(args.config)
    camera = load_camera(args.calib)
    results = tag_count_sweep(
        scene.board, camera,
        pixel_sigma=args.pixel_sigma,
        n_trials=args.trials,
        distance=args.distance,
        seed=args.seed,
        refine=not args.no_refine,
    )
    payload = {
        str(k): {
            "median_translation_mm": 1e3 * v["median_translation_m"],
            "median_rotation_deg": float(np.rad2deg(v["median_rotation_rad"])),
            "n_trials": v["n_trials"],
        }
        for k, v in results.items()
    }
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _log(f"fiducial-sweep: results written to {path}")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autolabel",
        description="Virtual scanner and label-propagation pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_scan_parser(sub)

    p = sub.add_parser("evaluate", help="compare a dataset against a reference")
    p.add_argument("--pred", required=True, help="predicted dataset directory")
    p.add_argument("--truth", required=True, help="reference dataset directory")
    p.add_argument("--report", default=None, help="write the report JSON here")
    p.add_argument("--per-frame-csv", default=None)
    p.add_argument("--pixel-error-mode", choices=("object", "frame"), default="object")
    p.add_argument("--initial-label-sec", type=float, default=0.0)

    p = sub.add_parser("repeatability", help="simulate return-to-home trials")
    p.add_argument("--config", required=True, help="scene JSON")
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-csv", default=None)

    p = sub.add_parser("fiducial-sweep",
                       help="Monte-Carlo pose error vs visible tag count")
    p.add_argument("--config", required=True, help="scene JSON")
    p.add_argument("--calib", required=True, help="camera calibration JSON")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--pixel-sigma", type=float, default=0.5)
    p.add_argument("--distance", type=float, default=1.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--out", default=None, help="write the sweep JSON here")

    return parser


_COMMANDS = {
    "scan": _cmd_scan,
    "evaluate": _cmd_evaluate,
    "repeatability": _cmd_repeatability,
    "fiducial-sweep": _cmd_fiducial_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        _log(f"error: {exc}")
        return EXIT_VALIDATION
    except (AutoLabelError, ValueError, OSError) as exc:
        _log(f"error ({type(exc).__name__}): {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
