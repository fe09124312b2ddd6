"""Labeling-quality metrics and the method-comparison report.

Three headline numbers per labeling method, plus repeatability statistics:

* mean frame time: the one-off initial annotation effort amortized over
  every produced frame, plus measured machine time.
* mean object error: fraction of objects not labeled "correctly", where
  correct means predicted/truth overlap above 75% of the truth area.
* mean pixel error: symmetric-difference pixel count between predicted and
  truth masks, averaged per object instance (per frame as an option).
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .dataset_io import (
    fill_polygon,
    load_mask_png,
    read_annotation,
    read_manifest,
    read_run_report,
)
from .exceptions import UndefinedMetricError

OVERLAP_THRESHOLD = 0.75


def mean_frame_time(initial_label_sec: float, frame_count: int,
                    machine_time_sec: float = 0.0) -> float:
    """Per-frame labeling cost: one-off manual time spread over all frames."""
    if frame_count < 1:
        raise ValueError("frame_count must be >= 1")
    if initial_label_sec < 0 or machine_time_sec < 0:
        raise ValueError("times must be non-negative")
    return (initial_label_sec + machine_time_sec) / frame_count


def _object_masks(polygons, width: int, height: int):
    """Bbox-local bool masks with offsets, for fast pairwise overlap."""
    entries = []
    for poly in polygons:
        full = fill_polygon(poly.vertices, width, height)
        rows = np.any(full, axis=1)
        cols = np.any(full, axis=0)
        if not rows.any():
            entries.append((poly.class_id, 0, 0, np.zeros((0, 0), dtype=bool)))
            continue
        r0, r1 = np.nonzero(rows)[0][[0, -1]]
        c0, c1 = np.nonzero(cols)[0][[0, -1]]
        entries.append((poly.class_id, int(r0), int(c0), full[r0:r1 + 1, c0:c1 + 1]))
    return entries


def _pair_overlap(a, b) -> int:
    _, ar, ac, am = a
    _, br, bc, bm = b
    r0 = max(ar, br)
    c0 = max(ac, bc)
    r1 = min(ar + am.shape[0], br + bm.shape[0])
    c1 = min(ac + am.shape[1], bc + bm.shape[1])
    if r1 <= r0 or c1 <= c0:
        return 0
    return int(np.count_nonzero(
        am[r0 - ar:r1 - ar, c0 - ac:c1 - ac] & bm[r0 - br:r1 - br, c0 - bc:c1 - bc]
    ))


def object_error(predicted, truth, width: int, height: int,
                 threshold: float = OVERLAP_THRESHOLD) -> float:
    """Fraction of missed or misplaced objects relative to the truth count.

    Objects are matched greedily by maximum pixel overlap within the same
    class (ties broken by lower predicted index, then lower truth index).
    A truth object is correct iff overlap / truth area > threshold.
    Unmatched predictions count as misplaced.
    """
    predicted = list(predicted)
    truth = list(truth)
    if not truth:
        raise UndefinedMetricError("object error is undefined for an empty truth set")

    pred_masks = _object_masks(predicted, width, height)
    truth_masks = _object_masks(truth, width, height)
    truth_areas = [int(m[3].sum()) for m in truth_masks]

    overlaps = []
    for pi, pm in enumerate(pred_masks):
        for ti, tm in enumerate(truth_masks):
            if pm[0] != tm[0]:
                continue
            ov = _pair_overlap(pm, tm)
            if ov > 0:
                overlaps.append((ov, pi, ti))
    overlaps.sort(key=lambda item: (-item[0], item[1], item[2]))

    matched_pred: set[int] = set()
    matched_truth: set[int] = set()
    correct = 0
    for ov, pi, ti in overlaps:
        if pi in matched_pred or ti in matched_truth:
            continue
        matched_pred.add(pi)
        matched_truth.add(ti)
        if truth_areas[ti] > 0 and ov / truth_areas[ti] > threshold:
            correct += 1
    missed = len(truth) - correct
    spurious = len(predicted) - len(matched_pred)
    return (missed + spurious) / len(truth)


def pixel_error(predicted_mask: np.ndarray, truth_mask: np.ndarray,
                n_objects: int = 1) -> float:
    """Symmetric-difference pixel count, averaged per object instance."""
    p = np.asarray(predicted_mask)
    t = np.asarray(truth_mask)
    if p.shape != t.shape:
        raise ValueError(f"mask shapes differ: {p.shape} vs {t.shape}")
    if n_objects < 1:
        raise ValueError("n_objects must be >= 1")
    return int(np.count_nonzero((p > 0) != (t > 0))) / n_objects


@dataclass(frozen=True)
class RepeatabilityStats:
    """Componentwise maxima of absolute pose deviations (m / rad)."""

    translation_max: tuple[float, float, float]
    rotation_max: tuple[float, float, float]

    @property
    def rotation_max_overall(self) -> float:
        return max(self.rotation_max)


def repeatability_stats(deviations) -> RepeatabilityStats:
    d = np.asarray(deviations, dtype=float)
    if d.ndim == 1:
        d = d.reshape(1, -1)
    if d.ndim != 2 or d.shape[1] != 6 or d.shape[0] < 1:
        raise ValueError("deviations must be an (N, 6) array with N >= 1")
    maxima = np.max(np.abs(d), axis=0)
    return RepeatabilityStats(
        translation_max=tuple(float(v) for v in maxima[:3]),
        rotation_max=tuple(float(v) for v in maxima[3:]),
    )


@dataclass(frozen=True)
class LabelingReport:
    """Headline comparison numbers for one labeling method."""

    method: str
    frames_evaluated: int
    mean_frame_time_sec: float
    mean_object_error_pct: float
    mean_pixel_error_px: float

    def to_dict(self) -> dict:
        return asdict(self)


def compare_datasets(pred_root, truth_root, *, pixel_error_mode: str = "object",
                     initial_label_sec: float = 0.0) -> tuple[LabelingReport, list[dict]]:
    """Score a predicted dataset against a truth dataset frame by frame.

    Matches frames by id (an empty intersection is an error listing what is
    missing), compares stored masks directly, and re-rasterizes the stored
    polygons for per-object matching.  Machine time is taken from the
    predicted run's run_report.json when present.
    """
    if pixel_error_mode not in ("object", "frame"):
        raise ValueError("pixel_error_mode must be 'object' or 'frame'")
    pred_root, truth_root = Path(pred_root), Path(truth_root)
    pred_records = {r.frame_id: r for r in read_manifest(pred_root)}
    truth_records = {r.frame_id: r for r in read_manifest(truth_root)}
    common = sorted(set(pred_records) & set(truth_records))
    if not common:
        missing = sorted(set(truth_records) - set(pred_records))[:10]
        raise ValueError(
            f"no common frame ids between datasets; e.g. missing from prediction: {missing}"
        )

    per_frame = []
    pixel_errors = []
    object_errors = []
    method = "?"
    for frame_id in common:
        pr = pred_records[frame_id]
        tr = truth_records[frame_id]
        method = pr.method
        pred_mask = load_mask_png(pred_root / pr.mask_path)
        truth_mask = load_mask_png(truth_root / tr.mask_path)
        pred_ann = read_annotation(pred_root / pr.annotation_path)
        truth_ann = read_annotation(truth_root / tr.annotation_path)
        n_objects = len(truth_ann.objects)
        if n_objects == 0:
            continue
        divisor = n_objects if pixel_error_mode == "object" else 1
        px = pixel_error(pred_mask, truth_mask, divisor)
        height, width = truth_mask.shape
        obj = object_error(pred_ann.objects, truth_ann.objects, width, height)
        pixel_errors.append(px)
        object_errors.append(obj)
        per_frame.append({
            "frame_id": frame_id,
            "pixel_error_px": px,
            "object_error_pct": 100.0 * obj,
        })

    if not pixel_errors:
        raise UndefinedMetricError("no evaluable frames (all truth frames empty)")

    run_report = read_run_report(pred_root) or {}
    machine = float(run_report.get("machine_time_sec", 0.0))
    report = LabelingReport(
        method=method,
        frames_evaluated=len(pixel_errors),
        mean_frame_time_sec=mean_frame_time(
            initial_label_sec, len(pred_records), machine
        ),
        mean_object_error_pct=100.0 * float(np.mean(object_errors)),
        mean_pixel_error_px=float(np.mean(pixel_errors)),
    )
    return report, per_frame


def format_report_table(reports) -> str:
    """Aligned text table: metric rows, one column per labeling method."""
    reports = list(reports)
    rows = [
        ("Mean frame time, sec", "mean_frame_time_sec", "{:.3f}"),
        ("Mean object error, %", "mean_object_error_pct", "{:.2f}"),
        ("Mean pixel error, pixels", "mean_pixel_error_px", "{:.2f}"),
        ("Frames evaluated", "frames_evaluated", "{:d}"),
    ]
    header = [""] + [r.method for r in reports]
    table = [header]
    for label, attr, fmt in rows:
        table.append([label] + [fmt.format(getattr(r, attr)) for r in reports])
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for row in table:
        cells = [row[0].ljust(widths[0])] + [
            c.rjust(widths[i + 1]) for i, c in enumerate(row[1:])
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def write_report_json(path, reports) -> None:
    reports = reports if isinstance(reports, (list, tuple)) else [reports]
    payload = [r.to_dict() for r in reports]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload if len(payload) > 1 else payload[0], fh,
                  sort_keys=True, indent=2)
        fh.write("\n")


def write_per_frame_csv(path, per_frame) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["frame_id", "pixel_error_px", "object_error_pct"]
        )
        writer.writeheader()
        writer.writerows(per_frame)
