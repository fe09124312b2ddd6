"""Dataset emission: polygon rasterization, per-frame JSON + PNG masks,
and an append-ordered run manifest.

Rasterization rule (fixed so masks are reproducible bit for bit): a pixel
belongs to a polygon iff its center (col + 0.5, row + 0.5) is inside by the
even-odd rule.  Vertices may lie outside the image; the filled region is
simply cropped to the raster.  Multiple polygons are OR-ed together, so
even-odd applies within a polygon (self-intersections allowed), never
across objects.

File layout under a dataset root:

    annotations/frame_000001.json
    masks/frame_000001.png            union of all objects (0 / 255)
    masks/frame_000001_c<k>.png       per class, only when several classes
    images/frame_000001.png           optional rendered frame
    overlays/frame_000001.png         optional image + mask boundary
    manifest.jsonl                    one DatasetRecord per line
    run_report.json                   timings etc., not byte-deterministic

Annotation JSON contract:

    {"frame_id": int, "pose": [6 floats], "pose_delta": [6 floats],
     "distance_m": float, "method": "odometry"|"fiducial",
     "objects": [{"class_id": int, "polygon": [[u, v], ...]}]}

Polygon coordinates are stored with 6 fractional digits, so a write/read
round trip is exact at that quantization.  Every frame file is written to a
temp name and atomically renamed; the manifest is rewritten atomically
after each frame, so a killed run never leaves partial entries.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import RigidTransform
from .propagation import FrameAnnotation, PolygonAnnotation
from .validation import check_vector

METHODS = ("odometry", "fiducial", "truth")

COORD_DECIMALS = 6
POSE_DECIMALS = 12


def _fill_window(vertices: np.ndarray, row0: int, row1: int,
                 col0: int, col1: int) -> np.ndarray:
    """Even-odd fill of one polygon over the pixel window [row0,row1)x[col0,col1).

    Returns a bool array of shape (row1-row0, col1-col0).  Pixel centers sit
    at integer + 0.5; scanline crossings use half-open vertical intervals so
    shared vertices are counted exactly once.
    """
    n_rows, n_cols = row1 - row0, col1 - col0
    out = np.zeros((n_rows, n_cols), dtype=bool)
    if n_rows <= 0 or n_cols <= 0:
        return out

    x0, y0 = vertices[:, 0], vertices[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    keep = y0 != y1
    if not np.any(keep):
        return out
    x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]

    centers = np.arange(row0, row1, dtype=float) + 0.5
    yc = centers[:, None]
    crossing = ((y0 <= yc) & (yc < y1)) | ((y1 <= yc) & (yc < y0))
    with np.errstate(invalid="ignore", divide="ignore"):
        xs = np.where(crossing, x0 + (yc - y0) * (x1 - x0) / (y1 - y0), np.inf)
    xs.sort(axis=1)

    starts = xs[:, 0::2]
    ends = xs[:, 1::2]
    valid = np.isfinite(starts) & np.isfinite(ends)
    if not np.any(valid):
        return out
    # Pixel centers in [start, end): first col is ceil(start - 0.5).
    s_cols = np.clip(np.ceil(starts - 0.5), col0, col1).astype(np.int64)
    e_cols = np.clip(np.ceil(ends - 0.5), col0, col1).astype(np.int64)
    sel = valid & (e_cols > s_cols)
    rows_idx, _ = np.nonzero(sel)
    if rows_idx.size == 0:
        return out
    delta = np.zeros((n_rows, n_cols + 1), dtype=np.int32)
    np.add.at(delta, (rows_idx, s_cols[sel] - col0), 1)
    np.add.at(delta, (rows_idx, e_cols[sel] - col0), -1)
    np.cumsum(delta[:, :-1], axis=1, out=delta[:, :-1])
    np.greater(delta[:, :-1], 0, out=out)
    return out


def _polygon_row_bounds(vertices: np.ndarray, height: int) -> tuple[int, int]:
    r0 = int(max(0, math.ceil(vertices[:, 1].min() - 0.5)))
    r1 = int(min(height, math.ceil(vertices[:, 1].max() - 0.5)))
    return r0, r1


def _polygon_col_bounds(vertices: np.ndarray, width: int) -> tuple[int, int]:
    c0 = int(max(0, math.ceil(vertices[:, 0].min() - 0.5)))
    c1 = int(min(width, math.ceil(vertices[:, 0].max() - 0.5)))
    return c0, c1


def fill_polygon(vertices, width: int, height: int) -> np.ndarray:
    """Bool mask (height, width) of one polygon, cropped to the raster."""
    v = np.asarray(vertices, dtype=float)
    out = np.zeros((height, width), dtype=bool)
    r0, r1 = _polygon_row_bounds(v, height)
    c0, c1 = _polygon_col_bounds(v, width)
    if r1 > r0 and c1 > c0:
        out[r0:r1, c0:c1] = _fill_window(v, r0, r1, c0, c1)
    return out


def polygon_coverage_window(vertices, width: int, height: int,
                            supersample: int = 4):
    """Anti-aliased coverage of a polygon, restricted to its pixel bbox.

    Returns (row0, col0, coverage) where coverage is float in [0, 1] from a
    supersample x supersample subpixel grid.  Used by the renderer; the
    ground-truth path always uses the hard fill_polygon.
    """
    v = np.asarray(vertices, dtype=float)
    r0 = int(max(0, math.floor(v[:, 1].min())))
    r1 = int(min(height, math.ceil(v[:, 1].max()) + 1))
    c0 = int(max(0, math.floor(v[:, 0].min())))
    c1 = int(min(width, math.ceil(v[:, 0].max()) + 1))
    if r1 <= r0 or c1 <= c0:
        return 0, 0, np.zeros((0, 0))
    ss = int(supersample)
    sub = _fill_window(v * ss, r0 * ss, r1 * ss, c0 * ss, c1 * ss)
    coverage = sub.reshape(r1 - r0, ss, c1 - c0, ss).mean(axis=(1, 3))
    return r0, c0, coverage


def _vertices_of(polygon) -> np.ndarray:
    return polygon.vertices if hasattr(polygon, "vertices") else np.asarray(polygon, float)


def rasterize_mask(polygons, width: int, height: int) -> np.ndarray:
    """0/255 uint8 mask of the union of polygons (annotations or arrays)."""
    acc = np.zeros((height, width), dtype=bool)
    for poly in polygons:
        acc |= fill_polygon(_vertices_of(poly), width, height)
    return np.where(acc, np.uint8(255), np.uint8(0))


def shoelace_area(vertices) -> float:
    """Signed-free polygon area; the independent oracle for mask pixel counts."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return abs(float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))) / 2.0


# ---------------------------------------------------------------------------
# atomic file helpers


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp_", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_mask_png(path, mask: np.ndarray) -> None:
    raw = io.BytesIO()
    Image.fromarray(np.asarray(mask, dtype=np.uint8), mode="L").save(raw, format="PNG")
    _atomic_write_bytes(Path(path), raw.getvalue())


def save_image_png(path, image: np.ndarray) -> None:
    raw = io.BytesIO()
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(raw, format="PNG")
    _atomic_write_bytes(Path(path), raw.getvalue())


def load_mask_png(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def load_image_png(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


# ---------------------------------------------------------------------------
# morphology-light overlay


def _shift_or(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    out[1:, :] |= mask[:-1, :]
    out[:-1, :] |= mask[1:, :]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


def _shift_and(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    out[1:, :] &= mask[:-1, :]
    out[:-1, :] &= mask[1:, :]
    out[:, 1:] &= mask[:, :-1]
    out[:, :-1] &= mask[:, 1:]
    return out


def overlay_image(image: np.ndarray, mask: np.ndarray,
                  color=(0, 255, 60)) -> np.ndarray:
    """Paint the dilated mask boundary onto a copy of the image."""
    m = np.asarray(mask) > 0
    boundary = m & ~_shift_and(m)
    band = _shift_or(boundary)
    out = np.asarray(image, dtype=np.uint8).copy()
    out[band] = (0.35 * out[band] + 0.65 * np.array(color)).astype(np.uint8)
    return out


# ---------------------------------------------------------------------------
# annotation JSON


@dataclass(frozen=True)
class StoredAnnotation:
    """Parsed contents of one frame annotation file."""

    frame_id: int
    pose: np.ndarray
    pose_delta: np.ndarray
    distance_m: float
    method: str
    objects: tuple[PolygonAnnotation, ...]

    def to_frame(self) -> FrameAnnotation:
        return FrameAnnotation(
            frame_id=self.frame_id,
            polygons=self.objects,
            camera_pose=RigidTransform.from_pose_vector(self.pose),
        )


def annotation_dict(frame: FrameAnnotation, pose_vector, pose_delta_vector,
                    distance_m: float, method: str) -> dict:
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    pose = check_vector(pose_vector, 6, "pose vector")
    delta = check_vector(pose_delta_vector, 6, "pose delta")
    return {
        "frame_id": int(frame.frame_id),
        "pose": [round(float(v), POSE_DECIMALS) for v in pose],
        "pose_delta": [round(float(v), POSE_DECIMALS) for v in delta],
        "distance_m": round(float(distance_m), POSE_DECIMALS),
        "method": method,
        "objects": [
            {
                "class_id": int(p.class_id),
                "polygon": [
                    [round(float(u), COORD_DECIMALS), round(float(v), COORD_DECIMALS)]
                    for u, v in p.vertices
                ],
            }
            for p in frame.polygons
        ],
    }


def write_annotation(path, data: dict) -> None:
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    _atomic_write_bytes(Path(path), text.encode("utf-8"))


def read_annotation(path) -> StoredAnnotation:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    objects = tuple(
        PolygonAnnotation(obj["class_id"], np.asarray(obj["polygon"], dtype=float))
        for obj in data["objects"]
    )
    return StoredAnnotation(
        frame_id=int(data["frame_id"]),
        pose=np.asarray(data["pose"], dtype=float),
        pose_delta=np.asarray(data["pose_delta"], dtype=float),
        distance_m=float(data["distance_m"]),
        method=str(data["method"]),
        objects=objects,
    )


# ---------------------------------------------------------------------------
# dataset records and writer


@dataclass(frozen=True)
class DatasetRecord:
    """One manifest line; paths are relative to the dataset root."""

    frame_id: int
    image_path: str | None
    mask_path: str
    annotation_path: str
    pose: tuple
    pose_delta: tuple
    range_mean_m: float
    range_sigma_m: float
    range_samples: int
    method: str

    def to_json_dict(self) -> dict:
        return {
            "frame_id": self.frame_id,
            "image_path": self.image_path,
            "mask_path": self.mask_path,
            "annotation_path": self.annotation_path,
            "pose": list(self.pose),
            "pose_delta": list(self.pose_delta),
            "range": {
                "mean_m": self.range_mean_m,
                "sigma_m": self.range_sigma_m,
                "n_samples": self.range_samples,
            },
            "method": self.method,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DatasetRecord":
        return cls(
            frame_id=int(data["frame_id"]),
            image_path=data.get("image_path"),
            mask_path=data["mask_path"],
            annotation_path=data["annotation_path"],
            pose=tuple(data["pose"]),
            pose_delta=tuple(data["pose_delta"]),
            range_mean_m=float(data["range"]["mean_m"]),
            range_sigma_m=float(data["range"]["sigma_m"]),
            range_samples=int(data["range"]["n_samples"]),
            method=str(data["method"]),
        )


class DatasetWriter:
    """Writes frames (annotation + masks + optional image) plus a manifest.

    Thread safe: frames may be written concurrently by worker threads; the
    manifest is maintained by a single locked sequencer and rewritten
    atomically after every frame, sorted by frame id, so a killed run
    leaves only complete entries behind.
    """

    def __init__(self, root, width: int, height: int, *,
                 write_images: bool = True, write_overlays: bool = False):
        self.root = Path(root)
        self.width = int(width)
        self.height = int(height)
        self.write_images = write_images
        self.write_overlays = write_overlays
        self._records: dict[int, DatasetRecord] = {}
        self._lock = threading.Lock()
        self.root.mkdir(parents=True, exist_ok=True)

    def write_frame(self, frame: FrameAnnotation, *, pose_vector,
                    pose_delta_vector, range_estimate, method: str,
                    image: np.ndarray | None = None) -> DatasetRecord:
        stem = f"frame_{frame.frame_id:06d}"
        ann_rel = f"annotations/{stem}.json"
        mask_rel = f"masks/{stem}.png"

        data = annotation_dict(frame, pose_vector, pose_delta_vector,
                               range_estimate.mean, method)
        write_annotation(self.root / ann_rel, data)

        union = rasterize_mask(frame.polygons, self.width, self.height)
        save_mask_png(self.root / mask_rel, union)
        class_ids = sorted({p.class_id for p in frame.polygons})
        if len(class_ids) > 1:
            for cid in class_ids:
                class_mask = rasterize_mask(
                    [p for p in frame.polygons if p.class_id == cid],
                    self.width, self.height,
                )
                save_mask_png(self.root / f"masks/{stem}_c{cid}.png", class_mask)

        image_rel = None
        if image is not None and self.write_images:
            image_rel = f"images/{stem}.png"
            save_image_png(self.root / image_rel, image)
            if self.write_overlays:
                save_image_png(self.root / f"overlays/{stem}.png",
                               overlay_image(image, union))

        record = DatasetRecord(
            frame_id=int(frame.frame_id),
            image_path=image_rel,
            mask_path=mask_rel,
            annotation_path=ann_rel,
            pose=tuple(data["pose"]),
            pose_delta=tuple(data["pose_delta"]),
            range_mean_m=float(range_estimate.mean),
            range_sigma_m=float(range_estimate.sigma),
            range_samples=int(range_estimate.count),
            method=method,
        )
        with self._lock:
            self._records[record.frame_id] = record
            self._rewrite_manifest()
        return record

    def _rewrite_manifest(self) -> None:
        lines = [
            json.dumps(self._records[fid].to_json_dict(),
                       sort_keys=True, separators=(",", ":"))
            for fid in sorted(self._records)
        ]
        payload = ("\n".join(lines) + "\n") if lines else ""
        _atomic_write_bytes(self.root / "manifest.jsonl", payload.encode("utf-8"))

    @property
    def records(self) -> list[DatasetRecord]:
        with self._lock:
            return [self._records[fid] for fid in sorted(self._records)]

    def write_run_report(self, report: dict) -> None:
        # Wall-clock timings live here, outside the byte-deterministic set.
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
        _atomic_write_bytes(self.root / "run_report.json", text.encode("utf-8"))


def read_manifest(root) -> list[DatasetRecord]:
    path = Path(root)
    if path.is_dir():
        path = path / "manifest.jsonl"
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(DatasetRecord.from_json_dict(json.loads(line)))
    return records


def read_run_report(root) -> dict | None:
    path = Path(root) / "run_report.json"
    if not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
