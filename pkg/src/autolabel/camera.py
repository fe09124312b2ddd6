"""Pinhole camera with Brown-Conrady distortion.

Pixel coordinates are (u, v) with u along image width.  Normalized image
coordinates are (X/Z, Y/Z) in the camera frame; the camera looks along +z.
The world-to-camera matrix is always the inverse of the camera-in-world
pose. This module commits to that convention once so the rest of the code
never has to guess which direction a matrix points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DegenerateGeometryError, NotVisibleError
from .geometry import RigidTransform
from .validation import check_points, check_vector

# Minimum camera-frame depth for a point to count as "in front".
MIN_DEPTH = 1e-6

# Fixed-point undistortion: stop when the update in normalized coordinates
# drops below 1e-10.  Typical lenses converge in under 10 sweeps; the cap
# covers strong distortion at the image corners, where the contraction
# factor approaches 0.3.
UNDISTORT_ITERS = 25
UNDISTORT_TOL = 1e-10


@dataclass(frozen=True)
class CameraModel:
    """Intrinsics plus radial-tangential distortion (k1, k2, p1, p2)."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    dist: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")
        if not (0 < self.cx < self.width and 0 < self.cy < self.height):
            raise ValueError("principal point must lie strictly inside the image")
        if len(self.dist) != 4:
            raise ValueError("dist must be (k1, k2, p1, p2)")
        object.__setattr__(self, "dist", tuple(float(d) for d in self.dist))

    @property
    def has_distortion(self) -> bool:
        return any(d != 0.0 for d in self.dist)

    def intrinsic_matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    def contains(self, pixels) -> np.ndarray:
        """True where pixels fall inside [0, w) x [0, h)."""
        p, single = check_points(pixels, 2, "pixels")
        ok = (p[:, 0] >= 0) & (p[:, 0] < self.width) & (p[:, 1] >= 0) & (p[:, 1] < self.height)
        return bool(ok[0]) if single else ok

    # -- distortion in normalized image coordinates --------------------

    def distort(self, normalized) -> np.ndarray:
        pts, single = check_points(normalized, 2, "normalized points")
        k1, k2, p1, p2 = self.dist
        x, y = pts[:, 0], pts[:, 1]
        r2 = x * x + y * y
        radial = 1.0 + k1 * r2 + k2 * r2 * r2
        xd = x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x)
        yd = y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y
        out = np.column_stack([xd, yd])
        return out[0] if single else out

    def undistort(self, normalized) -> np.ndarray:
        pts, single = check_points(normalized, 2, "normalized points")
        if not self.has_distortion:
            return pts[0].copy() if single else pts.copy()
        k1, k2, p1, p2 = self.dist
        xd, yd = pts[:, 0], pts[:, 1]
        x, y = xd.copy(), yd.copy()
        for _ in range(UNDISTORT_ITERS):
            r2 = x * x + y * y
            radial = 1.0 + k1 * r2 + k2 * r2 * r2
            dx = 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x)
            dy = p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y
            x_new = (xd - dx) / radial
            y_new = (yd - dy) / radial
            step = max(np.max(np.abs(x_new - x)), np.max(np.abs(y_new - y)))
            x, y = x_new, y_new
            if step < UNDISTORT_TOL:
                break
        out = np.column_stack([x, y])
        return out[0] if single else out

    # -- pixel <-> normalized ------------------------------------------

    def normalized_to_pixel(self, normalized) -> np.ndarray:
        pts, single = check_points(self.distort(normalized), 2, "normalized points")
        u = self.fx * pts[:, 0] + self.cx
        v = self.fy * pts[:, 1] + self.cy
        out = np.column_stack([u, v])
        return out[0] if single else out

    def pixel_to_normalized(self, pixels) -> np.ndarray:
        """Undistorted normalized coordinates of pixel locations."""
        p, single = check_points(pixels, 2, "pixels")
        xd = (p[:, 0] - self.cx) / self.fx
        yd = (p[:, 1] - self.cy) / self.fy
        out = self.undistort(np.column_stack([xd, yd]))
        return out if not single else np.asarray(out).reshape(2)

    # -- serialization --------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "CameraModel":
        try:
            return cls(
                fx=float(data["fx"]),
                fy=float(data["fy"]),
                cx=float(data["cx"]),
                cy=float(data["cy"]),
                width=int(data["width"]),
                height=int(data["height"]),
                dist=tuple(data.get("dist", (0.0, 0.0, 0.0, 0.0))),
            )
        except KeyError as exc:
            raise ValueError(f"camera calibration is missing key {exc}") from exc

    @classmethod
    def load(cls, path) -> "CameraModel":
        with open(Path(path), encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
            "dist": list(self.dist),
        }


@dataclass(frozen=True)
class Plane:
    """World-frame plane written as normal . p = offset with |normal| = 1."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = check_vector(self.normal, 3, "plane normal")
        norm = float(np.linalg.norm(n))
        if norm < 1e-12:
            raise ValueError("plane normal must be nonzero")
        n = n / norm
        n.flags.writeable = False
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @classmethod
    def from_point_normal(cls, point, normal) -> "Plane":
        p = check_vector(point, 3, "plane point")
        n = check_vector(normal, 3, "plane normal")
        return cls(n, float(n @ p))

    def signed_distance(self, points) -> np.ndarray:
        p, single = check_points(points, 3, "points")
        d = p @ self.normal - self.offset
        return float(d[0]) if single else d


@dataclass(frozen=True)
class RangeEstimate:
    """Averaged rangefinder reading: mean distance, spread, sample count."""

    mean: float
    sigma: float
    count: int = field(default=1)

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.count < 1:
            raise ValueError("count must be >= 1")

    def scale(self, fx: float) -> float:
        """Meters-per-pixel image scale at the measured distance."""
        return self.mean / fx


def average_range(samples) -> RangeEstimate:
    """Mean and population standard deviation of raw range samples."""
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("need at least one range sample")
    return RangeEstimate(mean=float(s.mean()), sigma=float(s.std()), count=int(s.size))


def projection_matrix(camera_pose: RigidTransform) -> np.ndarray:
    """3x4 world-to-camera matrix [R | t]: the top rows of inverse(pose)."""
    inv = camera_pose.inverse()
    return np.hstack([inv.rotation, inv.translation.reshape(3, 1)])


def camera_frame_points(points, camera_pose: RigidTransform) -> np.ndarray:
    """World points expressed in the camera frame."""
    p, single = check_points(points, 3, "world points")
    rt = camera_pose.rotation.T
    out = (p - camera_pose.translation) @ rt.T
    return out[0] if single else out


def project_points(points, camera_pose: RigidTransform, camera: CameraModel,
                   *, behind: str = "raise"):
    """Project world points to pixel coordinates.

    behind="raise": any point with camera-frame depth <= MIN_DEPTH raises
    NotVisibleError (never NaN).  behind="mask": returns (pixels, visible)
    where rows of non-visible points are zero and flagged False.

    Returned pixels may lie outside the image bounds; cropping is the
    rasterizer's job.
    """
    p, single = check_points(points, 3, "world points")
    pc = camera_frame_points(p, camera_pose)
    z = pc[:, 2]
    visible = z > MIN_DEPTH
    if behind == "raise":
        if not np.all(visible):
            raise NotVisibleError(
                f"{int(np.sum(~visible))} of {len(z)} points lie behind the camera"
            )
    elif behind != "mask":
        raise ValueError("behind must be 'raise' or 'mask'")
    safe_z = np.where(visible, z, 1.0)
    normalized = pc[:, :2] / safe_z[:, None]
    pixels = check_points(camera.normalized_to_pixel(normalized), 2, "pixels")[0]
    pixels[~visible] = 0.0
    if behind == "mask":
        return (pixels[0], bool(visible[0])) if single else (pixels, visible)
    return pixels[0] if single else pixels


def back_project_to_plane(pixels, camera_pose: RigidTransform,
                          camera: CameraModel, plane: Plane) -> np.ndarray:
    """Intersect pixel viewing rays with a world plane.

    Pixels are undistorted first, so project(back_project(p)) returns p for
    any distortion the iterative undistortion can invert.
    """
    p, single = check_points(pixels, 2, "pixels")
    normalized = check_points(camera.pixel_to_normalized(p), 2, "normalized")[0]
    dirs_cam = np.column_stack([normalized, np.ones(len(normalized))])
    dirs_world = camera_pose.rotate(dirs_cam)
    unit_dirs = dirs_world / np.linalg.norm(dirs_world, axis=1, keepdims=True)
    denom_unit = unit_dirs @ plane.normal
    if np.any(np.abs(denom_unit) <= 1e-9):
        raise DegenerateGeometryError("viewing ray is parallel to the target plane")
    origin = camera_pose.translation
    s = (plane.offset - origin @ plane.normal) / (dirs_world @ plane.normal)
    points = origin + s[:, None] * dirs_world
    return points[0] if single else points
