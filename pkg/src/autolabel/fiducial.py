"""Camera localization from planar fiducial-tag corners.

A cheaper alternative to robot odometry: square tags of known size sit at
the board corners, and any frame that sees at least one full tag yields a
camera pose.  All visible corners are pooled into a single board-to-image
homography (normalized DLT), the homography is decomposed against the
intrinsics into a rigid pose, and an optional Gauss-Newton polish minimizes
reprojection error.  Accuracy degrades gracefully as tags leave the frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .camera import CameraModel, project_points
from .exceptions import DegenerateGeometryError, LocalizationError
from .geometry import RigidTransform, rotvec_to_matrix
from .validation import check_points

if TYPE_CHECKING:  # pragma: no cover
    from .simulator import BoardModel

# Smallest area (px^2) of a corner triangle before an observation counts
# as degenerate.
CORNER_COLLINEAR_TOL = 1e-6

REFINE_MAX_ITERS = 10
REFINE_STEP_TOL = 1e-12


@dataclass(frozen=True)
class TagObservation:
    """One detected tag: its id and 4 corner pixels in fixed winding order."""

    tag_id: int
    corners: np.ndarray

    def __post_init__(self):
        c, _ = check_points(self.corners, 2, "tag corners")
        if c.shape[0] != 4:
            raise ValueError("a tag observation needs exactly 4 corners")
        for i in range(4):
            for j in range(i + 1, 4):
                for k in range(j + 1, 4):
                    u, v = c[j] - c[i], c[k] - c[i]
                    if abs(u[0] * v[1] - u[1] * v[0]) <= CORNER_COLLINEAR_TOL:
                        raise ValueError("tag corners are collinear (degenerate observation)")
        c.flags.writeable = False
        object.__setattr__(self, "corners", c)
        object.__setattr__(self, "tag_id", int(self.tag_id))


@dataclass(frozen=True)
class PoseEstimate:
    """Recovered camera pose plus its reprojection quality."""

    pose: RigidTransform
    reprojection_rmse: float
    n_correspondences: int

    def __post_init__(self):
        if self.reprojection_rmse < 0:
            raise ValueError("reprojection_rmse must be >= 0")
        if self.n_correspondences < 4:
            raise ValueError("a pose estimate needs at least 4 correspondences")


def _normalization(points: np.ndarray) -> np.ndarray:
    """Hartley conditioning: centroid to origin, mean distance sqrt(2)."""
    centroid = points.mean(axis=0)
    mean_dist = float(np.mean(np.linalg.norm(points - centroid, axis=1)))
    scale = np.sqrt(2.0) / mean_dist if mean_dist > 1e-12 else 1.0
    return np.array(
        [[scale, 0.0, -scale * centroid[0]],
         [0.0, scale, -scale * centroid[1]],
         [0.0, 0.0, 1.0]]
    )


def estimate_homography(src_points, dst_points) -> np.ndarray:
    """Normalized-DLT homography mapping src (plane coords) to dst (pixels).

    Needs >= 4 correspondences not all collinear; solves the stacked 2n x 9
    system by SVD and returns H scaled so H[2, 2] = 1 when possible.
    """
    src, _ = check_points(src_points, 2, "source points")
    dst, _ = check_points(dst_points, 2, "destination points")
    if src.shape != dst.shape:
        raise ValueError("source and destination point counts differ")
    n = src.shape[0]
    if n < 4:
        raise ValueError(f"homography estimation needs >= 4 correspondences, got {n}")

    t_src = _normalization(src)
    t_dst = _normalization(dst)
    sn = src @ t_src[:2, :2].T + t_src[:2, 2]
    dn = dst @ t_dst[:2, :2].T + t_dst[:2, 2]

    a = np.zeros((2 * n, 9))
    a[0::2, 0:2] = sn
    a[0::2, 2] = 1.0
    a[0::2, 6:8] = -dn[:, 0:1] * sn
    a[0::2, 8] = -dn[:, 0]
    a[1::2, 3:5] = sn
    a[1::2, 5] = 1.0
    a[1::2, 6:8] = -dn[:, 1:2] * sn
    a[1::2, 8] = -dn[:, 1]

    _, s, vt = np.linalg.svd(a)
    # Unique null direction requires rank 8: the eighth singular value must
    # be well separated from zero.
    if s[7] <= 1e-10 * max(s[0], 1.0):
        raise DegenerateGeometryError("correspondences are rank deficient (collinear?)")
    h_norm = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t_dst) @ h_norm @ t_src
    if abs(h[2, 2]) > 1e-12:
        h = h / h[2, 2]
    return h


def apply_homography_points(h, points) -> np.ndarray:
    p, single = check_points(points, 2, "points")
    q = np.column_stack([p, np.ones(len(p))]) @ np.asarray(h, dtype=float).T
    out = q[:, :2] / q[:, 2:3]
    return out[0] if single else out


def _extrinsic_from_homography(h: np.ndarray, camera: CameraModel,
                               reference_xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split K^-1 H into a plane-to-camera rotation and translation.

    Columns are rescaled by 1/|b1|, r3 = r1 x r2, and the result is snapped
    to the nearest orthonormal matrix via SVD.  The sign is chosen so the
    reference plane point sits in front of the camera.
    """
    b = np.linalg.inv(camera.intrinsic_matrix()) @ h
    norm_b1 = float(np.linalg.norm(b[:, 0]))
    if norm_b1 < 1e-12:
        raise DegenerateGeometryError("homography first column collapses under K^-1")
    for sign in (1.0, -1.0):
        lam = sign / norm_b1
        r1 = lam * b[:, 0]
        r2 = lam * b[:, 1]
        r3 = np.cross(r1, r2)
        rough = np.column_stack([r1, r2, r3])
        u, _, vt = np.linalg.svd(rough)
        rotation = u @ np.diag([1.0, 1.0, float(np.linalg.det(u @ vt))]) @ vt
        translation = lam * b[:, 2]
        depth = rotation[2, :2] @ reference_xy + translation[2]
        if depth > 0:
            return rotation, translation
    raise LocalizationError(
        "both homography sign choices place the plane behind the camera"
    )


def _ideal_projection(rotation, translation, plane_xy, camera) -> np.ndarray:
    """Distortion-free projection of plane points through an extrinsic."""
    pc = plane_xy @ rotation[:, :2].T + translation
    uv = pc[:, :2] / pc[:, 2:3]
    return np.column_stack(
        [camera.fx * uv[:, 0] + camera.cx, camera.fy * uv[:, 1] + camera.cy]
    )


def refine_extrinsic(rotation, translation, plane_xy, ideal_pixels, camera,
                     max_iters: int = REFINE_MAX_ITERS) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Newton polish of a plane-to-camera extrinsic.

    Minimizes ideal-pinhole reprojection error over a local 6-DoF update
    (left-multiplied rotation delta, additive translation delta).  Jacobians
    are central finite differences; at most ``max_iters`` sweeps.
    """
    r = np.asarray(rotation, dtype=float)
    t = np.asarray(translation, dtype=float)
    eps = 1e-7

    def residual(rr, tt):
        return (_ideal_projection(rr, tt, plane_xy, camera) - ideal_pixels).ravel()

    for _ in range(max_iters):
        res = residual(r, t)
        jac = np.empty((res.size, 6))
        for k in range(3):
            axis = np.zeros(3)
            axis[k] = eps
            r_plus = rotvec_to_matrix(axis) @ r
            r_minus = rotvec_to_matrix(-axis) @ r
            jac[:, k] = (residual(r_plus, t) - residual(r_minus, t)) / (2 * eps)
        for k in range(3):
            dt = np.zeros(3)
            dt[k] = eps
            jac[:, 3 + k] = (residual(r, t + dt) - residual(r, t - dt)) / (2 * eps)
        delta, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        r = rotvec_to_matrix(delta[:3]) @ r
        t = t + delta[3:]
        if np.max(np.abs(delta)) < REFINE_STEP_TOL:
            break
    return r, t


def decompose_homography(h, camera: CameraModel, correspondences=None) -> PoseEstimate:
    """Recover the camera pose in the plane frame from a homography.

    The homography must map plane coordinates (meters, z = 0) to ideal
    undistorted pixels.  When ``correspondences`` (plane_xy, pixels) are
    given, the reported RMSE measures them against the rigidified pose;
    otherwise four points mapped through H itself serve as the reference,
    so the RMSE reports how much rigidity the decomposition had to force.
    """
    h = np.asarray(h, dtype=float)
    if correspondences is not None:
        plane_xy, pixels = correspondences
        plane_xy, _ = check_points(plane_xy, 2, "plane points")
        pixels, _ = check_points(pixels, 2, "pixels")
    else:
        plane_xy = np.array([[0.0, 0.0], [0.1, 0.0], [0.1, 0.1], [0.0, 0.1]])
        pixels = apply_homography_points(h, plane_xy)
    rotation, translation = _extrinsic_from_homography(
        h, camera, plane_xy.mean(axis=0)
    )
    projected = _ideal_projection(rotation, translation, plane_xy, camera)
    rmse = float(np.sqrt(np.mean(np.sum((projected - pixels) ** 2, axis=1))))
    extrinsic = RigidTransform(rotation, translation, check=False)
    return PoseEstimate(
        pose=extrinsic.inverse(),
        reprojection_rmse=rmse,
        n_correspondences=len(plane_xy),
    )


def localize_from_tags(observations, board: "BoardModel", camera: CameraModel,
                       *, refine: bool = True,
                       max_iters: int = REFINE_MAX_ITERS) -> PoseEstimate:
    """World-frame camera pose from the visible tags of one frame.

    Pools every observed tag's corners into one correspondence set,
    undistorts the pixels, runs the DLT + decomposition (+ optional
    Gauss-Newton polish), and reports the reprojection RMSE of the final
    pose against the raw observed pixels through the full camera model.
    """
    observations = list(observations)
    if not observations:
        raise LocalizationError("no tag observations in this frame")
    tags_by_id = {tag.tag_id: tag for tag in board.tags}
    board_xy = []
    pixels_raw = []
    for obs in observations:
        if obs.tag_id not in tags_by_id:
            raise ValueError(f"observation references unknown tag id {obs.tag_id}")
        board_xy.append(tags_by_id[obs.tag_id].corners)
        pixels_raw.append(obs.corners)
    board_xy = np.vstack(board_xy)
    pixels_raw = np.vstack(pixels_raw)

    normalized = check_points(camera.pixel_to_normalized(pixels_raw), 2, "normalized")[0]
    ideal = np.column_stack(
        [camera.fx * normalized[:, 0] + camera.cx,
         camera.fy * normalized[:, 1] + camera.cy]
    )

    h = estimate_homography(board_xy, ideal)
    rotation, translation = _extrinsic_from_homography(h, camera, board_xy.mean(axis=0))
    if refine:
        rotation, translation = refine_extrinsic(
            rotation, translation, board_xy, ideal, camera, max_iters
        )
    camera_in_board = RigidTransform(rotation, translation, check=False).inverse()
    world_pose = board.pose @ camera_in_board

    corners_world = board.to_world(board_xy)
    reprojected = project_points(corners_world, world_pose, camera)
    rmse = float(np.sqrt(np.mean(np.sum((reprojected - pixels_raw) ** 2, axis=1))))
    return PoseEstimate(
        pose=world_pose,
        reprojection_rmse=rmse,
        n_correspondences=len(board_xy),
    )


def pose_errors(estimate: RigidTransform, truth: RigidTransform) -> tuple[float, float]:
    """(translation error in meters, rotation error in radians)."""
    translation = float(np.linalg.norm(estimate.translation - truth.translation))
    rotation = (estimate.inverse() @ truth).rotation_angle()
    return translation, rotation


def tag_count_sweep(board: "BoardModel", camera: CameraModel, *,
                    pixel_sigma: float = 0.5, n_trials: int = 1000,
                    distance: float = 1.2, seed: int = 0,
                    tag_counts=(1, 2, 3, 4), refine: bool = True) -> dict:
    """Monte-Carlo pose error vs number of visible tags.

    Each trial samples a camera pose at roughly ``distance`` with the
    lateral offsets a scanning arm would use (oblique views make the tilt
    of a planar target first-order observable), projects the corners of
    the first k tags, perturbs them with isotropic Gaussian pixel noise,
    localizes, and records translation/rotation error against the true
    pose.  Returns per-count median errors.
    """
    rng = np.random.default_rng(seed)
    center = board.to_world(np.array([[board.width / 2, board.height / 2]]))[0]
    normal = board.pose.rotation[:, 2]
    x_axis = board.pose.rotation[:, 0]
    y_axis = board.pose.rotation[:, 1]

    results = {int(k): {"translation_m": [], "rotation_rad": []} for k in tag_counts}
    for _ in range(n_trials):
        offset = rng.uniform(-0.4, 0.4, 2) * np.array([1.0, 0.6])
        position = center + distance * normal + offset[0] * x_axis + offset[1] * y_axis
        aim = center + rng.uniform(-0.05, 0.05, 2)[0] * x_axis
        z = aim - position
        z = z / np.linalg.norm(z)
        y0 = -y_axis - (-y_axis @ z) * z
        y = y0 / np.linalg.norm(y0)
        x = np.cross(y, z)
        roll = rng.uniform(-0.15, 0.15)
        c, s = np.cos(roll), np.sin(roll)
        rot = np.column_stack([x, y, z]) @ np.array(
            [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
        )
        true_pose = RigidTransform(rot, position, check=False)

        noise = rng.normal(0.0, pixel_sigma, (len(board.tags) * 4, 2))
        for k in tag_counts:
            observations = []
            for j, tag in enumerate(board.tags[:k]):
                corners_px = project_points(
                    board.to_world(tag.corners), true_pose, camera
                )
                observations.append(
                    TagObservation(tag.tag_id, corners_px + noise[4 * j:4 * j + 4])
                )
            estimate = localize_from_tags(observations, board, camera, refine=refine)
            dt, dr = pose_errors(estimate.pose, true_pose)
            results[int(k)]["translation_m"].append(dt)
            results[int(k)]["rotation_rad"].append(dr)

    return {
        k: {
            "median_translation_m": float(np.median(v["translation_m"])),
            "median_rotation_rad": float(np.median(v["rotation_rad"])),
            "n_trials": n_trials,
        }
        for k, v in results.items()
    }
