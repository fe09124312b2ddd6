"""Virtual replacement for the physical scanning rig.

Provides a planar barcode board with corner fiducial tags, random scan
trajectories of a camera carried on a simulated 6-DoF arm, repeatability
and rangefinder noise injection, tag-corner synthesis, and a schematic
polygon renderer with deterministic light tinting.

Everything is a pure function of (configuration, seed): two runs with the
same inputs produce bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraModel, Plane, RangeEstimate, average_range, project_points
from .dataset_io import fill_polygon, polygon_coverage_window
from .exceptions import ConfigurationError, DegenerateGeometryError
from .fiducial import TagObservation
from .geometry import (
    CameraMount,
    RigidTransform,
    matrix_to_rotvec,
    rotation_about_x,
    rotation_about_z,
    rotvec_to_matrix,
)
from .propagation import PolygonAnnotation
from .validation import check_points, check_polygon_vertices, check_vector

TAG_SQUARE_TOL = 1e-9

# Default repeatability/noise figures measured on the modeled arm class:
# per-axis return-to-home translation maxima (m), rotation maximum per axis
# (deg), rangefinder spread (m), synthetic tag-corner detector spread (px).
DEFAULT_TRANSLATION_BOUND = (0.045e-3, 0.032e-3, 0.05e-3)
DEFAULT_ROTATION_BOUND_DEG = 0.08
DEFAULT_RANGE_SIGMA = 0.0063
DEFAULT_TAG_PIXEL_SIGMA = 0.5


@dataclass(frozen=True)
class BoardObject:
    """A labeled 2D object on the board plane (coordinates in meters)."""

    class_id: int
    polygon: np.ndarray

    def __post_init__(self):
        p = check_polygon_vertices(self.polygon, "board object polygon")
        p.flags.writeable = False
        object.__setattr__(self, "polygon", p)
        object.__setattr__(self, "class_id", int(self.class_id))


@dataclass(frozen=True)
class FiducialTag:
    """A square localization tag: id plus 4 board-plane corners (meters)."""

    tag_id: int
    corners: np.ndarray

    def __post_init__(self):
        c, _ = check_points(self.corners, 2, "tag corners")
        if c.shape[0] != 4:
            raise ValueError("a fiducial tag has exactly 4 corners")
        edges = np.roll(c, -1, axis=0) - c
        lengths = np.linalg.norm(edges, axis=1)
        if np.max(np.abs(lengths - lengths[0])) > TAG_SQUARE_TOL:
            raise ValueError("tag corners do not form a square (unequal sides)")
        if abs(float(edges[0] @ edges[1])) > TAG_SQUARE_TOL:
            raise ValueError("tag corners do not form a square (corner not right)")
        c.flags.writeable = False
        object.__setattr__(self, "corners", c)
        object.__setattr__(self, "tag_id", int(self.tag_id))

    @property
    def size(self) -> float:
        return float(np.linalg.norm(self.corners[1] - self.corners[0]))


@dataclass(frozen=True)
class BoardModel:
    """The planar target: its pose in the world, extent, objects and tags.

    Board coordinates are (x, y) in [0, width] x [0, height] on the z = 0
    plane of the board frame; the board normal is the frame's +z axis.
    """

    pose: RigidTransform
    width: float
    height: float
    objects: tuple[BoardObject, ...]
    tags: tuple[FiducialTag, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "tags", tuple(self.tags))
        if not (self.width > 0 and self.height > 0):
            raise ValueError("board extent must be positive")
        for obj in self.objects:
            self._check_bounds(obj.polygon, f"object class {obj.class_id}")
        for tag in self.tags:
            self._check_bounds(tag.corners, f"tag {tag.tag_id}")

    def _check_bounds(self, points: np.ndarray, what: str) -> None:
        if (np.any(points[:, 0] < 0) or np.any(points[:, 0] > self.width)
                or np.any(points[:, 1] < 0) or np.any(points[:, 1] > self.height)):
            raise ValueError(f"{what} extends outside the board")

    def plane(self) -> Plane:
        return Plane.from_point_normal(self.pose.translation, self.pose.rotation[:, 2])

    def to_world(self, points_2d) -> np.ndarray:
        p, single = check_points(points_2d, 2, "board points")
        world = self.pose.apply(np.column_stack([p, np.zeros(len(p))]))
        return world[0] if single else world

    @property
    def center_world(self) -> np.ndarray:
        return self.to_world(np.array([self.width / 2.0, self.height / 2.0]))

    def corners_world(self) -> np.ndarray:
        c = np.array([[0.0, 0.0], [self.width, 0.0],
                      [self.width, self.height], [0.0, self.height]])
        return self.to_world(c)


@dataclass(frozen=True)
class NoiseModel:
    """Sensor/actuator noise figures.

    Repeatability is modeled per axis as a zero-mean Gaussian with sigma =
    bound / 3, re-drawn until inside the bound, so published maxima hold
    exactly while the distribution stays smooth.  Rotation bounds are in
    degrees (that is how rigs quote them); everything else is SI.
    """

    translation_bound: tuple[float, float, float] = DEFAULT_TRANSLATION_BOUND
    rotation_bound_deg: float = DEFAULT_ROTATION_BOUND_DEG
    range_sigma: float = DEFAULT_RANGE_SIGMA
    tag_pixel_sigma: float = DEFAULT_TAG_PIXEL_SIGMA

    def __post_init__(self):
        tb = tuple(float(b) for b in self.translation_bound)
        if len(tb) != 3 or any(b < 0 for b in tb):
            raise ValueError("translation_bound must be 3 non-negative values")
        if self.rotation_bound_deg < 0 or self.range_sigma < 0 or self.tag_pixel_sigma < 0:
            raise ValueError("noise figures must be non-negative")
        object.__setattr__(self, "translation_bound", tb)

    @classmethod
    def zero(cls) -> "NoiseModel":
        return cls((0.0, 0.0, 0.0), 0.0, 0.0, 0.0)

    @property
    def rotation_bound_rad(self) -> float:
        return float(np.deg2rad(self.rotation_bound_deg))


@dataclass(frozen=True)
class Workspace:
    """Axis-aligned box the camera may occupy, plus aiming limits."""

    lower: tuple[float, float, float]
    upper: tuple[float, float, float]
    max_roll_deg: float = 20.0
    aim_fraction: float = 0.5

    def __post_init__(self):
        lo = check_vector(self.lower, 3, "workspace lower")
        hi = check_vector(self.upper, 3, "workspace upper")
        if np.any(hi < lo):
            raise ValueError("workspace upper bound below lower bound")
        if not 0.0 <= self.aim_fraction <= 1.0:
            raise ValueError("aim_fraction must be within [0, 1]")
        object.__setattr__(self, "lower", tuple(float(v) for v in lo))
        object.__setattr__(self, "upper", tuple(float(v) for v in hi))


@dataclass(frozen=True)
class TrajectoryFrame:
    """One scan stop: the physical end-effector pose and the one the
    controller reports (physical pose perturbed by repeatability noise)."""

    frame_id: int
    true_pose: RigidTransform
    reported_pose: RigidTransform

    def true_camera(self, mount: CameraMount) -> RigidTransform:
        return self.true_pose @ mount.transform()

    def reported_camera(self, mount: CameraMount) -> RigidTransform:
        return self.reported_pose @ mount.transform()


@dataclass(frozen=True)
class Trajectory:
    frames: tuple[TrajectoryFrame, ...]
    mount: CameraMount

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)


# ---------------------------------------------------------------------------
# board construction


def default_board_pose() -> RigidTransform:
    """Vertical board 1.45 m in front of the base, lower-left at z=0.05."""
    return RigidTransform(rotation_about_x(np.pi / 2), (-0.5, 1.45, 0.05), check=False)


def make_board(width: float = 1.0, height: float = 0.6, n_objects: int = 20, *,
               pose: RigidTransform | None = None, seed: int = 0,
               object_width=(0.017, 0.029), object_height=(0.007, 0.012),
               tag_size: float = 0.13, tag_margin: float = 0.01,
               class_id: int = 1, gap: float = 0.008,
               max_attempts: int = 20000) -> BoardModel:
    """Deterministic board with corner tags and non-overlapping barcode
    rectangles scattered over the free area."""
    if pose is None:
        pose = default_board_pose()
    rng = np.random.default_rng(seed)

    m, s = tag_margin, tag_size
    tag_origins = [(m, m), (width - m - s, m),
                   (width - m - s, height - m - s), (m, height - m - s)]
    tags = tuple(
        FiducialTag(i, np.array([[x, y], [x + s, y], [x + s, y + s], [x, y + s]]))
        for i, (x, y) in enumerate(tag_origins)
    )
    keep_out = [(x - gap, y - gap, x + s + gap, y + s + gap) for x, y in tag_origins]

    rects: list[tuple[float, float, float, float]] = []
    attempts = 0
    while len(rects) < n_objects:
        attempts += 1
        if attempts > max_attempts:
            raise ConfigurationError(
                f"could not place {n_objects} objects on a {width}x{height} board"
            )
        w = rng.uniform(*object_width)
        h = rng.uniform(*object_height)
        x = rng.uniform(m, width - m - w)
        y = rng.uniform(m, height - m - h)
        box = (x - gap, y - gap, x + w + gap, y + h + gap)
        blocked = any(
            box[0] < other[2] and box[2] > other[0]
            and box[1] < other[3] and box[3] > other[1]
            for other in rects + keep_out
        )
        if not blocked:
            rects.append((x, y, x + w, y + h))

    objects = tuple(
        BoardObject(class_id, np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]))
        for x0, y0, x1, y1 in rects
    )
    return BoardModel(pose=pose, width=width, height=height,
                      objects=objects, tags=tags)


# ---------------------------------------------------------------------------
# noise injection


def _truncated_normal(rng: np.random.Generator, bound: float) -> float:
    if bound <= 0.0:
        return 0.0
    sigma = bound / 3.0
    while True:
        draw = rng.normal(0.0, sigma)
        if abs(draw) <= bound:
            return float(draw)


def apply_pose_noise(pose: RigidTransform, noise: NoiseModel,
                     rng: np.random.Generator) -> RigidTransform:
    """Perturb a pose by one repeatability draw.

    Translation noise adds per world axis; rotation noise left-multiplies a
    small rotation whose rotation-vector components are bounded per axis.
    Measured back with pose_deviation this reproduces the draws exactly.
    """
    dt = np.array([_truncated_normal(rng, b) for b in noise.translation_bound])
    bound_rad = noise.rotation_bound_rad
    dr = np.array([_truncated_normal(rng, bound_rad) for _ in range(3)])
    return RigidTransform(
        rotvec_to_matrix(dr) @ pose.rotation, pose.translation + dt, check=False
    )


def pose_deviation(reference: RigidTransform, actual: RigidTransform) -> np.ndarray:
    """6-vector deviation (world-frame translation delta, relative rotation
    vector).  The exact inverse of apply_pose_noise's injection."""
    dt = actual.translation - reference.translation
    dr = matrix_to_rotvec(actual.rotation @ reference.rotation.T)
    return np.concatenate([dt, dr])


def simulate_home_returns(home_pose: RigidTransform, noise: NoiseModel,
                          n_trials: int = 300, seed: int = 0) -> np.ndarray:
    """Return-to-home repeatability trials: (n_trials, 6) deviations."""
    rng = np.random.default_rng(seed)
    return np.stack([
        pose_deviation(home_pose, apply_pose_noise(home_pose, noise, rng))
        for _ in range(n_trials)
    ])


# ---------------------------------------------------------------------------
# trajectory generation


def look_at_pose(position, target, roll: float = 0.0) -> RigidTransform:
    """Camera pose at ``position`` with +z through ``target``.

    The image-down direction (+y) is aligned with world-down as far as the
    aim allows; ``roll`` then rotates about the optical axis.
    """
    position = check_vector(position, 3, "position")
    target = check_vector(target, 3, "target")
    z = target - position
    norm = float(np.linalg.norm(z))
    if norm < 1e-9:
        raise DegenerateGeometryError("camera position coincides with the target")
    z = z / norm
    down = np.array([0.0, 0.0, -1.0])
    y = down - (down @ z) * z
    y_norm = float(np.linalg.norm(y))
    if y_norm < 1e-9:
        raise DegenerateGeometryError("optical axis is vertical; roll is undefined")
    y = y / y_norm
    x = np.cross(y, z)
    rotation = np.column_stack([x, y, z]) @ rotation_about_z(roll)
    return RigidTransform(rotation, position, check=False)


def sample_camera_pose(board: BoardModel, camera: CameraModel,
                       workspace: Workspace, rng: np.random.Generator,
                       max_attempts: int = 1000) -> RigidTransform:
    """Random pose inside the workspace aimed at the board, resampled until
    the board center lands inside the image."""
    lower = np.asarray(workspace.lower)
    upper = np.asarray(workspace.upper)
    half = workspace.aim_fraction / 2.0
    center = board.center_world
    max_roll = float(np.deg2rad(workspace.max_roll_deg))
    for _ in range(max_attempts):
        position = rng.uniform(lower, upper)
        aim_2d = rng.uniform(
            [board.width * (0.5 - half), board.height * (0.5 - half)],
            [board.width * (0.5 + half), board.height * (0.5 + half)],
        )
        roll = rng.uniform(-max_roll, max_roll)
        try:
            pose = look_at_pose(position, board.to_world(aim_2d), roll)
        except DegenerateGeometryError:
            continue
        pixel, visible = project_points(center, pose, camera, behind="mask")
        if visible and camera.contains(pixel):
            return pose
    raise ConfigurationError(
        f"no workspace pose kept the board center in view after {max_attempts} attempts"
    )


def generate_trajectory(board: BoardModel, camera: CameraModel,
                        workspace: Workspace, n_frames: int,
                        noise: NoiseModel, seed,
                        mount: CameraMount = CameraMount()) -> Trajectory:
    """Random scan trajectory; bit-for-bit deterministic for a fixed seed.

    Poses are stored at the end-effector: the sampled camera pose is pulled
    back through the mount, and repeatability noise perturbs the
    end-effector pose exactly as the physical arm errs.
    """
    if n_frames < 0:
        raise ValueError("n_frames must be >= 0")
    rng = np.random.default_rng(seed)
    mount_inverse = mount.transform().inverse()
    frames = []
    for index in range(n_frames):
        camera_pose = sample_camera_pose(board, camera, workspace, rng)
        true_ee = camera_pose @ mount_inverse
        reported_ee = apply_pose_noise(true_ee, noise, rng)
        frames.append(TrajectoryFrame(index, true_ee, reported_ee))
    return Trajectory(tuple(frames), mount)


# ---------------------------------------------------------------------------
# sensors


def simulate_rangefinder(camera_pose: RigidTransform, board: BoardModel,
                         noise: NoiseModel, n_samples: int = 1000,
                         rng: np.random.Generator | None = None,
                         seed: int = 0) -> RangeEstimate:
    """Burst of axial range measurements against the board plane, averaged.

    The beam runs along the camera optical axis; each raw sample is the true
    axial distance plus Gaussian noise of sigma noise.range_sigma.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    plane = board.plane()
    origin = camera_pose.translation
    direction = camera_pose.rotate(np.array([0.0, 0.0, 1.0]))
    denom = float(direction @ plane.normal)
    if abs(denom) < 1e-9:
        raise DegenerateGeometryError("rangefinder axis is parallel to the board")
    axial = (plane.offset - float(origin @ plane.normal)) / denom
    if axial <= 0:
        raise DegenerateGeometryError("rangefinder axis points away from the board")
    samples = axial + rng.normal(0.0, noise.range_sigma, n_samples)
    return average_range(samples)


def observe_tags(board: BoardModel, camera_pose: RigidTransform,
                 camera: CameraModel, noise: NoiseModel,
                 rng: np.random.Generator | None = None,
                 seed: int = 0) -> list[TagObservation]:
    """Corner observations of every tag fully inside the image.

    Exact projections plus isotropic Gaussian pixel noise; a tag with any
    corner outside the image (or behind the camera) is omitted, which is
    exactly how tag visibility degrades at close range.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    observations = []
    for tag in board.tags:
        pixels, visible = project_points(
            board.to_world(tag.corners), camera_pose, camera, behind="mask"
        )
        if not np.all(visible) or not np.all(camera.contains(pixels)):
            continue
        noisy = pixels + rng.normal(0.0, noise.tag_pixel_sigma, (4, 2))
        observations.append(TagObservation(tag.tag_id, noisy))
    return observations


def exact_annotations(board: BoardModel, camera_pose: RigidTransform,
                      camera: CameraModel) -> list[PolygonAnnotation]:
    """Ground-truth pixel annotations: exact projections of the board
    objects.  Objects with any vertex behind the camera are dropped, the
    same visibility rule the propagator uses."""
    annotations = []
    for obj in board.objects:
        pixels, visible = project_points(
            board.to_world(obj.polygon), camera_pose, camera, behind="mask"
        )
        if np.all(visible):
            annotations.append(PolygonAnnotation(obj.class_id, pixels))
    return annotations


# ---------------------------------------------------------------------------
# rendering

_BACKGROUND = np.array([26.0, 26.0, 30.0])
_BOARD_COLOR = np.array([205.0, 205.0, 200.0])
_LABEL_COLOR = np.array([246.0, 246.0, 242.0])
_BAR_COLOR = np.array([24.0, 22.0, 24.0])
_TAG_BLACK = np.array([18.0, 18.0, 18.0])
_TAG_WHITE = np.array([240.0, 240.0, 240.0])


def _paint(canvas: np.ndarray, polygon_px: np.ndarray, color: np.ndarray,
           supersample: int) -> None:
    h, w = canvas.shape[:2]
    r0, c0, cov = polygon_coverage_window(polygon_px, w, h, supersample)
    if cov.size == 0:
        return
    region = canvas[r0:r0 + cov.shape[0], c0:c0 + cov.shape[1]]
    region += cov[:, :, None] * (color - region)


def _project_board_polygon(points_2d, board, camera_pose, camera):
    pixels, visible = project_points(
        board.to_world(np.asarray(points_2d, dtype=float)),
        camera_pose, camera, behind="mask",
    )
    return pixels if np.all(visible) else None


def _barcode_bars(rect: np.ndarray, index: int) -> list[np.ndarray]:
    """Deterministic stripe sub-rectangles for an axis-aligned label rect.

    The pattern depends only on the object's index on the board, never on
    the tint stream, so geometry stays identical across tint seeds.
    """
    x0, y0 = rect.min(axis=0)
    x1, y1 = rect.max(axis=0)
    rng = np.random.default_rng(9176 + 31 * index)
    quiet = 0.10 * (x1 - x0)
    left, right = x0 + quiet, x1 - quiet
    modules = rng.integers(1, 4, size=24)
    edges = np.concatenate([[0], np.cumsum(modules)]).astype(float)
    edges *= (right - left) / edges[-1]
    bar_y0, bar_y1 = y0 + 0.12 * (y1 - y0), y1 - 0.12 * (y1 - y0)
    bars = []
    for k in range(0, len(edges) - 1, 2):
        bx0, bx1 = left + edges[k], left + edges[k + 1]
        bars.append(np.array([[bx0, bar_y0], [bx1, bar_y0],
                              [bx1, bar_y1], [bx0, bar_y1]]))
    return bars


def _is_axis_aligned_rect(polygon: np.ndarray) -> bool:
    if polygon.shape[0] != 4:
        return False
    xs, ys = polygon[:, 0], polygon[:, 1]
    return len(set(np.round(xs, 12))) == 2 and len(set(np.round(ys, 12))) == 2


def _tag_patches(tag: FiducialTag) -> list[tuple[np.ndarray, np.ndarray]]:
    """(board polygon, color) patches of a schematic tag: black border,
    white interior, 2x2 id bit cells."""
    c0 = tag.corners[0]
    size = tag.size
    ex = (tag.corners[1] - tag.corners[0]) / size
    ey = (tag.corners[3] - tag.corners[0]) / size

    def square(origin_frac, extent_frac):
        o = c0 + (origin_frac[0] * ex + origin_frac[1] * ey) * size
        w = extent_frac * size
        return np.stack([o, o + w * ex, o + w * ex + w * ey, o + w * ey])

    patches = [(square((0.0, 0.0), 1.0), _TAG_BLACK),
               (square((0.15, 0.15), 0.7), _TAG_WHITE)]
    for bit in range(4):
        if tag.tag_id & (1 << bit):
            gx, gy = bit % 2, bit // 2
            patches.append(
                (square((0.2 + 0.32 * gx, 0.2 + 0.32 * gy), 0.28), _TAG_BLACK)
            )
    return patches


def _bilinear_field(rng: np.random.Generator, height: int, width: int,
                    low: float, high: float, cells: int = 4) -> np.ndarray:
    """Smooth per-region multiplier field upsampled from a coarse grid."""
    grid = rng.uniform(low, high, (cells, cells, 3))
    xs = np.linspace(0, cells - 1, width)
    xi = np.minimum(xs.astype(np.intp), cells - 2)
    xf = (xs - xi)[None, :, None]
    rows = grid[:, xi, :] * (1 - xf) + grid[:, xi + 1, :] * xf  # (cells, W, 3)
    ys = np.linspace(0, cells - 1, height)
    yi = np.minimum(ys.astype(np.intp), cells - 2)
    yf = (ys - yi)[:, None, None]
    return rows[yi] * (1 - yf) + rows[yi + 1] * yf


def render_frame(board: BoardModel, camera_pose: RigidTransform,
                 camera: CameraModel,
                 tint_rng: np.random.Generator | int | None = None,
                 supersample: int = 4,
                 make_image: bool = True) -> tuple[np.ndarray | None, np.ndarray]:
    """Schematic view of the board plus the hard-edged ground-truth mask.

    The image is composited from supersampled polygon coverage (board,
    label patches, barcode stripes, tags) and then tinted with a
    deterministic color-temperature shift and a smooth per-region color
    field.  The mask is the exact even-odd rasterization of the projected
    object polygons and is untouched by the tint stream.  With
    make_image=False only the mask is produced (image is None).
    """
    h, w = camera.height, camera.width
    canvas = None
    if make_image:
        canvas = np.empty((h, w, 3))
        canvas[:] = _BACKGROUND
        board_px = _project_board_polygon(
            np.array([[0.0, 0.0], [board.width, 0.0],
                      [board.width, board.height], [0.0, board.height]]),
            board, camera_pose, camera,
        )
        if board_px is not None:
            _paint(canvas, board_px, _BOARD_COLOR, supersample)

    mask_acc = np.zeros((h, w), dtype=bool)
    for index, obj in enumerate(board.objects):
        pixels = _project_board_polygon(obj.polygon, board, camera_pose, camera)
        if pixels is None:
            continue
        mask_acc |= fill_polygon(pixels, w, h)
        if canvas is None:
            continue
        _paint(canvas, pixels, _LABEL_COLOR, supersample)
        if _is_axis_aligned_rect(obj.polygon):
            for bar in _barcode_bars(obj.polygon, index):
                bar_px = _project_board_polygon(bar, board, camera_pose, camera)
                if bar_px is not None:
                    _paint(canvas, bar_px, _BAR_COLOR, supersample)

    if canvas is not None:
        for tag in board.tags:
            for patch, color in _tag_patches(tag):
                patch_px = _project_board_polygon(patch, board, camera_pose, camera)
                if patch_px is not None:
                    _paint(canvas, patch_px, color, supersample)

        if tint_rng is not None:
            rng = (tint_rng if isinstance(tint_rng, np.random.Generator)
                   else np.random.default_rng(tint_rng))
            temperature = rng.uniform(-1.0, 1.0)
            multiplier = np.array([1.0 + 0.13 * temperature,
                                   1.0 + 0.02 * temperature,
                                   1.0 - 0.13 * temperature])
            field = _bilinear_field(rng, h, w, 0.88, 1.12)
            canvas = canvas * multiplier * field

    image = None
    if canvas is not None:
        image = np.clip(canvas, 0.0, 255.0).astype(np.uint8)
    mask = np.where(mask_acc, np.uint8(255), np.uint8(0))
    return image, mask


# ---------------------------------------------------------------------------
# scene defaults


def default_workspace() -> Workspace:
    return Workspace(lower=(-0.24, 0.22, 0.17), upper=(0.24, 0.50, 0.53),
                     max_roll_deg=20.0, aim_fraction=0.8)


def default_camera() -> CameraModel:
    return CameraModel(fx=500.0, fy=500.0, cx=320.0, cy=240.0,
                       width=640, height=480)


def default_initial_camera_pose(board: BoardModel,
                                distance: float = 1.2) -> RigidTransform:
    """Frontal camera: optical axis through the board center, image-down
    aligned with world-down, at the given standoff."""
    normal = board.pose.rotation[:, 2]
    position = board.center_world + distance * normal
    return look_at_pose(position, board.center_world, 0.0)
