"""Scene / run configuration files and their validation.

Scene files are JSON and carry the virtual rig: board geometry, object and
tag layout, camera mount, the initial (labeling) end-effector pose, the
workspace box for random scanning, the noise model, and a default seed.
Units at this boundary follow how rigs quote them: meters for geometry,
millimeters for repeatability bounds, degrees for rotations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .camera import CameraModel
from .exceptions import ConfigurationError
from .geometry import CameraMount, RigidTransform
from .propagation import PolygonAnnotation
from .simulator import (
    BoardModel,
    BoardObject,
    FiducialTag,
    NoiseModel,
    Workspace,
    default_board_pose,
    default_camera,
    default_initial_camera_pose,
    default_workspace,
    make_board,
)

DEFAULT_SEED = 7
DEFAULT_SCAN_DISTANCE = 1.2


@dataclass(frozen=True)
class SceneConfig:
    board: BoardModel
    noise: NoiseModel
    workspace: Workspace
    mount: CameraMount
    initial_pose: RigidTransform  # end-effector pose for the labeled frame
    seed: int = DEFAULT_SEED

    def initial_camera_pose(self) -> RigidTransform:
        return self.initial_pose @ self.mount.transform()


def default_scene(seed: int = DEFAULT_SEED, n_objects: int = 20) -> SceneConfig:
    board = make_board(n_objects=n_objects, seed=seed)
    mount = CameraMount()
    camera_pose = default_initial_camera_pose(board, DEFAULT_SCAN_DISTANCE)
    initial_ee = camera_pose @ mount.transform().inverse()
    return SceneConfig(
        board=board,
        noise=NoiseModel(),
        workspace=default_workspace(),
        mount=mount,
        initial_pose=initial_ee,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# (de)serialization


def _pose_to_dict(pose: RigidTransform) -> dict:
    return {
        "translation_m": [float(v) for v in pose.translation],
        "rotation_vector": [float(v) for v in pose.to_pose_vector()[3:]],
    }


def _pose_from_dict(data: dict, what: str) -> RigidTransform:
    try:
        vec = np.concatenate([
            np.asarray(data["translation_m"], dtype=float),
            np.asarray(data["rotation_vector"], dtype=float),
        ])
        return RigidTransform.from_pose_vector(vec)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigurationError(f"bad {what} pose: {exc}") from exc


def scene_to_dict(scene: SceneConfig) -> dict:
    board = scene.board
    return {
        "seed": scene.seed,
        "board": {
            "width_m": board.width,
            "height_m": board.height,
            "pose": _pose_to_dict(board.pose),
            "objects": [
                {"class_id": obj.class_id,
                 "polygon_m": [[float(x), float(y)] for x, y in obj.polygon]}
                for obj in board.objects
            ],
            "tags": [
                {"id": tag.tag_id,
                 "corners_m": [[float(x), float(y)] for x, y in tag.corners]}
                for tag in board.tags
            ],
        },
        "mount": {
            "theta_rad": scene.mount.theta,
            "offset_m": [scene.mount.dx, scene.mount.dy, scene.mount.dz],
        },
        "initial_pose": _pose_to_dict(scene.initial_pose),
        "workspace": {
            "min_m": list(scene.workspace.lower),
            "max_m": list(scene.workspace.upper),
            "max_roll_deg": scene.workspace.max_roll_deg,
            "aim_fraction": scene.workspace.aim_fraction,
        },
        "noise": {
            "translation_bound_mm": [1e3 * b for b in scene.noise.translation_bound],
            "rotation_bound_deg": scene.noise.rotation_bound_deg,
            "range_sigma_mm": 1e3 * scene.noise.range_sigma,
            "tag_pixel_sigma_px": scene.noise.tag_pixel_sigma,
        },
    }


def scene_from_dict(data: dict) -> SceneConfig:
    try:
        board_data = data["board"]
        board = BoardModel(
            pose=_pose_from_dict(board_data["pose"], "board"),
            width=float(board_data["width_m"]),
            height=float(board_data["height_m"]),
            objects=tuple(
                BoardObject(obj["class_id"], np.asarray(obj["polygon_m"], dtype=float))
                for obj in board_data["objects"]
            ),
            tags=tuple(
                FiducialTag(tag["id"], np.asarray(tag["corners_m"], dtype=float))
                for tag in board_data.get("tags", [])
            ),
        )
        mount_data = data.get("mount", {})
        mount = CameraMount(
            theta=float(mount_data.get("theta_rad", np.pi / 2)),
            dx=float(mount_data.get("offset_m", [0.0, 0.05, 0.03])[0]),
            dy=float(mount_data.get("offset_m", [0.0, 0.05, 0.03])[1]),
            dz=float(mount_data.get("offset_m", [0.0, 0.05, 0.03])[2]),
        )
        ws = data["workspace"]
        workspace = Workspace(
            lower=tuple(ws["min_m"]),
            upper=tuple(ws["max_m"]),
            max_roll_deg=float(ws.get("max_roll_deg", 20.0)),
            aim_fraction=float(ws.get("aim_fraction", 0.5)),
        )
        nz = data["noise"]
        noise = NoiseModel(
            translation_bound=tuple(1e-3 * float(b) for b in nz["translation_bound_mm"]),
            rotation_bound_deg=float(nz["rotation_bound_deg"]),
            range_sigma=1e-3 * float(nz["range_sigma_mm"]),
            tag_pixel_sigma=float(nz["tag_pixel_sigma_px"]),
        )
        return SceneConfig(
            board=board,
            noise=noise,
            workspace=workspace,
            mount=mount,
            initial_pose=_pose_from_dict(data["initial_pose"], "initial"),
            seed=int(data.get("seed", DEFAULT_SEED)),
        )
    except ConfigurationError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigurationError(f"invalid scene configuration: {exc}") from exc


def load_scene(path) -> SceneConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"scene file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"scene file {path} is not valid JSON: {exc}") from exc
    return scene_from_dict(data)


def save_scene(path, scene: SceneConfig) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_camera(path) -> CameraModel:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"camera calibration file not found: {path}")
    try:
        return CameraModel.load(path)
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigurationError(f"invalid camera calibration {path}: {exc}") from exc


def save_camera(path, camera: CameraModel) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(camera.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_initial_labels(path) -> list[PolygonAnnotation]:
    """Initial-frame labels: {"objects": [{"class_id", "polygon": [[u,v]..]}]}."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"initial annotation file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        labels = [
            PolygonAnnotation(obj["class_id"], np.asarray(obj["polygon"], dtype=float))
            for obj in data["objects"]
        ]
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise ConfigurationError(f"invalid initial annotation {path}: {exc}") from exc
    if not labels:
        raise ConfigurationError(f"initial annotation {path} labels no objects")
    return labels


def save_initial_labels(path, annotations) -> None:
    payload = {
        "objects": [
            {"class_id": ann.class_id,
             "polygon": [[round(float(u), 6), round(float(v), 6)]
                         for u, v in ann.vertices]}
            for ann in annotations
        ]
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    """Everything `scan` needs; validation is fail-fast and touches no
    output paths, so a bad run leaves nothing behind."""

    scene_path: str
    camera_path: str
    init_path: str
    out_dir: str
    frames: int
    seed: int | None = None
    method: str = "odometry"
    jobs: int = 1
    write_images: bool = True
    write_overlays: bool = False
    truth_dir: str | None = None
    initial_label_sec: float = 0.0
    zero_noise: bool = False
    translation_bound_mm: tuple[float, float, float] | None = None
    rotation_bound_deg: float | None = None
    range_sigma_mm: float | None = None
    tag_pixel_sigma_px: float | None = None

    def validate(self) -> tuple[SceneConfig, CameraModel, list[PolygonAnnotation]]:
        if self.frames < 1:
            raise ConfigurationError(f"frames must be >= 1, got {self.frames}")
        if self.method not in ("odometry", "fiducial"):
            raise ConfigurationError(
                f"method must be 'odometry' or 'fiducial', got {self.method!r}"
            )
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1")
        if self.initial_label_sec < 0:
            raise ConfigurationError("initial_label_sec must be >= 0")
        scene = load_scene(self.scene_path)
        camera = load_camera(self.camera_path)
        labels = load_initial_labels(self.init_path)
        scene = self._apply_noise_overrides(scene)
        return scene, camera, labels

    def _apply_noise_overrides(self, scene: SceneConfig) -> SceneConfig:
        noise = scene.noise
        if self.zero_noise:
            noise = NoiseModel.zero()
        changes = {}
        if self.translation_bound_mm is not None:
            changes["translation_bound"] = tuple(
                1e-3 * float(b) for b in self.translation_bound_mm
            )
        if self.rotation_bound_deg is not None:
            changes["rotation_bound_deg"] = float(self.rotation_bound_deg)
        if self.range_sigma_mm is not None:
            changes["range_sigma"] = 1e-3 * float(self.range_sigma_mm)
        if self.tag_pixel_sigma_px is not None:
            changes["tag_pixel_sigma"] = float(self.tag_pixel_sigma_px)
        if changes:
            noise = NoiseModel(
                translation_bound=changes.get("translation_bound", noise.translation_bound),
                rotation_bound_deg=changes.get("rotation_bound_deg", noise.rotation_bound_deg),
                range_sigma=changes.get("range_sigma", noise.range_sigma),
                tag_pixel_sigma=changes.get("tag_pixel_sigma", noise.tag_pixel_sigma),
            )
        if noise is scene.noise:
            return scene
        return SceneConfig(
            board=scene.board,
            noise=noise,
            workspace=scene.workspace,
            mount=scene.mount,
            initial_pose=scene.initial_pose,
            seed=scene.seed,
        )


def write_example_configs(directory, seed: int = DEFAULT_SEED,
                          n_objects: int = 20) -> dict:
    """Emit a ready-to-run scene/camera/labels trio into a directory.

    The labels file holds exact projections of the board objects into the
    initial camera pose, standing in for the operator's careful annotation
    of the first frame.
    """
    from .simulator import exact_annotations

    directory = Path(directory)
    scene = default_scene(seed=seed, n_objects=n_objects)
    camera = default_camera()
    labels = exact_annotations(scene.board, scene.initial_camera_pose(), camera)
    paths = {
        "scene": directory / "scene.json",
        "camera": directory / "camera.json",
        "labels": directory / "initial_labels.json",
    }
    save_scene(paths["scene"], scene)
    save_camera(paths["camera"], camera)
    save_initial_labels(paths["labels"], labels)
    return {k: str(v) for k, v in paths.items()}
