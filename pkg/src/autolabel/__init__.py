"""autolabel: virtual scanner + label propagation for planar 2D objects.

Label one frame, scan from anywhere: polygon annotations are anchored on
the target plane from a single labeled view and re-projected into every
camera pose a (simulated) robot arm visits, producing fully annotated
datasets with polygon JSON and binary masks, plus the metrics to judge
them against an analytic oracle under realistic pose and range noise.
"""

from .camera import (
    CameraModel,
    Plane,
    RangeEstimate,
    average_range,
    back_project_to_plane,
    project_points,
    projection_matrix,
)
from .exceptions import (
    AutoLabelError,
    ConfigurationError,
    DegenerateGeometryError,
    LocalizationError,
    NotVisibleError,
    UndefinedMetricError,
)
from .fiducial import (
    PoseEstimate,
    TagObservation,
    decompose_homography,
    estimate_homography,
    localize_from_tags,
    tag_count_sweep,
)
from .geometry import (
    CameraMount,
    RigidTransform,
    matrix_to_rotvec,
    pose_delta,
    rotvec_to_matrix,
)
from .propagation import (
    AnchoredPolygon,
    FrameAnnotation,
    LabelPropagator,
    PolygonAnnotation,
    anchor_plane,
    anchor_polygons,
    apply_homography,
    measure_point_latency,
    plane_homography,
)
from .simulator import (
    BoardModel,
    BoardObject,
    FiducialTag,
    NoiseModel,
    Trajectory,
    Workspace,
    exact_annotations,
    generate_trajectory,
    make_board,
    observe_tags,
    pose_deviation,
    render_frame,
    simulate_home_returns,
    simulate_rangefinder,
)
from .dataset_io import (
    DatasetRecord,
    DatasetWriter,
    fill_polygon,
    overlay_image,
    rasterize_mask,
    read_annotation,
    read_manifest,
)
from .metrics import (
    LabelingReport,
    RepeatabilityStats,
    compare_datasets,
    mean_frame_time,
    object_error,
    pixel_error,
    repeatability_stats,
)
from .config import RunConfig, SceneConfig, default_scene, load_scene, write_example_configs
from .pipeline import ScanResult, run_scan

__version__ = "0.1.0"

__all__ = [
    "AnchoredPolygon",
    "AutoLabelError",
    "BoardModel",
    "BoardObject",
    "CameraModel",
    "CameraMount",
    "ConfigurationError",
    "DatasetRecord",
    "DatasetWriter",
    "DegenerateGeometryError",
    "FiducialTag",
    "FrameAnnotation",
    "LabelPropagator",
    "LabelingReport",
    "LocalizationError",
    "NoiseModel",
    "NotVisibleError",
    "Plane",
    "PolygonAnnotation",
    "PoseEstimate",
    "RangeEstimate",
    "RepeatabilityStats",
    "RigidTransform",
    "RunConfig",
    "ScanResult",
    "SceneConfig",
    "TagObservation",
    "Trajectory",
    "UndefinedMetricError",
    "Workspace",
    "anchor_plane",
    "anchor_polygons",
    "apply_homography",
    "average_range",
    "back_project_to_plane",
    "compare_datasets",
    "decompose_homography",
    "default_scene",
    "estimate_homography",
    "exact_annotations",
    "fill_polygon",
    "generate_trajectory",
    "load_scene",
    "localize_from_tags",
    "make_board",
    "matrix_to_rotvec",
    "mean_frame_time",
    "measure_point_latency",
    "object_error",
    "observe_tags",
    "overlay_image",
    "pixel_error",
    "plane_homography",
    "pose_delta",
    "pose_deviation",
    "project_points",
    "projection_matrix",
    "rasterize_mask",
    "read_annotation",
    "read_manifest",
    "render_frame",
    "repeatability_stats",
    "rotvec_to_matrix",
    "run_scan",
    "simulate_home_returns",
    "simulate_rangefinder",
    "tag_count_sweep",
    "write_example_configs",
]
