"""End-to-end scan pipeline: trajectory -> rangefinder -> anchor ->
per-frame localize / propagate / render -> dataset emission.

The physical rig is replaced by the simulator, but the information flow is
the real system's: annotations are anchored from the *reported* initial
pose and propagated through *reported* per-frame poses (odometry or tag
localization), while images and ground truth come from the *physical*
poses.  All randomness derives from one seed through named spawn streams,
so reruns are byte-identical regardless of worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .camera import CameraModel, RangeEstimate
from .config import SceneConfig
from .dataset_io import DatasetRecord, DatasetWriter
from .exceptions import LocalizationError
from .fiducial import localize_from_tags
from .geometry import pose_delta
from .propagation import FrameAnnotation, LabelPropagator
from .simulator import (
    exact_annotations,
    generate_trajectory,
    observe_tags,
    render_frame,
    simulate_rangefinder,
)

# The simulated robot streams poses at 25 Hz; frame timestamps follow it.
POSE_STREAM_HZ = 25.0


@dataclass
class ScanResult:
    out_dir: str
    n_frames_written: int
    skipped_frame_ids: list[int]
    machine_time_sec: float
    range_estimate: RangeEstimate
    records: list[DatasetRecord]
    truth_dir: str | None = None


def run_scan(scene: SceneConfig, camera: CameraModel, initial_labels, *,
             out_dir, n_frames: int, seed: int | None = None,
             method: str = "odometry", write_images: bool = True,
             write_overlays: bool = False, truth_dir=None, jobs: int = 1,
             initial_label_sec: float = 0.0) -> ScanResult:
    """Produce a labeled dataset (and optionally its ground-truth twin)."""
    if method not in ("odometry", "fiducial"):
        raise ValueError(f"unknown localization method {method!r}")
    if seed is None:
        seed = scene.seed
    board, noise, mount = scene.board, scene.noise, scene.mount

    root_seq = np.random.SeedSequence(seed)
    range_seq, trajectory_seq, frames_seq = root_seq.spawn(3)
    frame_seqs = frames_seq.spawn(n_frames)

    # The labeling pose is read by the encoders with the arm at rest, so its
    # reported value is the physical configuration; repeatability scatter
    # applies to the poses reached after moving away (the scan frames).
    initial_camera = scene.initial_camera_pose()

    range_estimate = simulate_rangefinder(
        initial_camera, board, noise,
        rng=np.random.default_rng(range_seq),
    )

    propagator = LabelPropagator(camera).fit(
        initial_labels, initial_camera, distance=range_estimate
    )
    initial_pose_vector = initial_camera.to_pose_vector()

    trajectory = generate_trajectory(
        board, camera, scene.workspace, n_frames, noise, trajectory_seq, mount=mount
    )

    writer = DatasetWriter(out_dir, camera.width, camera.height,
                           write_images=write_images, write_overlays=write_overlays)
    truth_writer = None
    if truth_dir is not None:
        truth_writer = DatasetWriter(truth_dir, camera.width, camera.height,
                                     write_images=write_images,
                                     write_overlays=write_overlays)
    truth_initial_vector = initial_camera.to_pose_vector()

    def process_frame(frame) -> tuple[int, bool]:
        rng = np.random.default_rng(frame_seqs[frame.frame_id])
        physical_camera = frame.true_camera(mount)
        timestamp = frame.frame_id / POSE_STREAM_HZ

        if method == "odometry":
            used_camera = frame.reported_camera(mount)
        else:
            observations = observe_tags(board, physical_camera, camera, noise, rng)
            try:
                used_camera = localize_from_tags(observations, board, camera).pose
            except LocalizationError:
                return frame.frame_id, False

        annotation = propagator.propagate(
            used_camera, frame_id=frame.frame_id, timestamp=timestamp
        )
        image = None
        if write_images:
            image, _ = render_frame(board, physical_camera, camera, tint_rng=rng)
        pose_vector = used_camera.to_pose_vector()
        writer.write_frame(
            annotation,
            pose_vector=pose_vector,
            pose_delta_vector=pose_delta(pose_vector, initial_pose_vector),
            range_estimate=range_estimate,
            method=method,
            image=image,
        )

        if truth_writer is not None:
            truth_annotation = FrameAnnotation(
                frame_id=frame.frame_id,
                polygons=tuple(exact_annotations(board, physical_camera, camera)),
                camera_pose=physical_camera,
                timestamp=timestamp,
            )
            truth_vector = physical_camera.to_pose_vector()
            truth_writer.write_frame(
                truth_annotation,
                pose_vector=truth_vector,
                pose_delta_vector=pose_delta(truth_vector, truth_initial_vector),
                range_estimate=range_estimate,
                method="truth",
                image=image,
            )
        return frame.frame_id, True

    start = time.perf_counter()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(process_frame, trajectory.frames))
    else:
        outcomes = [process_frame(frame) for frame in trajectory.frames]
    machine_time = time.perf_counter() - start

    skipped = sorted(fid for fid, ok in outcomes if not ok)
    report = {
        "n_frames_requested": n_frames,
        "n_frames_written": n_frames - len(skipped),
        "skipped_frame_ids": skipped,
        "machine_time_sec": machine_time,
        "initial_label_sec": initial_label_sec,
        "seed": seed,
        "method": method,
        "range_mean_m": range_estimate.mean,
        "range_sigma_m": range_estimate.sigma,
    }
    writer.write_run_report(report)
    if truth_writer is not None:
        truth_writer.write_run_report({**report, "method": "truth"})

    return ScanResult(
        out_dir=str(out_dir),
        n_frames_written=n_frames - len(skipped),
        skipped_frame_ids=skipped,
        machine_time_sec=machine_time,
        range_estimate=range_estimate,
        records=writer.records,
        truth_dir=None if truth_dir is None else str(truth_dir),
    )
