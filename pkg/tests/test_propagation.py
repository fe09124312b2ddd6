import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from autolabel import (
    CameraModel,
    LabelPropagator,
    Plane,
    PolygonAnnotation,
    RigidTransform,
    anchor_plane,
    apply_homography,
    measure_point_latency,
    plane_homography,
    project_points,
)
from autolabel.geometry import rotation_about_y

from conftest import random_transform


def grid_polygons(camera, count=8, size=40.0):
    """A spread of square annotations across the image."""
    polys = []
    rng = np.random.default_rng(7)
    for k in range(count):
        u = rng.uniform(80, camera.width - 80)
        v = rng.uniform(60, camera.height - 60)
        square = np.array([[u, v], [u + size, v], [u + size, v + size], [u, v + size]])
        polys.append(PolygonAnnotation(k % 3 + 1, square))
    return polys


def scan_pose(rng, base_pose, span=0.15, angle=0.15):
    """A pose near the base pose, still looking at the anchor plane."""
    wiggle = random_transform(rng, max_angle=angle, span=span)
    return base_pose @ wiggle


class TestAnnotationTypes:
    def test_needs_three_vertices(self):
        with pytest.raises(ValueError):
            PolygonAnnotation(1, [[0, 0], [1, 1]])

    def test_rejects_consecutive_duplicates(self):
        with pytest.raises(ValueError):
            PolygonAnnotation(1, [[0, 0], [0, 0], [1, 1], [2, 0]])
        with pytest.raises(ValueError):
            # wrap-around duplicate: the ring is open
            PolygonAnnotation(1, [[0, 0], [1, 1], [2, 0], [0, 0]])

    def test_self_intersection_allowed(self):
        PolygonAnnotation(1, [[0, 0], [2, 2], [2, 0], [0, 2]])


class TestAnchoring:
    def test_center_pixel_lands_on_axis(self, simple_camera):
        pose = RigidTransform.identity()
        prop = LabelPropagator(simple_camera).fit(
            [PolygonAnnotation(1, [[320, 240], [360, 240], [320, 280]])],
            pose, distance=1.2,
        )
        assert np.allclose(prop.anchored_[0].world_vertices[0], [0, 0, 1.2], atol=1e-9)

    def test_anchored_vertices_lie_on_plane(self, simple_camera, rng):
        pose = random_transform(rng, span=0.3)
        prop = LabelPropagator(simple_camera).fit(
            grid_polygons(simple_camera), pose, distance=1.0
        )
        for anchored in prop.anchored_:
            residual = prop.plane_.signed_distance(anchored.world_vertices)
            assert np.max(np.abs(residual)) < 1e-9

    def test_reprojection_recovers_inputs(self, simple_camera, rng):
        pose = random_transform(rng, span=0.2)
        labels = grid_polygons(simple_camera)
        prop = LabelPropagator(simple_camera).fit(labels, pose, distance=1.4)
        result = prop.propagate(pose)
        for orig, back in zip(labels, result.polygons):
            assert np.max(np.abs(orig.vertices - back.vertices)) < 1e-6

    def test_tilted_pose_with_explicit_plane_still_exact(self, simple_camera):
        # The plane comes from configuration, not from a parallelism
        # assumption: a 5-degree tilted labeling pose round-trips exactly.
        tilt = RigidTransform(rotation_about_y(np.deg2rad(5.0)), [0.0, 0.0, 0.0])
        plane = Plane.from_point_normal([0, 0, 1.2], [0, 0, -1.0])
        labels = grid_polygons(simple_camera)
        prop = LabelPropagator(simple_camera).fit(labels, tilt, plane=plane)
        back = prop.propagate(tilt)
        for orig, new in zip(labels, back.polygons):
            assert np.max(np.abs(orig.vertices - new.vertices)) < 1e-6


class TestPropagate:
    def test_identity_motion_fixpoint(self, simple_camera, rng):
        pose = random_transform(rng, span=0.2)
        labels = grid_polygons(simple_camera, count=12)
        prop = LabelPropagator(simple_camera).fit(labels, pose, distance=1.2)
        frame = prop.propagate(pose, frame_id=3, timestamp=0.12)
        assert frame.frame_id == 3 and frame.timestamp == 0.12
        for orig, new in zip(labels, frame.polygons):
            assert np.max(np.abs(orig.vertices - new.vertices)) < 1e-6

    def test_frontal_translation_shifts_by_fifty_pixels(self, simple_camera):
        # fx = 600, D = 1.2 m, camera moves +0.1 m along x:
        # every pixel moves by exactly -fx * 0.1 / 1.2 = -50 px in u.
        pose0 = RigidTransform.identity()
        labels = grid_polygons(simple_camera)
        prop = LabelPropagator(simple_camera).fit(labels, pose0, distance=1.2)
        moved = RigidTransform(np.eye(3), [0.1, 0.0, 0.0])
        frame = prop.propagate(moved)
        for orig, new in zip(labels, frame.polygons):
            shift = new.vertices - orig.vertices
            assert np.allclose(shift[:, 0], -50.0, atol=1e-9)
            assert np.allclose(shift[:, 1], 0.0, atol=1e-9)

    def test_class_ids_preserved(self, simple_camera, rng):
        pose0 = random_transform(rng, span=0.1)
        labels = grid_polygons(simple_camera, count=10)
        prop = LabelPropagator(simple_camera).fit(labels, pose0, distance=1.2)
        frame = prop.propagate(scan_pose(rng, pose0))
        assert not frame.dropped_indices
        assert sorted(frame.class_ids) == sorted(p.class_id for p in labels)

    def test_behind_camera_polygon_dropped_not_error(self, simple_camera):
        pose0 = RigidTransform.identity()
        labels = grid_polygons(simple_camera, count=4)
        prop = LabelPropagator(simple_camera).fit(labels, pose0, distance=1.2)
        # Walk past the plane, still looking forward: anchored points behind.
        past = RigidTransform(np.eye(3), [0.0, 0.0, 2.5])
        frame = prop.propagate(past)
        assert frame.polygons == ()
        assert frame.dropped_indices == (0, 1, 2, 3)

    def test_composition_consistency(self, simple_camera, rng):
        # A->B then re-anchor at B and go B->C equals direct A->C.
        pose_a = random_transform(rng, span=0.1)
        labels = grid_polygons(simple_camera, count=6)
        prop_a = LabelPropagator(simple_camera).fit(labels, pose_a, distance=1.3)
        pose_b = scan_pose(rng, pose_a)
        pose_c = scan_pose(rng, pose_a)
        at_b = prop_a.propagate(pose_b)
        at_c_direct = prop_a.propagate(pose_c)
        prop_b = LabelPropagator(simple_camera).fit(
            at_b.polygons, pose_b, plane=prop_a.plane_
        )
        at_c_chained = prop_b.propagate(pose_c)
        for direct, chained in zip(at_c_direct.polygons, at_c_chained.polygons):
            assert np.max(np.abs(direct.vertices - chained.vertices)) < 1e-6

    def test_transform_maps_pose_sequence(self, simple_camera, rng):
        pose0 = random_transform(rng, span=0.1)
        prop = LabelPropagator(simple_camera).fit(
            grid_polygons(simple_camera), pose0, distance=1.2
        )
        poses = [scan_pose(rng, pose0) for _ in range(5)]
        frames = prop.transform(poses, frame_ids=[10, 11, 12, 13, 14])
        assert [f.frame_id for f in frames] == [10, 11, 12, 13, 14]
        single = prop.propagate(poses[2], frame_id=12)
        for a, b in zip(frames[2].polygons, single.polygons):
            assert np.array_equal(a.vertices, b.vertices)


class TestEstimatorApi:
    def test_unfitted_raises(self, simple_camera):
        with pytest.raises(NotFittedError):
            LabelPropagator(simple_camera).propagate(RigidTransform.identity())

    def test_fit_returns_self_and_sets_state(self, simple_camera):
        prop = LabelPropagator(simple_camera)
        out = prop.fit(grid_polygons(simple_camera), RigidTransform.identity(),
                       distance=1.2)
        assert out is prop
        assert prop.n_polygons_ == 8
        assert prop.distance_ == 1.2

    def test_get_params_and_clone(self, simple_camera):
        prop = LabelPropagator(simple_camera)
        assert prop.get_params() == {"camera": simple_camera}
        fresh = clone(prop)
        assert fresh.camera == simple_camera
        assert not hasattr(fresh, "anchored_")

    def test_missing_camera_rejected(self):
        with pytest.raises(ValueError):
            LabelPropagator().fit(
                [PolygonAnnotation(1, [[0, 0], [1, 0], [0, 1]])],
                RigidTransform.identity(), distance=1.0,
            )


class TestHomographyOracle:
    def test_identity_motion_gives_identity(self, simple_camera):
        pose = RigidTransform.identity()
        plane = anchor_plane(pose, 1.2)
        h = plane_homography(pose, pose, simple_camera, plane)
        assert np.allclose(h, np.eye(3), atol=1e-9)

    def test_frontal_translation_is_pixel_shift(self, simple_camera):
        pose0 = RigidTransform.identity()
        plane = anchor_plane(pose0, 1.2)
        moved = RigidTransform(np.eye(3), [0.1, 0.0, 0.0])
        h = plane_homography(pose0, moved, simple_camera, plane)
        expected = np.array([[1.0, 0.0, -50.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        assert np.allclose(h, expected, atol=1e-9)

    def test_agrees_with_propagation_on_random_poses(self, simple_camera, rng):
        pose0 = random_transform(rng, span=0.1)
        plane = anchor_plane(pose0, 1.25)
        prop = LabelPropagator(simple_camera).fit(
            grid_polygons(simple_camera, count=10), pose0, plane=plane
        )
        initial = np.vstack([p.vertices for p in prop.propagate(pose0).polygons])
        for _ in range(25):
            pose_i = scan_pose(rng, pose0)
            h = plane_homography(pose0, pose_i, simple_camera, plane)
            via_h = apply_homography(h, initial)
            via_prop = np.vstack(
                [p.vertices for p in prop.propagate(pose_i).polygons]
            )
            assert np.max(np.abs(via_h - via_prop)) < 1e-6

    def test_requires_zero_distortion(self):
        cam = CameraModel(fx=500, fy=500, cx=320, cy=240, width=640, height=480,
                          dist=(-0.1, 0.0, 0.0, 0.0))
        pose = RigidTransform.identity()
        with pytest.raises(ValueError):
            plane_homography(pose, pose, cam, anchor_plane(pose, 1.0))

    def test_camera_on_plane_rejected(self, simple_camera):
        from autolabel import DegenerateGeometryError
        pose = RigidTransform.identity()
        plane = Plane.from_point_normal([0.0, 0.0, 0.0], [0.0, 0.0, -1.0])
        with pytest.raises(DegenerateGeometryError):
            plane_homography(pose, pose, simple_camera, plane)


class TestLatency:
    def test_per_point_budget(self, camera):
        stats = measure_point_latency(camera, n_points=20_000)
        assert stats.mean_s < 1e-4
        assert stats.max_s < 0.04
        assert stats.frame_mean_s < 0.01
