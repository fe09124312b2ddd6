import json

import numpy as np
import pytest

from autolabel import (
    CameraModel,
    NotVisibleError,
    Plane,
    RangeEstimate,
    RigidTransform,
    average_range,
    back_project_to_plane,
    project_points,
    projection_matrix,
)

from conftest import random_transform


def brown_conrady_reference(x, y, k1, k2, p1, p2):
    """Independent distortion oracle, written straight from the polynomial."""
    r2 = x ** 2 + y ** 2
    xd = x * (1 + k1 * r2 + k2 * r2 ** 2) + 2 * p1 * x * y + p2 * (r2 + 2 * x ** 2)
    yd = y * (1 + k1 * r2 + k2 * r2 ** 2) + p1 * (r2 + 2 * y ** 2) + 2 * p2 * x * y
    return xd, yd


class TestProjection:
    def test_optical_axis_hits_principal_point(self, simple_camera):
        for depth in (0.3, 1.0, 7.5):
            px = project_points([0, 0, depth], RigidTransform.identity(), simple_camera)
            assert np.allclose(px, [simple_camera.cx, simple_camera.cy], atol=1e-12)

    def test_unit_example(self, simple_camera):
        px = project_points([0.1, 0.0, 1.0], RigidTransform.identity(), simple_camera)
        assert np.allclose(px, [380.0, 240.0], atol=1e-12)

    def test_behind_camera_raises_never_nan(self, simple_camera):
        with pytest.raises(NotVisibleError):
            project_points([0.0, 0.0, -1.0], RigidTransform.identity(), simple_camera)
        pts, visible = project_points(
            np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 1.0]]),
            RigidTransform.identity(), simple_camera, behind="mask",
        )
        assert not visible[0] and visible[1]
        assert np.all(np.isfinite(pts))

    def test_distortion_matches_reference_polynomial(self, rng):
        cam = CameraModel(fx=600, fy=590, cx=321, cy=239, width=640, height=480,
                          dist=(-0.18, 0.04, 0.001, -0.0006))
        for _ in range(200):
            point = np.array([rng.uniform(-0.3, 0.3), rng.uniform(-0.25, 0.25), 1.0])
            point *= rng.uniform(0.5, 3.0)
            px = project_points(point, RigidTransform.identity(), cam)
            xd, yd = brown_conrady_reference(point[0] / point[2], point[1] / point[2],
                                             *cam.dist)
            assert np.allclose(px, [cam.fx * xd + cam.cx, cam.fy * yd + cam.cy],
                               atol=1e-9)

    def test_pixels_may_fall_outside_image(self, simple_camera):
        px = project_points([2.0, 0.0, 1.0], RigidTransform.identity(), simple_camera)
        assert px[0] > simple_camera.width
        assert not simple_camera.contains(px)


class TestProjectionMatrix:
    def test_identity_pose(self):
        p = projection_matrix(RigidTransform.identity())
        assert np.allclose(p, np.hstack([np.eye(3), np.zeros((3, 1))]))

    def test_translated_camera_inverts_translation(self):
        pose = RigidTransform(np.eye(3), [1.0, 0.0, 0.0])
        p = projection_matrix(pose)
        assert np.allclose(p[:, 3], [-1.0, 0.0, 0.0])

    def test_equals_top_rows_of_inverse(self, rng):
        # Oracle: invert the full 4x4 homogeneous matrix.
        for _ in range(100):
            pose = random_transform(rng)
            expected = np.linalg.inv(pose.matrix())[:3, :]
            assert np.allclose(projection_matrix(pose), expected, atol=1e-9)

    def test_rotation_block_orthonormal(self, rng):
        p = projection_matrix(random_transform(rng))
        assert np.allclose(p[:, :3] @ p[:, :3].T, np.eye(3), atol=1e-9)

    def test_projection_via_matrix_matches_project(self, rng, simple_camera):
        k = simple_camera.intrinsic_matrix()
        for _ in range(100):
            pose = random_transform(rng, span=0.3)
            point = pose.apply(np.array([0.1, -0.05, 1.5]) * rng.uniform(0.5, 2))
            homog = k @ projection_matrix(pose) @ np.append(point, 1.0)
            expected = homog[:2] / homog[2]
            assert np.allclose(
                project_points(point, pose, simple_camera), expected, atol=1e-9
            )


class TestUndistortion:
    @pytest.mark.parametrize("k1", [-0.29, -0.1, 0.1, 0.29])
    def test_round_trip_identity_across_image(self, k1):
        cam = CameraModel(fx=500, fy=500, cx=320, cy=240, width=640, height=480,
                          dist=(k1, 0.0, 0.0, 0.0))
        xs = np.linspace(-320 / 500, 320 / 500, 23)
        ys = np.linspace(-240 / 500, 240 / 500, 17)
        grid = np.array([[x, y] for x in xs for y in ys])
        back = cam.undistort(cam.distort(grid))
        assert np.max(np.abs(back - grid)) < 1e-9

    def test_zero_coefficients_are_exact_identity(self, simple_camera, rng):
        pts = rng.uniform(-0.5, 0.5, (50, 2))
        assert np.array_equal(simple_camera.distort(pts), pts)
        assert np.array_equal(simple_camera.undistort(pts), pts)

    def test_full_model_round_trip(self, rng):
        cam = CameraModel(fx=500, fy=505, cx=318, cy=242, width=640, height=480,
                          dist=(-0.2, 0.05, 0.0012, -0.0008))
        pts = rng.uniform(-0.45, 0.45, (200, 2))
        assert np.max(np.abs(cam.undistort(cam.distort(pts)) - pts)) < 1e-8


class TestBackProjection:
    def test_principal_point_frontal(self, simple_camera):
        pose = RigidTransform.identity()
        plane = Plane.from_point_normal([0, 0, 1.2], [0, 0, -1.0])
        point = back_project_to_plane(
            [simple_camera.cx, simple_camera.cy], pose, simple_camera, plane
        )
        assert np.allclose(point, [0.0, 0.0, 1.2], atol=1e-12)

    def test_round_trip_10k_random_pairs(self, rng, simple_camera):
        pose_count, pixels_per_pose = 100, 100
        worst = 0.0
        for _ in range(pose_count):
            pose = random_transform(rng, span=0.4)
            axis = pose.rotate([0.0, 0.0, 1.0])
            plane = Plane.from_point_normal(
                pose.translation + rng.uniform(0.5, 2.0) * axis, -axis
            )
            pixels = np.column_stack([
                rng.uniform(0, simple_camera.width, pixels_per_pose),
                rng.uniform(0, simple_camera.height, pixels_per_pose),
            ])
            points = back_project_to_plane(pixels, pose, simple_camera, plane)
            again = project_points(points, pose, simple_camera)
            worst = max(worst, float(np.max(np.abs(again - pixels))))
        assert worst < 1e-6

    def test_round_trip_with_distortion(self, rng):
        cam = CameraModel(fx=500, fy=500, cx=320, cy=240, width=640, height=480,
                          dist=(-0.15, 0.03, 0.0005, -0.0003))
        pose = RigidTransform.identity()
        plane = Plane.from_point_normal([0, 0, 1.2], [0, 0, -1.0])
        pixels = np.column_stack([rng.uniform(40, 600, 300), rng.uniform(30, 450, 300)])
        points = back_project_to_plane(pixels, pose, cam, plane)
        assert np.max(np.abs(project_points(points, pose, cam) - pixels)) < 1e-6

    def test_parallel_ray_rejected(self, simple_camera):
        pose = RigidTransform.identity()
        plane = Plane.from_point_normal([0, 1.0, 0.0], [0, -1.0, 0.0])
        from autolabel import DegenerateGeometryError
        with pytest.raises(DegenerateGeometryError):
            back_project_to_plane([320.0, 240.0], pose, simple_camera, plane)


class TestRangeAveraging:
    def test_constant_samples(self):
        est = average_range([1.2, 1.2, 1.2])
        assert est.mean == 1.2 and est.sigma == 0.0 and est.count == 3

    def test_single_sample(self):
        est = average_range([1.0])
        assert est == RangeEstimate(mean=1.0, sigma=0.0, count=1)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            average_range([])

    def test_population_std(self, rng):
        samples = rng.normal(2.0, 0.5, 400)
        est = average_range(samples)
        assert np.isclose(est.sigma, samples.std())  # ddof=0

    def test_thousand_sample_mean_within_clt_bound(self, rng):
        sigma, true_distance = 0.0063, 1.2
        samples = true_distance + rng.normal(0.0, sigma, 1000)
        est = average_range(samples)
        assert abs(est.mean - true_distance) < 3 * sigma / np.sqrt(1000)

    def test_scale_constant(self):
        est = average_range([1.2] * 10)
        assert np.isclose(est.scale(600.0), 1.2 / 600.0)


class TestCalibrationFile:
    def test_load_round_trip(self, tmp_path, simple_camera):
        path = tmp_path / "cam.json"
        path.write_text(json.dumps(simple_camera.to_dict()))
        loaded = CameraModel.load(path)
        assert loaded == simple_camera

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "cam.json"
        path.write_text(json.dumps({"fx": 500}))
        with pytest.raises(ValueError):
            CameraModel.load(path)

    def test_invalid_principal_point_rejected(self):
        with pytest.raises(ValueError):
            CameraModel(fx=500, fy=500, cx=700, cy=240, width=640, height=480)
