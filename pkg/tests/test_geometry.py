import numpy as np
import pytest

from autolabel import CameraMount, DegenerateGeometryError, RigidTransform, pose_delta
from autolabel.geometry import matrix_to_rotvec, rotation_about_x, rotvec_to_matrix

from conftest import random_transform


class TestCameraMount:
    def test_quarter_turn_matches_reference_matrix(self):
        mount = CameraMount(theta=np.pi / 2, dx=0.0, dy=0.0, dz=0.0)
        expected = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
        t = mount.transform()
        assert np.allclose(t.rotation, expected, atol=1e-12)
        assert np.allclose(t.translation, 0.0)

    def test_zero_angle_is_identity(self):
        t = CameraMount(theta=0.0, dx=0.0, dy=0.0, dz=0.0).transform()
        assert np.allclose(t.matrix(), np.eye(4), atol=1e-12)

    def test_translation_decouples_from_rotation(self):
        t = CameraMount(theta=np.pi / 2, dx=0.01, dy=0.02, dz=0.03).transform()
        assert np.allclose(t.rotation, rotation_about_x(np.pi / 2))
        assert np.allclose(t.translation, [0.01, 0.02, 0.03])

    def test_y_axis_maps_to_z_axis(self):
        t = CameraMount(theta=np.pi / 2, dx=0.0, dy=0.05, dz=0.03).transform()
        assert np.allclose(t.rotate([0.0, 1.0, 0.0]), [0.0, 0.0, 1.0], atol=1e-12)


class TestCompose:
    def test_identity_right(self, rng):
        t = random_transform(rng)
        assert np.allclose((t @ RigidTransform.identity()).matrix(), t.matrix())

    def test_identity_left(self, rng):
        t = random_transform(rng)
        assert np.allclose((RigidTransform.identity() @ t).matrix(), t.matrix())

    def test_matches_homogeneous_matrix_product(self, rng):
        # Oracle: brute-force 4x4 multiply of the homogeneous matrices.
        for _ in range(200):
            a = random_transform(rng)
            b = random_transform(rng)
            expected = a.matrix() @ b.matrix()
            assert np.allclose((a @ b).matrix(), expected, atol=1e-12)

    def test_associativity(self, rng):
        for _ in range(1000):
            a, b, c = (random_transform(rng) for _ in range(3))
            left = ((a @ b) @ c).matrix()
            right = (a @ (b @ c)).matrix()
            assert np.allclose(left, right, atol=1e-9)

    def test_rotation_closure(self, rng):
        t = RigidTransform.identity()
        for _ in range(50):
            t = t @ random_transform(rng)
        r = t.rotation
        assert np.allclose(r.T @ r, np.eye(3), atol=1e-9)
        assert abs(np.linalg.det(r) - 1.0) < 1e-9


class TestInverse:
    def test_identity(self):
        assert np.allclose(RigidTransform.identity().inverse().matrix(), np.eye(4))

    def test_pure_translation(self):
        t = RigidTransform(np.eye(3), [1.0, 2.0, 3.0])
        assert np.allclose(t.inverse().translation, [-1.0, -2.0, -3.0])

    def test_composition_yields_identity(self, rng):
        for _ in range(100):
            t = random_transform(rng)
            assert np.allclose((t @ t.inverse()).matrix(), np.eye(4), atol=1e-9)
            assert np.allclose((t.inverse() @ t).matrix(), np.eye(4), atol=1e-9)


class TestPoseVector:
    def test_identity_is_zero(self):
        assert np.allclose(RigidTransform.identity().to_pose_vector(), np.zeros(6))

    def test_rotation_about_z(self):
        t = RigidTransform.from_pose_vector([0, 0, 0, 0, 0, 0.1])
        assert np.allclose(t.to_pose_vector(), [0, 0, 0, 0, 0, 0.1], atol=1e-12)

    def test_round_trip_closure(self, rng):
        for _ in range(1000):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(0.0, np.pi - 0.01)
            pose = np.concatenate([rng.uniform(-2, 2, 3), axis * angle])
            t = RigidTransform.from_pose_vector(pose)
            assert np.allclose(t.to_pose_vector(), pose, atol=1e-9)
            again = RigidTransform.from_pose_vector(t.to_pose_vector())
            assert np.allclose(again.matrix(), t.matrix(), atol=1e-9)

    def test_angle_pi_rejected(self):
        flip = rotvec_to_matrix([np.pi, 0.0, 0.0])
        with pytest.raises(DegenerateGeometryError):
            matrix_to_rotvec(flip)

    def test_small_angle_series(self):
        vec = np.array([1e-10, -2e-10, 5e-11])
        assert np.allclose(matrix_to_rotvec(rotvec_to_matrix(vec)), vec, atol=1e-15)


class TestPoseDelta:
    def test_same_pose_is_exactly_zero(self, rng):
        p = rng.normal(size=6)
        assert np.array_equal(pose_delta(p, p), np.zeros(6))

    def test_unit_example(self):
        d = pose_delta([1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0])
        assert np.array_equal(d, [1, 0, 0, 0, 0, 0])

    def test_componentwise_oracle(self, rng):
        for _ in range(100):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            d = pose_delta(a, b)
            for k in range(6):
                assert d[k] == a[k] - b[k]


class TestValidation:
    def test_rejects_non_orthonormal_rotation(self):
        bad = np.eye(3)
        bad[0, 0] = 1.1
        with pytest.raises(ValueError):
            RigidTransform(bad, np.zeros(3))

    def test_rejects_reflection(self):
        bad = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError):
            RigidTransform(bad, np.zeros(3))

    def test_immutable(self):
        t = RigidTransform.identity()
        with pytest.raises(AttributeError):
            t.translation = np.ones(3)
        with pytest.raises(ValueError):
            t.rotation[0, 0] = 2.0

    def test_from_matrix_round_trip(self, rng):
        t = random_transform(rng)
        assert np.allclose(RigidTransform.from_matrix(t.matrix()).matrix(), t.matrix())
