"""SE(3) rigid transforms for the robot/camera kinematic chain.

Conventions used throughout the package:

* A ``RigidTransform`` T_A_B maps points from frame B into frame A via
  ``p_A = R @ p_B + t``.  The camera pose is the camera-to-world transform;
  world coordinates are the robot base frame.
* Units are meters and radians everywhere inside the library.  Millimeters
  and degrees appear only at I/O boundaries (config files, CSV reports).
* Pose vectors are 6-arrays ``(x, y, z, rx, ry, rz)`` where the rotational
  part is an axis-angle rotation vector, the native convention of the
  robot controller this models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateGeometryError
from .validation import check_matrix, check_rotation, check_vector

# Reject rotation-vector extraction this close to the angle-pi singularity.
PI_ANGLE_GUARD = 1e-6


def hat(v) -> np.ndarray:
    """Skew-symmetric cross-product matrix of a 3-vector."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotation_about_x(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_about_y(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_about_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotvec_to_matrix(rotvec) -> np.ndarray:
    """Rodrigues formula: rotation vector (axis * angle, radians) to matrix."""
    r = check_vector(rotvec, 3, "rotation vector")
    angle = float(np.linalg.norm(r))
    k = hat(r)
    if angle < 1e-8:
        # Second-order series, exact to floating point at this scale.
        return np.eye(3) + k + 0.5 * (k @ k)
    a = math.sin(angle) / angle
    b = (1.0 - math.cos(angle)) / (angle * angle)
    return np.eye(3) + a * k + b * (k @ k)


def matrix_to_rotvec(matrix) -> np.ndarray:
    """Inverse Rodrigues: rotation matrix to rotation vector.

    Raises DegenerateGeometryError within PI_ANGLE_GUARD of the angle-pi
    singularity, where the axis sign is not recoverable.
    """
    r = check_rotation(matrix, "rotation matrix")
    cos_angle = min(1.0, max(-1.0, 0.5 * (np.trace(r) - 1.0)))
    angle = math.acos(cos_angle)
    axis_raw = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    if angle < 1e-8:
        return 0.5 * axis_raw
    if math.pi - angle < PI_ANGLE_GUARD:
        raise DegenerateGeometryError(
            f"rotation angle {angle:.9f} rad is within {PI_ANGLE_GUARD} of pi; "
            "the rotation-vector representation is degenerate there"
        )
    return (angle / (2.0 * math.sin(angle))) * axis_raw


class RigidTransform:
    """An SE(3) element stored as a 3x3 rotation and a 3-vector translation.

    Immutable after construction; all operations return new instances, so
    values are safe to share across threads.
    """

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation, translation, *, check: bool = True):
        if check:
            rotation = check_rotation(rotation, "rotation")
            translation = check_vector(translation, 3, "translation")
        else:
            rotation = np.asarray(rotation, dtype=float)
            translation = np.asarray(translation, dtype=float)
        rotation = rotation.copy()
        translation = translation.copy()
        rotation.flags.writeable = False
        translation.flags.writeable = False
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    def __setattr__(self, name, value):
        raise AttributeError("RigidTransform is immutable")

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3), check=False)

    @classmethod
    def from_matrix(cls, matrix) -> "RigidTransform":
        m = check_matrix(matrix, (4, 4), "homogeneous matrix")
        if not np.allclose(m[3], [0.0, 0.0, 0.0, 1.0], atol=1e-9):
            raise ValueError("last row of a homogeneous transform must be (0, 0, 0, 1)")
        return cls(m[:3, :3], m[:3, 3])

    @classmethod
    def from_pose_vector(cls, pose) -> "RigidTransform":
        p = check_vector(pose, 6, "pose vector")
        return cls(rotvec_to_matrix(p[3:]), p[:3], check=False)

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def to_pose_vector(self) -> np.ndarray:
        return np.concatenate([self.translation, matrix_to_rotvec(self.rotation)])

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self @ other: apply ``other`` first, then ``self``."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
            check=False,
        )

    __matmul__ = compose

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation, check=False)

    def apply(self, points) -> np.ndarray:
        """Transform one (3,) point or an (N, 3) batch."""
        p = np.asarray(points, dtype=float)
        return p @ self.rotation.T + self.translation

    def rotate(self, vectors) -> np.ndarray:
        """Rotate direction vectors (translation ignored)."""
        return np.asarray(vectors, dtype=float) @ self.rotation.T

    def __repr__(self) -> str:
        t = np.array2string(self.translation, precision=4, suppress_small=True)
        return f"RigidTransform(t={t}, angle={self.rotation_angle():.4f} rad)"

    def rotation_angle(self) -> float:
        cos_angle = min(1.0, max(-1.0, 0.5 * (np.trace(self.rotation) - 1.0)))
        return math.acos(cos_angle)


def pose_delta(current, initial) -> np.ndarray:
    """Componentwise pose-vector difference (current - initial).

    Reporting/telemetry only: rotation-vector subtraction is not a group
    operation, so no propagation math is built on it.
    """
    c = check_vector(current, 6, "current pose")
    i = check_vector(initial, 6, "initial pose")
    return c - i


@dataclass(frozen=True)
class CameraMount:
    """Fixed end-effector-to-camera transform: a rotation about the tool
    x axis plus a lever-arm offset taken from the rig CAD model.

    theta is radians; offsets are meters.
    """

    theta: float = math.pi / 2
    dx: float = 0.0
    dy: float = 0.05
    dz: float = 0.03

    def transform(self) -> RigidTransform:
        return RigidTransform(
            rotation_about_x(self.theta), (self.dx, self.dy, self.dz), check=False
        )


def mount_transform(mount: CameraMount) -> RigidTransform:
    """Functional alias for CameraMount.transform()."""
    return mount.transform()
