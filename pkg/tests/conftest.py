import numpy as np
import pytest

from autolabel import CameraModel, RigidTransform
from autolabel.config import default_scene
from autolabel.simulator import default_camera


def random_transform(rng, max_angle=np.pi - 0.01, span=1.0):
    """Random valid rigid transform with rotation angle strictly below pi."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, max_angle)
    pose = np.concatenate([rng.uniform(-span, span, 3), axis * angle])
    return RigidTransform.from_pose_vector(pose)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def camera() -> CameraModel:
    return default_camera()


@pytest.fixture(scope="session")
def simple_camera() -> CameraModel:
    # Round numbers make the analytic examples exact.
    return CameraModel(fx=600.0, fy=600.0, cx=320.0, cy=240.0, width=640, height=480)


@pytest.fixture(scope="session")
def scene():
    return default_scene(seed=7)
