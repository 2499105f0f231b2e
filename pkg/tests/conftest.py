import numpy as np
import pytest

from goras.liegroup import exp_se3_array, make_pose
from goras.sequence import uniform_times
from goras.skeleton import SkeletonSequence


def random_axis(rng, size=()):
    a = rng.standard_normal(size + (3,))
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def random_rotation_vector(rng, size=(), max_angle=np.pi - 0.1):
    return random_axis(rng, size) * rng.uniform(0.0, max_angle, size)[..., None]


def random_pose(rng, size=(), max_angle=np.pi - 0.1, scale=2.0):
    omega = random_rotation_vector(rng, size, max_angle)
    v = rng.uniform(-scale, scale, size + (3,))
    return exp_se3_array(omega, v)


def rotation_about(axis, angle):
    omega = np.asarray(axis, dtype=float) * angle
    return exp_se3_array(omega, np.zeros(3))[:3, :3]


def translating_sequence(xs, n=1, labels=None):
    """Joints with identity rotation and translation ``(x(t), 0, 0)``."""
    xs = np.asarray(xs, dtype=float)
    T = xs.size
    frames = np.tile(np.eye(4), (T, n, 1, 1))
    frames[:, :, 0, 3] = xs[:, None]
    labels = labels or tuple(f"j{k}" for k in range(n))
    return SkeletonSequence(labels, uniform_times(T), frames)


def static_sequence(T=10, n=2, seed=0):
    rng = np.random.default_rng(seed)
    pose = random_pose(rng, (n,), max_angle=1.0)
    return SkeletonSequence(tuple(f"j{k}" for k in range(n)), uniform_times(T), np.tile(pose, (T, 1, 1, 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


__all__ = ["make_pose"]


# acceptance criteria register their verdicts here; printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
