"""Core value types: skeleton sequences and time reparameterizations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, ParseError
from .liegroup import ORTHO_TOL


def check_frames(frames: np.ndarray) -> None:
    """Raise ParseError naming the first frame/joint that is not a valid pose."""
    if frames.ndim != 4 or frames.shape[2:] != (4, 4):
        raise ParseError(f"frames must have shape (T, n, 4, 4), got {frames.shape}")
    finite = np.isfinite(frames).all(axis=(2, 3))
    R = frames[..., :3, :3]
    ortho = np.linalg.norm(np.swapaxes(R, -1, -2) @ R - np.eye(3), axis=(-2, -1)) <= ORTHO_TOL
    det = np.abs(np.linalg.det(np.where(finite[..., None, None], R, 0.0)) - 1.0) <= ORTHO_TOL
    bottom = (frames[..., 3, :] == np.array([0.0, 0.0, 0.0, 1.0])).all(axis=-1)
    for ok, what in (
        (finite, "non-finite pose entries"),
        (bottom, "bottom row is not [0, 0, 0, 1]"),
        (det, "rotation block has det != +1"),
        (ortho, "rotation block is not orthonormal"),
    ):
        if not ok.all():
            i, j = np.argwhere(~ok)[0]
            raise ParseError(f"invalid pose at frame {i}, joint {j}: {what}")


def check_times(times: np.ndarray) -> None:
    if times.ndim != 1 or times.size < 2:
        raise ParseError("need at least two time stamps")
    if not np.all(np.isfinite(times)):
        raise ParseError("non-finite time stamps")
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise ParseError(f"non-monotone times at frame {int(np.argmax(steps <= 0)) + 1}")


@dataclass(frozen=True, eq=False)
class SkeletonSequence:
    """
    ``T`` frames of ``n`` joint poses on the unit time interval.

    ``frames`` has shape ``(T, n, 4, 4)``.  Pass ``validate=False`` only for
    frames that are valid by construction.
    """

    joint_labels: tuple[str, ...]
    times: np.ndarray
    frames: np.ndarray
    name: str = ""
    validate: bool = True

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float)
        frames = np.array(self.frames, dtype=float)
        labels = tuple(str(s) for s in self.joint_labels)
        if self.validate:
            check_times(times)
            if times[0] != 0.0 or times[-1] != 1.0:
                raise ParseError("times must start at 0 and end at 1")
            if frames.ndim != 4 or frames.shape[0] != times.size:
                raise ParseError(f"expected {times.size} frames, got array of shape {frames.shape}")
            if frames.shape[1] != len(labels) or len(labels) < 1:
                raise ParseError(f"{len(labels)} joint labels for {frames.shape[1]} joints")
            check_frames(frames)
        times.setflags(write=False)
        frames.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "joint_labels", labels)

    @property
    def T(self) -> int:
        return self.times.size

    @property
    def n(self) -> int:
        return self.frames.shape[1]

    def with_frames(self, frames: np.ndarray, times=None, validate: bool = False) -> SkeletonSequence:
        return SkeletonSequence(
            self.joint_labels,
            self.times if times is None else times,
            frames,
            name=self.name,
            validate=validate,
        )

    def select_joints(self, labels) -> SkeletonSequence:
        index = {label: k for k, label in enumerate(self.joint_labels)}
        missing = [s for s in labels if s not in index]
        if missing:
            raise InvalidParameterError(f"unknown joint labels: {', '.join(missing)}")
        cols = [index[s] for s in labels]
        return SkeletonSequence(tuple(labels), self.times, self.frames[:, cols], name=self.name, validate=False)


@dataclass(frozen=True, eq=False)
class Reparameterization:
    """Samples of a strictly increasing map of [0, 1] onto itself."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.times, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise InvalidParameterError("times and values must be 1-D arrays of equal length >= 2")
        for arr, what in ((t, "times"), (v, "values")):
            if arr[0] != 0.0 or arr[-1] != 1.0:
                raise InvalidParameterError(f"{what} must start at 0 and end at 1")
            if not np.all(np.diff(arr) > 0):
                raise InvalidParameterError(f"{what} must be strictly increasing")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def identity(cls, times) -> Reparameterization:
        t = np.asarray(times, dtype=float)
        return cls(t, t.copy())

    def __len__(self) -> int:
        return self.times.size
