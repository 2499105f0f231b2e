"""
Reading and writing skeleton sequences.

``.gsk`` files are UTF-8 JSON::

    {"name": str, "joints": [str, ...], "times": [float, ...],
     "frames": [[[16 floats, row-major 4x4], ... per joint], ... per frame]}

:func:`import_ntu` converts NTU RGB+D ``.skeleton`` text files.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .errors import ParseError
from .sequence import uniform_times
from .skeleton import SkeletonSequence, check_frames, check_times

log = logging.getLogger(__name__)

NTU_JOINTS = (
    "SpineBase", "SpineMid", "Neck", "Head",
    "ShoulderLeft", "ElbowLeft", "WristLeft", "HandLeft",
    "ShoulderRight", "ElbowRight", "WristRight", "HandRight",
    "HipLeft", "KneeLeft", "AnkleLeft", "FootLeft",
    "HipRight", "KneeRight", "AnkleRight", "FootRight",
    "SpineShoulder", "HandTipLeft", "ThumbLeft", "HandTipRight", "ThumbRight",
)  # fmt: skip


def sequence_to_dict(seq: SkeletonSequence) -> dict:
    return {
        "name": seq.name,
        "joints": list(seq.joint_labels),
        "times": seq.times.tolist(),
        "frames": seq.frames.reshape(seq.T, seq.n, 16).tolist(),
    }


def sequence_from_dict(doc: dict) -> SkeletonSequence:
    try:
        name = str(doc.get("name", ""))
        joints = [str(s) for s in doc["joints"]]
        times = np.asarray(doc["times"], dtype=float)
        raw = doc["frames"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed .gsk document: {exc}") from None
    check_times(times)
    if times[0] != 0.0 or times[-1] != 1.0:
        raise ParseError("times must start at 0 and end at 1")
    if len(raw) != times.size:
        raise ParseError(f"{len(raw)} frames for {times.size} time stamps")
    frames = np.empty((times.size, len(joints), 4, 4))
    for i, frame in enumerate(raw):
        if len(frame) != len(joints):
            raise ParseError(f"frame {i} has {len(frame)} poses, expected {len(joints)}")
        for j, pose in enumerate(frame):
            try:
                frames[i, j] = np.asarray(pose, dtype=float).reshape(4, 4)
            except (TypeError, ValueError):
                raise ParseError(f"frame {i}, joint {j}: expected 16 numbers") from None
    check_frames(frames)
    return SkeletonSequence(tuple(joints), times, frames, name=name, validate=False)


def save_sequence(seq: SkeletonSequence, path) -> None:
    Path(path).write_text(json.dumps(sequence_to_dict(seq)), encoding="utf-8")


def load_sequence(path, joints=None) -> SkeletonSequence:
    """Load a ``.gsk`` file, optionally keeping only the given joint labels."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    seq = sequence_from_dict(doc)
    return seq.select_joints(joints) if joints else seq


def quaternion_to_rotation(q: np.ndarray) -> np.ndarray:
    """Rotation matrices from ``(w, x, y, z)`` quaternions (normalised first)."""
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], -1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], -1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], -1),
        ],
        -2,
    )


def read_ntu_skeleton(path) -> tuple[np.ndarray, np.ndarray]:
    """
    Parse an NTU RGB+D ``.skeleton`` file, first tracked body only.

    Layout: frame count; then per frame a body count and, per body, one
    line of 10 body attributes, a joint count, and one line per joint with
    ``x y z depthX depthY colorX colorY qw qx qy qz trackingState``.

    Returns positions ``(T, 25, 3)`` and quaternions ``(T, 25, 4)``.
    """
    tokens = Path(path).read_text(encoding="utf-8").split()
    pos = 0

    def take(count: int) -> list[str]:
        nonlocal pos
        if pos + count > len(tokens):
            raise ParseError(f"{path}: unexpected end of file")
        out = tokens[pos : pos + count]
        pos += count
        return out

    try:
        n_frames = int(take(1)[0])
        positions, quats = [], []
        for i in range(n_frames):
            n_bodies = int(take(1)[0])
            first = None
            for _ in range(n_bodies):
                take(10)
                n_joints = int(take(1)[0])
                rows = np.asarray(take(12 * n_joints), dtype=float).reshape(n_joints, 12)
                if first is None:
                    first = rows
            if first is None:
                log.warning("%s: frame %d has no body, skipped", path, i)
                continue
            positions.append(first[:, 0:3])
            quats.append(first[:, 7:11])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if len(positions) < 2:
        raise ParseError(f"{path}: fewer than two frames with a tracked body")
    return np.stack(positions), np.stack(quats)


def import_ntu(path, joints=None, name: str | None = None) -> SkeletonSequence:
    """
    Convert an NTU ``.skeleton`` file to a sequence on a uniform time grid.

    Joints whose orientation quaternion is zero in any frame carry no
    rotation and are dropped.
    """
    positions, quats = read_ntu_skeleton(path)
    labels = list(NTU_JOINTS[: positions.shape[1]])
    has_rotation = (np.linalg.norm(quats, axis=-1) > 1e-9).all(axis=0)
    dropped = [label for label, ok in zip(labels, has_rotation) if not ok]
    if dropped:
        log.info("%s: dropping joints without orientation: %s", path, ", ".join(dropped))
    keep = np.flatnonzero(has_rotation)
    if keep.size == 0:
        raise ParseError(f"{path}: no joint carries an orientation")
    T = positions.shape[0]
    frames = np.zeros((T, keep.size, 4, 4))
    frames[..., :3, :3] = quaternion_to_rotation(quats[:, keep])
    frames[..., :3, 3] = positions[:, keep]
    frames[..., 3, 3] = 1.0
    seq = SkeletonSequence(
        tuple(labels[k] for k in keep), uniform_times(T), frames, name=name or Path(path).stem
    )
    return seq.select_joints(joints) if joints else seq
