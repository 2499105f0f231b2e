"""Skeleton distances, the mean sequence error and alignment inefficiency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatchError
from ..liegroup import WeightMatrix, pose_distance_array
from ..skeleton import SkeletonSequence


def frame_distance(G: np.ndarray, H: np.ndarray, W: WeightMatrix, count: bool = True) -> float:
    """Joint-averaged pose distance between two frames of shape ``(n, 4, 4)``."""
    return float(np.mean(pose_distance_array(G, H, W, count=count)))


def sequence_error(seq1: SkeletonSequence, seq2: SkeletonSequence, W: WeightMatrix, count: bool = True) -> float:
    """Mean over time of :func:`frame_distance`; the sequences must share ``T`` and ``n``."""
    if seq1.frames.shape != seq2.frames.shape:
        raise ShapeMismatchError(f"cannot compare shapes {seq1.frames.shape} and {seq2.frames.shape}")
    total = 0.0
    for G, H in zip(seq1.frames, seq2.frames):
        total += frame_distance(G, H, W, count)
    return total / seq1.T


def alignment_inefficiency(initial_error: float, final_error: float, run_time: float) -> float | None:
    """``E_f * T_R / E_0``; ``None`` (not applicable) when ``E_0`` is zero."""
    if initial_error <= 0.0:
        return None
    return final_error * run_time / initial_error


@dataclass(frozen=True)
class AlignmentOutcome:
    algorithm: str
    initial_error: float
    final_error: float
    run_time: float
    inefficiency: float | None
    path: tuple[tuple[int, int], ...] | None = None
    resampled: bool = False

    @classmethod
    def build(cls, algorithm: str, e0: float, ef: float, run_time: float, **extra) -> AlignmentOutcome:
        return cls(algorithm, e0, ef, run_time, alignment_inefficiency(e0, ef, run_time), **extra)
