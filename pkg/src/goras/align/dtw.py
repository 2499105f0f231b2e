"""
Exact DTW and FastDTW over skeleton frames.

Both use the joint-averaged SE(3) distance per cell and report the
accumulated cost divided by the number of nodes on the optimal path.
The FastDTW recursion is the usual one: coarsen by two, solve,
project the path back up, widen it by ``radius`` and refine inside that
window.
"""

from __future__ import annotations

import time

import numpy as np

from ..errors import InvalidParameterError
from ..liegroup import WeightMatrix, project_to_so3
from ..skeleton import SkeletonSequence
from .metrics import AlignmentOutcome, frame_distance, sequence_error
from .ust import UstConfig, _common_grid

INF = float("inf")


def dtw_path(x: np.ndarray, y: np.ndarray, W: WeightMatrix, window=None):
    """
    Accumulated-cost DP with steps (1,0), (0,1), (1,1).

    ``window`` is an iterable of allowed ``(i, j)`` cells in row-major
    order; ``None`` means the full grid.  Returns ``(cost, path)`` with the
    path running from ``(0, 0)`` to ``(len(x)-1, len(y)-1)``.
    """
    nx, ny = len(x), len(y)
    if window is None:
        window = ((i, j) for i in range(nx) for j in range(ny))
    acc = {(-1, -1): (0.0, -1, -1)}
    get = acc.get
    none = (INF, -1, -1)
    for i, j in window:
        d = frame_distance(x[i], y[j], W)
        # diagonal first so ties prefer it
        best = min(
            (get((i - 1, j - 1), none)[0], i - 1, j - 1),
            (get((i - 1, j), none)[0], i - 1, j),
            (get((i, j - 1), none)[0], i, j - 1),
            key=lambda c: c[0],
        )
        acc[i, j] = (best[0] + d, best[1], best[2])
    i, j = nx - 1, ny - 1
    cost = acc[i, j][0]
    path = []
    while i >= 0 and j >= 0:
        path.append((i, j))
        _, i, j = acc[i, j]
    path.reverse()
    return cost, path


def reduce_by_half(x: np.ndarray) -> np.ndarray:
    """Average neighbouring frames pairwise; rotations are re-projected onto SO(3)."""
    m = len(x) - len(x) % 2
    avg = 0.5 * (x[0:m:2] + x[1:m:2])
    out = avg.copy()
    out[..., :3, :3] = project_to_so3(avg[..., :3, :3])
    return out


def expand_window(path, len_x: int, len_y: int, radius: int) -> list[tuple[int, int]]:
    cells = set()
    for i, j in path:
        for a in range(-radius, radius + 1):
            for b in range(-radius, radius + 1):
                cells.add((i + a, j + b))
    fine = set()
    for i, j in cells:
        fine.update(((2 * i, 2 * j), (2 * i, 2 * j + 1), (2 * i + 1, 2 * j), (2 * i + 1, 2 * j + 1)))
    # an odd trailing frame was dropped by the coarsening; extend the window over it
    if len_x % 2:
        fine.update([(len_x - 1, j) for i, j in fine if i == len_x - 2])
    if len_y % 2:
        fine.update([(i, len_y - 1) for i, j in fine if j == len_y - 2])
    window = []
    start_j = 0
    for i in range(len_x):
        new_start = None
        for j in range(start_j, len_y):
            if (i, j) in fine:
                window.append((i, j))
                if new_start is None:
                    new_start = j
            elif new_start is not None:
                break
        start_j = new_start if new_start is not None else start_j
    return window


def fastdtw_path(x: np.ndarray, y: np.ndarray, W: WeightMatrix, radius: int):
    if radius < 0:
        raise InvalidParameterError("radius must be non-negative")
    min_size = radius + 2
    if len(x) < min_size or len(y) < min_size:
        return dtw_path(x, y, W)
    _, coarse = fastdtw_path(reduce_by_half(x), reduce_by_half(y), W, radius)
    window = expand_window(coarse, len(x), len(y), radius)
    return dtw_path(x, y, W, window)


def _initial_error(seq1, seq2, W):
    a, b, _ = _common_grid(seq1, seq2, UstConfig(weight=W))
    return sequence_error(a, b, W, count=False)


def dtw_align(seq1: SkeletonSequence, seq2: SkeletonSequence, W: WeightMatrix) -> AlignmentOutcome:
    e0 = _initial_error(seq1, seq2, W)
    start = time.perf_counter()
    cost, path = dtw_path(seq1.frames, seq2.frames, W)
    ef = cost / len(path)
    elapsed = time.perf_counter() - start
    return AlignmentOutcome.build("dtw", e0, ef, elapsed, path=tuple(path))


def fastdtw_align(seq1: SkeletonSequence, seq2: SkeletonSequence, W: WeightMatrix, radius: int) -> AlignmentOutcome:
    e0 = _initial_error(seq1, seq2, W)
    start = time.perf_counter()
    cost, path = fastdtw_path(seq1.frames, seq2.frames, W, radius)
    ef = cost / len(path)
    elapsed = time.perf_counter() - start
    return AlignmentOutcome.build(f"fastdtw:{radius}", e0, ef, elapsed, path=tuple(path))
