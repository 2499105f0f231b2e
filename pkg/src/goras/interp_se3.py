"""
Piecewise minimum-acceleration cubics on SE(3)^n.

Each joint is interpolated between knots by the Hermite cubic in the affine
group that matches poses and first derivatives at both ends.  The
translation column is used as is; the 3x3 block is pushed back onto SO(3)
by the SVD projection of ``M(t) J``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrameError, DegenerateSegmentError, InvalidParameterError
from .liegroup import Pose, project_to_so3, unit_sphere_weight
from .numerics import DEFAULT_STENCIL, differentiate_array
from .skeleton import SkeletonSequence

MIN_SPAN = 1e-12


def _default_J() -> np.ndarray:
    return unit_sphere_weight().J


def hermite_coefficients(g0, g1, d0, d1, h):
    """
    Local coefficients ``C0..C3`` with ``M(t_lo + s) = C0 + C1 s + C2 s^2 + C3 s^3``.

    Broadcasts over leading axes; ``h`` must broadcast against ``g0[..., 0, 0]``.
    """
    h = np.asarray(h, dtype=float)[..., None, None]
    dx = g1 - g0
    dv = d1 - d0
    jerk = 6.0 * (d0 + d1) / h**2 - 12.0 * dx / h**3
    accel = dv / h - 0.5 * jerk * h
    return g0, d0, 0.5 * accel, jerk / 6.0


@dataclass(frozen=True, eq=False)
class CubicSegment:
    """One joint's cubic on ``[t_lo, t_hi]``, stored in the local variable ``s = t - t_lo``."""

    coeffs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    t_lo: float
    t_hi: float

    def matrix_at(self, t: float) -> np.ndarray:
        s = t - self.t_lo
        c0, c1, c2, c3 = self.coeffs
        return c0 + s * (c1 + s * (c2 + s * c3))

    def velocity_at(self, t: float) -> np.ndarray:
        s = t - self.t_lo
        _, c1, c2, c3 = self.coeffs
        return c1 + s * (2.0 * c2 + 3.0 * s * c3)

    def global_coefficients(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(M3, M2, M1, M0)`` with ``M(t) = M3 t^3/6 + M2 t^2/2 + M1 t + M0`` in absolute time."""
        g0, d0, half_accel, sixth_jerk = self.coeffs
        t0 = self.t_lo
        M3 = 6.0 * sixth_jerk
        M2 = 2.0 * half_accel - M3 * t0
        M1 = d0 - M3 * t0**2 / 2 - M2 * t0
        M0 = g0 - M3 * t0**3 / 6 - M2 * t0**2 / 2 - M1 * t0
        return M3, M2, M1, M0


def build_segment(g_i, g_next, dg_i, dg_next, t_i: float, t_next: float) -> CubicSegment:
    g_i = g_i.matrix if isinstance(g_i, Pose) else np.asarray(g_i, dtype=float)
    g_next = g_next.matrix if isinstance(g_next, Pose) else np.asarray(g_next, dtype=float)
    h = t_next - t_i
    if not h > MIN_SPAN:
        raise DegenerateSegmentError(f"segment [{t_i}, {t_next}] is too short")
    coeffs = hermite_coefficients(g_i, g_next, np.asarray(dg_i, float), np.asarray(dg_next, float), h)
    return CubicSegment(tuple(np.array(c) for c in coeffs), float(t_i), float(t_next))


def _to_pose(M: np.ndarray, J: np.ndarray) -> np.ndarray:
    out = np.zeros(M.shape)
    out[..., :3, :3] = project_to_so3(M[..., :3, :3] @ J)
    out[..., :3, 3] = M[..., :3, 3]
    out[..., 3, 3] = 1.0
    return out


def eval_segment(seg: CubicSegment, t: float, J=None) -> Pose:
    if not seg.t_lo <= t <= seg.t_hi:
        raise InvalidParameterError(f"t={t} outside segment [{seg.t_lo}, {seg.t_hi}]")
    J = _default_J() if J is None else np.asarray(J, dtype=float)
    try:
        return Pose(_to_pose(seg.matrix_at(t), J))
    except DegenerateFrameError as exc:
        raise DegenerateFrameError(f"segment [{seg.t_lo}, {seg.t_hi}] at t={t}: {exc}") from None


def differentiate_skeleton(
    seq: SkeletonSequence, stencil_size: int = DEFAULT_STENCIL, boundary: str = "one-sided"
) -> np.ndarray:
    """Entrywise time derivative of every joint pose, shape ``(T, n, 4, 4)``."""
    deriv = differentiate_array(seq.times, seq.frames[..., :3, :], stencil_size, boundary)
    out = np.zeros(seq.frames.shape)
    out[..., :3, :] = deriv
    return out


def segment_index(times: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Knot interval per query; a query on a knot belongs to the segment starting there."""
    return np.clip(np.searchsorted(times, queries, side="right") - 1, 0, times.size - 2)


def interpolate_skeleton(seq: SkeletonSequence, deriv: np.ndarray, query_times, J=None) -> np.ndarray:
    """
    Evaluate the piecewise cubic through ``seq`` at ``query_times``.

    Returns a ``(Q, n, 4, 4)`` array of poses.  Every query projects one
    3x3 block per joint.
    """
    J = _default_J() if J is None else np.asarray(J, dtype=float)
    times = seq.times
    q = np.asarray(query_times, dtype=float)
    if q.ndim != 1:
        raise InvalidParameterError("query_times must be 1-D")
    if q.size and (q.min() < times[0] or q.max() > times[-1]):
        raise InvalidParameterError("query times outside the sequence's time range")
    frames = seq.frames
    h = np.diff(times)
    if np.any(h <= MIN_SPAN):
        raise DegenerateSegmentError("knot spacing below 1e-12")
    c0, c1, c2, c3 = hermite_coefficients(frames[:-1], frames[1:], deriv[:-1], deriv[1:], h[:, None])
    seg = segment_index(times, q)
    out = np.empty((q.size,) + frames.shape[1:])
    for k in range(q.size):
        i = seg[k]
        s = q[k] - times[i]
        M = c0[i] + s * (c1[i] + s * (c2[i] + s * c3[i]))
        try:
            out[k] = _to_pose(M, J)
        except DegenerateFrameError:
            raise DegenerateFrameError(f"singular cubic block in segment {i} at t={q[k]}") from None
    return out
