"""
SE(3) / SO(3) primitives and the weighted Frobenius metric.

All array functions are batched over leading axes: a stack of poses has
shape ``(..., 4, 4)``.  The :class:`Pose`, :class:`Twist` and
:class:`WeightMatrix` wrappers validate single elements and are what the
public, non-batched API hands around.

The weighted norm is ``||A||_W = sqrt(tr(A W A^T))`` so that, for a twist
``[[w^, v], [0, 0]]`` and ``W = diag(J, m)`` with ``J = tr(I)/2 * 1 - I``,
the squared norm is the kinetic-energy form ``w^T I w + m |v|^2``.
"""

from __future__ import annotations

import threading
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from .errors import BranchAmbiguityError, DegenerateFrameError, InvalidParameterError

ORTHO_TOL = 1e-9
SKEW_TOL = 1e-12
SMALL_ANGLE = 1e-4
PI_MARGIN = 1e-6
SINGULAR_DET = 1e-12


# ---------------------------------------------------------------------------
# Instrumentation
# ---------------------------------------------------------------------------


class OpCounter:
    """Process-wide tally of expensive kernel calls (thread safe)."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counts: Counter[str] = Counter()

    def add(self, key: str, amount: int = 1) -> None:
        with self._lock:
            self._counts[key] += amount

    def __getitem__(self, key: str) -> int:
        with self._lock:
            return self._counts[key]

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return dict(self._counts)

    def reset(self) -> None:
        with self._lock:
            self._counts.clear()


counters = OpCounter()

NORM = "norm"
SVD = "svd"


@contextmanager
def counting() -> Iterator[OpCounter]:
    """Reset the global counters and yield them for inspection."""
    counters.reset()
    yield counters


# ---------------------------------------------------------------------------
# Basic helpers
# ---------------------------------------------------------------------------


def hat(w: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrices from 3-vectors, batched."""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., 0, 1] = -w[..., 2]
    out[..., 0, 2] = w[..., 1]
    out[..., 1, 0] = w[..., 2]
    out[..., 1, 2] = -w[..., 0]
    out[..., 2, 0] = -w[..., 1]
    out[..., 2, 1] = w[..., 0]
    return out


def vee(A: np.ndarray) -> np.ndarray:
    return np.stack([A[..., 2, 1], A[..., 0, 2], A[..., 1, 0]], axis=-1)


def make_pose(R: np.ndarray, r: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    r = np.asarray(r, dtype=float)
    out = np.zeros(R.shape[:-2] + (4, 4))
    out[..., :3, :3] = R
    out[..., :3, 3] = r
    out[..., 3, 3] = 1.0
    return out


def make_twist(omega: np.ndarray, v: np.ndarray) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    out = np.zeros(omega.shape[:-1] + (4, 4))
    out[..., :3, :3] = hat(omega)
    out[..., :3, 3] = v
    return out


def inverse_pose(g: np.ndarray) -> np.ndarray:
    """Closed-form inverse of rigid transforms."""
    Rt = np.swapaxes(g[..., :3, :3], -1, -2)
    out = np.zeros_like(g)
    out[..., :3, :3] = Rt
    out[..., :3, 3] = -np.einsum("...ij,...j->...i", Rt, g[..., :3, 3])
    out[..., 3, 3] = 1.0
    return out


def pose_violation(g: np.ndarray) -> str | None:
    """Return a description of the first violated Pose invariant, if any."""
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4):
        return f"expected a 4x4 matrix, got shape {g.shape}"
    if not np.all(np.isfinite(g)):
        return "non-finite entries"
    if not np.array_equal(g[3], [0.0, 0.0, 0.0, 1.0]):
        return "bottom row is not [0, 0, 0, 1]"
    R = g[:3, :3]
    if np.linalg.norm(R.T @ R - np.eye(3)) > ORTHO_TOL:
        return "rotation block is not orthonormal"
    if abs(np.linalg.det(R) - 1.0) > ORTHO_TOL:
        return "rotation block has det != +1"
    return None


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pose:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        problem = pose_violation(m)
        if problem is not None:
            raise InvalidParameterError(f"invalid pose: {problem}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> Pose:
        return cls(np.eye(4))

    @classmethod
    def from_rt(cls, R, r) -> Pose:
        return cls(make_pose(R, r))

    @property
    def rotation(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.matrix[:3, 3]

    def inverse(self) -> Pose:
        return Pose(inverse_pose(self.matrix))

    def __matmul__(self, other: Pose) -> Pose:
        return Pose(self.matrix @ other.matrix)

    def log(self) -> Twist:
        return log_se3(self)


@dataclass(frozen=True)
class Twist:
    """Element of se(3): ``[[hat(omega), v], [0, 0]]``."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise InvalidParameterError(f"expected a 4x4 matrix, got shape {m.shape}")
        A = m[:3, :3]
        if np.abs(A + A.T).max() > SKEW_TOL:
            raise InvalidParameterError("rotational block is not skew-symmetric")
        if np.any(m[3] != 0.0):
            raise InvalidParameterError("bottom row of a twist must be zero")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vectors(cls, omega, v) -> Twist:
        return cls(make_twist(omega, v))

    @property
    def omega(self) -> np.ndarray:
        return vee(self.matrix[:3, :3])

    @property
    def v(self) -> np.ndarray:
        return self.matrix[:3, 3].copy()

    def exp(self) -> Pose:
        return exp_se3(self)


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric positive definite ``diag(J, m)`` weight of the Frobenius norm."""

    matrix: np.ndarray = field(default_factory=lambda: unit_sphere_weight().matrix)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise InvalidParameterError(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.abs(m - m.T).max() > 1e-12:
            raise InvalidParameterError("weight matrix must be symmetric")
        if np.linalg.eigvalsh(m).min() <= 0.0:
            raise InvalidParameterError("weight matrix must be positive definite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def J(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def mass(self) -> float:
        return float(self.matrix[3, 3])

    @cached_property
    def twist_form(self) -> tuple[float, np.ndarray, np.ndarray | None, float]:
        """``(tr J, J, off-diagonal column or None, m)`` used by :func:`twist_norm`."""
        b = self.matrix[:3, 3]
        return float(np.trace(self.J)), self.J, (b.copy() if np.any(b != 0.0) else None), self.mass

    def scaled(self, factor: float) -> WeightMatrix:
        return WeightMatrix(self.matrix * factor)


def build_weight_matrix(mass: float, inertia_diag) -> WeightMatrix:
    """``W = diag(J, mass)`` with ``J = tr(I)/2 * 1 - I`` for a diagonal inertia ``I``."""
    inertia_diag = np.asarray(inertia_diag, dtype=float)
    if inertia_diag.shape != (3,):
        raise InvalidParameterError("inertia_diag must have three components")
    if not mass > 0 or not np.all(inertia_diag > 0):
        raise InvalidParameterError("mass and inertia components must be positive")
    inertia = np.diag(inertia_diag)
    J = 0.5 * np.trace(inertia) * np.eye(3) - inertia
    W = np.zeros((4, 4))
    W[:3, :3] = J
    W[3, 3] = mass
    return WeightMatrix(W)


def unit_sphere_weight(mass: float = 1.0, radius: float = 1.0) -> WeightMatrix:
    """Weight matrix of a solid sphere; the default gives ``diag(1/5, 1/5, 1/5, 1)``."""
    moment = 0.4 * mass * radius**2
    return build_weight_matrix(mass, (moment, moment, moment))


# ---------------------------------------------------------------------------
# Norm
# ---------------------------------------------------------------------------


def _weight_array(W) -> np.ndarray:
    return W.matrix if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)


def weighted_frobenius_norm(A: np.ndarray, W, squared: bool = False, count: bool = True) -> np.ndarray | float:
    """
    ``sqrt(tr(A W A^T))`` for one matrix or a stack of them.

    Each matrix in the batch counts as one evaluation on the global
    ``norm`` counter unless ``count`` is False (reporting-only metrics).
    """
    A = np.asarray(A, dtype=float)
    Wm = _weight_array(W)
    sq = np.einsum("...ij,jk,...ik->...", A, Wm, A)
    if count:
        counters.add(NORM, int(np.prod(A.shape[:-2], dtype=int)))
    sq = np.maximum(sq, 0.0)
    out = sq if squared else np.sqrt(sq)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Exponential and logarithm
# ---------------------------------------------------------------------------


def exp_so3_coeffs(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``sin(t)/t``, ``(1-cos t)/t^2`` and ``(t-sin t)/t^3`` with small-angle series."""
    small = theta < SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(t) / t)
    b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, (1.0 - np.cos(t)) / (t * t))
    c = np.where(small, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0, (t - np.sin(t)) / (t * t * t))
    return a, b, c


def exp_se3_array(omega: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Batched exponential from twist coordinates ``(omega, v)`` to 4x4 poses."""
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(omega, axis=-1)
    a, b, c = exp_so3_coeffs(theta)
    K = hat(omega)
    K2 = K @ K
    eye = np.eye(3)
    R = eye + a[..., None, None] * K + b[..., None, None] * K2
    V = eye + b[..., None, None] * K + c[..., None, None] * K2
    return make_pose(R, np.einsum("...ij,...j->...i", V, v))


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def log_rt(R: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Twist coordinates of the rigid motions ``(R, r)``; see :func:`log_se3_array`."""
    axis2 = np.empty(R.shape[:-1])
    axis2[..., 0] = R[..., 2, 1] - R[..., 1, 2]
    axis2[..., 1] = R[..., 0, 2] - R[..., 2, 0]
    axis2[..., 2] = R[..., 1, 0] - R[..., 0, 1]
    s = 0.5 * np.sqrt((axis2 * axis2).sum(axis=-1))
    cos = 0.5 * (np.trace(R, axis1=-2, axis2=-1) - 1.0)
    theta = np.arctan2(s, cos)
    if theta.size and theta.max() > np.pi - PI_MARGIN:
        raise BranchAmbiguityError("rotation angle within 1e-6 of pi; logarithm branch is ambiguous")
    t2 = theta * theta
    small = theta < SMALL_ANGLE
    if small.any():
        t = np.where(small, 1.0, theta)
        # theta / (2 sin theta)
        k = np.where(small, 0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0, t / (2.0 * np.where(small, 1.0, s)))
        half = 0.5 * t
        q = np.where(small, 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0, (1.0 - half / np.tan(half)) / (t * t))
    else:
        k = theta / (2.0 * s)
        half = 0.5 * theta
        # coefficient of hat(omega)^2 in V^{-1}
        q = (1.0 - half / np.tan(half)) / t2
    omega = k[..., None] * axis2
    # V^{-1} r = r - w x r / 2 + q (w (w.r) - |w|^2 r)
    wr = (omega * r).sum(axis=-1)
    v = (1.0 - q * t2)[..., None] * r - 0.5 * _cross(omega, r) + (q * wr)[..., None] * omega
    return omega, v


def log_se3_array(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Batched principal logarithm returning twist coordinates ``(omega, v)``.

    Raises BranchAmbiguityError when any rotation angle is within
    ``PI_MARGIN`` of pi.
    """
    g = np.asarray(g, dtype=float)
    return log_rt(g[..., :3, :3], g[..., :3, 3])


def log_se3(g: Pose) -> Twist:
    omega, v = log_se3_array(g.matrix)
    return Twist(make_twist(omega, v))


def exp_se3(xi: Twist) -> Pose:
    m = xi.matrix
    return Pose(exp_se3_array(vee(m[:3, :3]), m[:3, 3]))


# ---------------------------------------------------------------------------
# Projection and distances
# ---------------------------------------------------------------------------


def project_to_so3(M: np.ndarray) -> np.ndarray:
    """
    Nearest proper rotation ``U diag(1, 1, sign det(U V^H)) V^H`` of each 3x3 block.

    Counts one ``svd`` per matrix.
    """
    M = np.asarray(M, dtype=float)
    det = np.linalg.det(M)
    if np.any(~np.isfinite(det)) or np.any(np.abs(det) <= SINGULAR_DET):
        raise DegenerateFrameError("3x3 block is singular or nearly so; cannot project to SO(3)")
    U, _, Vh = np.linalg.svd(M)
    counters.add(SVD, int(np.prod(M.shape[:-2], dtype=int)))
    flip = np.linalg.det(U @ Vh) < 0.0
    if np.any(flip):
        U = U.copy()
        U[..., :, 2] = np.where(flip[..., None], -U[..., :, 2], U[..., :, 2])
    return U @ Vh


def twist_norm(omega: np.ndarray, v: np.ndarray, W, squared: bool = False, count: bool = True):
    """
    Weighted norm of the twists ``(omega, v)`` without forming 4x4 matrices.

    Uses ``tr(hat(w) J hat(w)^T) = tr(J)|w|^2 - w^T J w``; agrees with
    :func:`weighted_frobenius_norm` on the corresponding twist matrices and
    counts the same way.
    """
    if not isinstance(W, WeightMatrix):
        W = WeightMatrix(W)
    trJ, J, coupling, mass = W.twist_form
    sq = trJ * (omega * omega).sum(axis=-1) - (omega * (omega @ J)).sum(axis=-1) + mass * (v * v).sum(axis=-1)
    if coupling is not None:
        sq = sq + 2.0 * (v * _cross(omega, coupling)).sum(axis=-1)
    if count:
        counters.add(NORM, int(np.prod(np.shape(omega)[:-1], dtype=int)))
    sq = np.maximum(sq, 0.0)
    out = sq if squared else np.sqrt(sq)
    return float(out) if out.ndim == 0 else out


def relative_motion(g: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotation and translation of ``g^{-1} h``, batched."""
    Rg = g[..., :3, :3]
    Rh = h[..., :3, :3]
    R = np.einsum("...ji,...jk->...ik", Rg, Rh)
    r = np.einsum("...ji,...j->...i", Rg, h[..., :3, 3] - g[..., :3, 3])
    return R, r


def relative_twist(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """4x4 twist matrices ``log(g^{-1} h)``, batched."""
    omega, v = log_rt(*relative_motion(g, h))
    return make_twist(omega, v)


def pose_distance_array(g: np.ndarray, h: np.ndarray, W, count: bool = True) -> np.ndarray:
    omega, v = log_rt(*relative_motion(np.asarray(g, dtype=float), np.asarray(h, dtype=float)))
    return twist_norm(omega, v, W, count=count)


def pose_distance(g: Pose, h: Pose, W: WeightMatrix) -> float:
    """``||log(g^{-1} h)||_W``; symmetric and left-invariant."""
    return float(pose_distance_array(g.matrix, h.matrix, W))
